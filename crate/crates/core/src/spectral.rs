//! Eigenvalues of the hypergraph Laplacian.
//!
//! Eigenvalues are defined recursively: `lambda_k` is the minimum Rayleigh
//! quotient over vectors orthogonal (in normalized coordinates) to
//! `v_1, ..., v_{k-1}`, with `v_1` the normalized stationary vector. All
//! vectors returned here are unit vectors in normalized coordinates
//! `f = D^1/2 x`; [`EigenPair::density`] converts back.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dispersion::orthonormalize;
use crate::linalg::{column, dot, norm, sym_eigen};
use crate::maxform::{ExactOptions, IterOptions, MaxForm};
use crate::rng::{rng_for, DEFAULT_SEED};
use crate::sdp::{scaled_distance, SdpProblem};
use crate::{HgError, Hypergraph, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Iterative,
    Sdp,
}

impl std::str::FromStr for Method {
    type Err = HgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "iter" | "iterative" => Ok(Method::Iterative),
            "sdp" => Ok(Method::Sdp),
            other => Err(HgError::InvalidInput(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenPair {
    pub value: f64,
    /// Unit vector in normalized coordinates.
    pub vector: Vec<f64>,
    pub method: Method,
    /// `|P L(v) - value v|` with the best splitting of tied edges.
    pub consistency_residual: f64,
    /// False when an iterative or randomized method stopped without meeting
    /// its own acceptance test.
    pub converged: bool,
}

impl EigenPair {
    /// The eigenvector as a density `D^-1/2 v`.
    pub fn density(&self, h: &Hypergraph<f64>) -> Vec<f64> {
        self.vector
            .iter()
            .zip(h.degrees())
            .map(|(v, d)| v / d.sqrt())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ExactConfig {
    /// Largest tie set per side considered for edges of size three or more.
    pub tie_max: usize,
    /// Maximum number of configurations enumerated.
    pub budget: u128,
    /// Relative tolerance used to re-derive ties from a candidate vector.
    pub tie_eps: f64,
    pub residual_tol: f64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            tie_max: 2,
            budget: 1_000_000,
            tie_eps: 1e-7,
            residual_tol: 1e-8,
        }
    }
}

impl ExactConfig {
    fn options(&self) -> ExactOptions {
        ExactOptions {
            tie_max: self.tie_max,
            budget: self.budget,
            tie_eps: self.tie_eps,
            residual_tol: self.residual_tol,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IterConfig {
    pub seed: u64,
    pub dt: f64,
    pub max_steps: usize,
    pub tol: f64,
    pub restarts: usize,
    /// Extra starts taken from the clique expansion's low eigenvectors.
    pub clique_starts: usize,
    pub tie_eps: f64,
}

impl Default for IterConfig {
    fn default() -> Self {
        IterConfig {
            seed: DEFAULT_SEED,
            dt: 0.5,
            max_steps: 100_000,
            tol: 1e-12,
            restarts: 6,
            clique_starts: 2,
            tie_eps: 1e-9,
        }
    }
}

impl IterConfig {
    pub(crate) fn options(&self) -> IterOptions {
        IterOptions {
            dt: self.dt,
            max_steps: self.max_steps,
            tol: self.tol,
            restarts: self.restarts,
            tie_eps: self.tie_eps,
            seed: self.seed,
            ..IterOptions::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpConfig {
    pub trials: usize,
    pub seed: u64,
    /// Trials are accepted when the rounded numerator is at most
    /// `accept_factor * ln(r_max) * sdp value` and `|x|^2 >= accept_mass`.
    pub accept_factor: f64,
    pub accept_mass: f64,
}

impl Default for SdpConfig {
    fn default() -> Self {
        SdpConfig {
            trials: 200,
            seed: DEFAULT_SEED,
            accept_factor: 96.0,
            accept_mass: 0.5,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SpectralConfig {
    pub exact: ExactConfig,
    pub iter: IterConfig,
    pub sdp: SdpConfig,
}

/// Normalized stationary vector `D^1/2 1 / |D^1/2 1|`.
pub fn trivial_vector(h: &Hypergraph<f64>) -> Vec<f64> {
    MaxForm::from_hypergraph(h).trivial()
}

fn check_priors(h: &Hypergraph<f64>, priors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if priors.iter().any(|p| p.len() != h.n()) {
        return Err(HgError::InvalidInput("prior vector length mismatch".to_string()));
    }
    let basis = orthonormalize(priors);
    if basis.len() >= h.n() {
        return Err(HgError::InvalidInput("priors span the whole space".to_string()));
    }
    Ok(basis)
}

/// Residual `|P (L_a v - lambda v)|` minimized over splittings `a` of tied
/// edges, with ties re-derived from `v` at relative tolerance `tie_eps`.
pub fn consistency_residual(
    h: &Hypergraph<f64>,
    vector: &[f64],
    value: f64,
    priors: &[Vec<f64>],
    tie_eps: f64,
) -> Result<f64> {
    let form = MaxForm::from_hypergraph(h);
    let basis = check_priors(h, priors)?;
    let x = form.to_x(vector);
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &v| (l.min(v), u.max(v)));
    let configs = form.ties(&x, tie_eps * (hi - lo));
    Ok(form.certificate_residual(&configs, vector, value, &basis))
}

/// All eigenpairs found by enumerating edge configurations, restricted to the
/// orthogonal complement of `priors`. Sorted by value, deduplicated.
pub fn exact_eigs(h: &Hypergraph<f64>, priors: &[Vec<f64>], cfg: &ExactConfig) -> Result<Vec<EigenPair>> {
    let basis = check_priors(h, priors)?;
    let form = MaxForm::from_hypergraph(h);
    let found = form.enumerate(&basis, &cfg.options())?;
    Ok(found
        .into_iter()
        .map(|c| EigenPair {
            value: c.value,
            vector: c.vector,
            method: Method::Exact,
            consistency_residual: c.residual,
            converged: true,
        })
        .collect())
}

/// Largest `n` for which [`iterative_eig`] diagonalizes the clique expansion.
pub const CLIQUE_START_MAX_N: usize = 400;

/// The lowest eigenvectors of the clique-expansion normalized Laplacian
/// (pair weight `w / (|e| - 1)`), projected off `basis`.
fn clique_starts(h: &Hypergraph<f64>, basis: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    if count == 0 {
        return Vec::new();
    }
    let n = h.n();
    let root: Vec<f64> = h.degrees().iter().map(|d| d.sqrt()).collect();
    let mut m = DMatrix::<f64>::identity(n, n);
    for (e, &w) in h.edges().iter().zip(h.weights()) {
        let pw = w / (e.len() - 1) as f64;
        for (a, &i) in e.iter().enumerate() {
            for &j in &e[a + 1..] {
                let v = pw / (root[i] * root[j]);
                m[(i, j)] -= v;
                m[(j, i)] -= v;
            }
        }
    }
    let (_, vectors) = sym_eigen(m);
    let mut out = Vec::new();
    for c in 0..n {
        if out.len() == count {
            break;
        }
        let mut v = column(&vectors, c);
        for b in basis {
            let p = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let s = norm(&v);
        if s > 1e-6 {
            out.push(v.iter().map(|x| x / s).collect());
        }
    }
    out
}

/// Number of configurations [`exact_eigs`] would enumerate.
pub fn exact_config_count(h: &Hypergraph<f64>, cfg: &ExactConfig) -> u128 {
    MaxForm::from_hypergraph(h).config_count(cfg.tie_max)
}

/// Smallest exact eigenpair orthogonal to `priors`.
pub fn exact_min(h: &Hypergraph<f64>, priors: &[Vec<f64>], cfg: &ExactConfig) -> Result<EigenPair> {
    exact_eigs(h, priors, cfg)?
        .into_iter()
        .next()
        .ok_or_else(|| HgError::Solver("no consistent configuration found".to_string()))
}

/// Minimizes the Rayleigh quotient orthogonal to `priors` by the normalized
/// projected dispersion, then snaps to the nearby face. Starts are the low
/// eigenvectors of the clique expansion (for `n <= CLIQUE_START_MAX_N`) and
/// `cfg.restarts` random vectors.
pub fn iterative_eig(h: &Hypergraph<f64>, priors: &[Vec<f64>], cfg: &IterConfig) -> Result<EigenPair> {
    iterative_eig_from(h, priors, None, cfg)
}

/// As [`iterative_eig`], additionally starting from `start` (normalized coordinates).
pub fn iterative_eig_from(
    h: &Hypergraph<f64>,
    priors: &[Vec<f64>],
    start: Option<&[f64]>,
    cfg: &IterConfig,
) -> Result<EigenPair> {
    let basis = check_priors(h, priors)?;
    let form = MaxForm::from_hypergraph(h);
    let mut warm: Vec<Vec<f64>> = start.into_iter().map(|s| s.to_vec()).collect();
    if h.n() <= CLIQUE_START_MAX_N {
        warm.extend(clique_starts(h, &basis, cfg.clique_starts));
    }
    let out = form.minimize(&basis, &warm, &cfg.options());
    if !out.value.is_finite() {
        return Err(HgError::Solver("iteration produced no vector".to_string()));
    }
    Ok(EigenPair {
        value: out.value,
        vector: out.vector,
        method: Method::Iterative,
        consistency_residual: out.residual,
        converged: out.converged || out.residual <= 1e-8,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SdpEigen {
    pub pair: EigenPair,
    /// Optimal value of the relaxation.
    pub sdp_value: f64,
    /// Index of the returned trial and whether it passed the acceptance test.
    pub trial: usize,
    pub accepted: bool,
}

/// Relaxation of `lambda_k`: minimize `sum_e w_e max_{i,j in e} |u_i/sqrt(d_i) - u_j/sqrt(d_j)|^2`
/// over vectors `u_i` with `sum |u_i|^2 = 1` and `sum_i p(i) u_i = 0` for every
/// prior `p`, then Gaussian rounding.
pub fn sdp_eig_k(h: &Hypergraph<f64>, priors: &[Vec<f64>], cfg: &SdpConfig) -> Result<SdpEigen> {
    let basis = check_priors(h, priors)?;
    let n = h.n();
    let q = orthogonal_complement(&basis, n);
    let root: Vec<f64> = h.degrees().iter().map(|d| d.sqrt()).collect();
    let terms = h
        .edges()
        .iter()
        .zip(h.weights())
        .map(|(e, &w)| {
            let mut pieces = Vec::new();
            for (a, &i) in e.iter().enumerate() {
                for &j in &e[a + 1..] {
                    pieces.push(scaled_distance(i, j, root[i], root[j]));
                }
            }
            (w, pieces)
        })
        .collect();
    let problem = SdpProblem {
        n,
        basis: Some(q),
        terms,
        equalities: vec![((0..n).map(|i| (i, i, 1.0)).collect(), 1.0)],
        inequalities: vec![],
    };
    let sol = problem.solve()?;
    let trace = sol.gram.trace();
    let sdp_value = if trace > 0.0 { sol.objective / trace } else { 0.0 };
    let form = MaxForm::from_hypergraph(h);
    let log_r = (h.r_max() as f64).ln();
    let cols = sol.factor.ncols();
    let mut best: Option<(f64, bool, usize, Vec<f64>)> = None;
    for t in 0..cfg.trials.max(1) {
        let mut rng = rng_for(cfg.seed, t as u64);
        let g: Vec<f64> = (0..cols).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut x: Vec<f64> = (0..n)
            .map(|i| (0..cols).map(|c| sol.factor[(i, c)] * g[c]).sum())
            .collect();
        for p in &basis {
            let c = dot(&x, p);
            x.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        let mass = dot(&x, &x);
        if mass <= 0.0 {
            continue;
        }
        let num = form.numerator(&form.to_x(&x));
        let accepted = num <= cfg.accept_factor * log_r * sdp_value + 1e-12 && mass >= cfg.accept_mass;
        let value = num / mass;
        let better = match &best {
            None => true,
            Some((bv, ba, _, _)) => (accepted && !ba) || (accepted == *ba && value < *bv),
        };
        if better {
            let s = mass.sqrt();
            best = Some((value, accepted, t, x.iter().map(|v| v / s).collect()));
        }
    }
    let (value, accepted, trial, vector) = match best {
        Some(b) => b,
        None => {
            // Zero relaxation value with a degenerate factor: any admissible
            // direction of the optimal face will do.
            let v = sol.factor.column(0).iter().copied().collect::<Vec<f64>>();
            let s = norm(&v);
            if s == 0.0 {
                return Err(HgError::Solver("SDP solution has no rounding direction".to_string()));
            }
            let v: Vec<f64> = v.iter().map(|a| a / s).collect();
            (form.quotient(&v), false, 0, v)
        }
    };
    let residual = consistency_residual(h, &vector, value, &basis, 1e-7)?;
    Ok(SdpEigen {
        pair: EigenPair {
            value,
            vector,
            method: Method::Sdp,
            consistency_residual: residual,
            converged: accepted,
        },
        sdp_value,
        trial,
        accepted,
    })
}

/// Orthonormal basis of the complement of orthonormal `basis`, as columns.
pub(crate) fn orthogonal_complement(basis: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    crate::linalg::null_space(basis, n)
}

/// `v_1, ..., v_k`: the stationary vector followed by successive minimizers
/// orthogonal to everything before.
pub fn eig_sequence(h: &Hypergraph<f64>, k: usize, method: Method, cfg: &SpectralConfig) -> Result<Vec<EigenPair>> {
    if k == 0 || k > h.n() {
        return Err(HgError::InvalidInput(format!("k = {k} must be in 1..={}", h.n())));
    }
    let mut out = vec![EigenPair {
        value: 0.0,
        vector: trivial_vector(h),
        method,
        consistency_residual: 0.0,
        converged: true,
    }];
    while out.len() < k {
        let priors: Vec<Vec<f64>> = out.iter().map(|p| p.vector.clone()).collect();
        let next = match method {
            Method::Exact => exact_min(h, &priors, &cfg.exact)?,
            Method::Iterative => {
                let c = IterConfig {
                    seed: crate::rng::derive_seed(cfg.iter.seed, out.len() as u64),
                    ..cfg.iter.clone()
                };
                iterative_eig(h, &priors, &c)?
            }
            Method::Sdp => {
                let c = SdpConfig {
                    seed: crate::rng::derive_seed(cfg.sdp.seed, out.len() as u64),
                    ..cfg.sdp.clone()
                };
                sdp_eig_k(h, &priors, &c)?.pair
            }
        };
        // Re-orthogonalize against accumulated rounding.
        let mut v = next.vector.clone();
        for p in &priors {
            let c = dot(&v, p);
            v.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        let s = norm(&v);
        if s == 0.0 {
            return Err(HgError::ZeroVector);
        }
        v.iter_mut().for_each(|a| *a /= s);
        out.push(EigenPair { vector: v, ..next });
    }
    Ok(out)
}

/// Rows `u_i in R^k` with `u_i(l) = v_l(i) / sqrt(d_i)`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralEmbedding {
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub vectors: Vec<Vec<f64>>,
}

impl SpectralEmbedding {
    pub fn new(h: &Hypergraph<f64>, vectors: &[Vec<f64>]) -> Result<Self> {
        let n = h.n();
        for (a, u) in vectors.iter().enumerate() {
            if u.len() != n {
                return Err(HgError::InvalidInput("vector length mismatch".to_string()));
            }
            for (b, v) in vectors.iter().enumerate().take(a + 1) {
                let expect = if a == b { 1.0 } else { 0.0 };
                if (dot(u, v) - expect).abs() > 1e-8 {
                    return Err(HgError::InvalidInput("vectors are not orthonormal".to_string()));
                }
            }
        }
        let points = (0..n)
            .map(|i| {
                let s = h.degree(i).sqrt();
                vectors.iter().map(|v| v[i] / s).collect()
            })
            .collect();
        Ok(SpectralEmbedding {
            k: vectors.len(),
            points,
            vectors: vectors.to_vec(),
        })
    }

    pub fn from_pairs(h: &Hypergraph<f64>, pairs: &[EigenPair]) -> Result<Self> {
        let v: Vec<Vec<f64>> = pairs.iter().map(|p| p.vector.clone()).collect();
        SpectralEmbedding::new(h, &v)
    }

    pub fn sq_norm(&self, i: usize) -> f64 {
        dot(&self.points[i], &self.points[i])
    }

    /// `sum_i d_i |u_i|^2`.
    pub fn mass(&self, h: &Hypergraph<f64>) -> f64 {
        (0..h.n()).map(|i| h.degree(i) * self.sq_norm(i)).sum()
    }

    /// `sum_{i,j} d_i d_j <u_i, u_j>^2`.
    pub fn pair_mass(&self, h: &Hypergraph<f64>) -> f64 {
        let n = h.n();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let c = dot(&self.points[i], &self.points[j]);
                s += h.degree(i) * h.degree(j) * c * c;
            }
        }
        s
    }

    /// `sum_e w_e max_{i,j in e} |u_i - u_j|^2`.
    pub fn stretch(&self, h: &Hypergraph<f64>) -> f64 {
        h.edges()
            .iter()
            .zip(h.weights())
            .map(|(e, &w)| {
                let mut m = 0.0f64;
                for (a, &i) in e.iter().enumerate() {
                    for &j in &e[a + 1..] {
                        let d: f64 = self.points[i]
                            .iter()
                            .zip(&self.points[j])
                            .map(|(x, y)| (x - y) * (x - y))
                            .sum();
                        m = m.max(d);
                    }
                }
                w * m
            })
            .sum()
    }

    /// Points scaled to unit length (zero points stay zero).
    pub fn unit_points(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| {
                let s = norm(p);
                if s == 0.0 {
                    p.clone()
                } else {
                    p.iter().map(|v| v / s).collect()
                }
            })
            .collect()
    }
}
