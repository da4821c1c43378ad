//! Continuous time dispersion process, explicit Euler in time.
//!
//! The plain process moves a measure: `mu <- mu + dt (A_X mu - mu)` with the
//! support graph taken from the density `X = D^-1 mu`. The projected process
//! works on normalized vectors `w <- P((1 - dt) w + dt M w)`, where `M` is the
//! symmetric normalized operator and `P` an orthogonal projector.

use serde::{Deserialize, Serialize};

use crate::cut::CutResult;
use crate::operator::{self, laplacian_action, tie_sets, TieSets};
use crate::partition::sweep_cut;
use crate::{HgError, Hypergraph, Result, Scalar};

/// Orthogonal projector on `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Projector<T> {
    Identity,
    /// Projects onto the orthogonal complement of these orthonormal vectors.
    Complement(Vec<Vec<T>>),
    /// Projects onto the span of these orthonormal vectors.
    Onto(Vec<Vec<T>>),
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Gram-Schmidt with reorthogonalization; drops numerically dependent vectors.
pub fn orthonormalize<T: Scalar>(vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let scale = norm2(v);
        if scale == T::zero() {
            continue;
        }
        let mut u = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&u, b);
                for (ui, &bi) in u.iter_mut().zip(b) {
                    *ui = *ui - c * bi;
                }
            }
        }
        let nu = norm2(&u);
        if nu > T::of(1e-10) * scale {
            basis.push(u.iter().map(|&x| x / nu).collect());
        }
    }
    basis
}

impl<T: Scalar> Projector<T> {
    /// Projector onto the complement of the span of `vectors`.
    pub fn orthogonal_to(vectors: &[Vec<T>]) -> Self {
        Projector::Complement(orthonormalize(vectors))
    }

    /// Projector onto the span of `vectors`.
    pub fn onto(vectors: &[Vec<T>]) -> Self {
        Projector::Onto(orthonormalize(vectors))
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        match self {
            Projector::Identity => v.to_vec(),
            Projector::Complement(basis) => {
                let mut out = v.to_vec();
                for b in basis {
                    let c = dot(&out, b);
                    for (o, &bi) in out.iter_mut().zip(b) {
                        *o = *o - c * bi;
                    }
                }
                out
            }
            Projector::Onto(basis) => {
                let mut out = vec![T::zero(); v.len()];
                for b in basis {
                    let c = dot(v, b);
                    for (o, &bi) in out.iter_mut().zip(b) {
                        *o = *o + c * bi;
                    }
                }
                out
            }
        }
    }

    /// Distance from `v` to the range, relative to `|v|`.
    pub fn defect(&self, v: &[T]) -> T {
        let p = self.apply(v);
        let d: Vec<T> = v.iter().zip(&p).map(|(&a, &b)| a - b).collect();
        let nv = norm2(v);
        if nv == T::zero() {
            T::zero()
        } else {
            norm2(&d) / nv
        }
    }
}

/// How often the trace records a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cadence {
    /// Every step for `n <= 64`, geometric checkpoints otherwise.
    Auto,
    /// Every `k`-th step.
    Every(usize),
    /// Steps `1, r, r^2, ...` (rounded), plus the last step.
    Geometric(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionConfig<T> {
    pub dt: T,
    pub horizon: T,
    pub delta: T,
    pub projector: Option<Projector<T>>,
    pub tie_eps: T,
    pub cadence: Cadence,
}

impl<T: Scalar> Default for DispersionConfig<T> {
    fn default() -> Self {
        DispersionConfig {
            dt: T::of(0.01),
            horizon: T::of(10.0),
            delta: T::of(0.01),
            projector: None,
            tie_eps: T::of(operator::DEFAULT_TIE_EPS),
            cadence: Cadence::Auto,
        }
    }
}

impl<T: Scalar> DispersionConfig<T> {
    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_horizon(mut self, horizon: T) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_projector(mut self, p: Projector<T>) -> Self {
        self.projector = Some(p);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt < T::one()) {
            return Err(HgError::InvalidInput(format!(
                "dt must lie in (0, 1), got {}",
                self.dt
            )));
        }
        if !(self.delta > T::zero() && self.delta < T::one()) {
            return Err(HgError::InvalidInput("delta must lie in (0, 1)".to_string()));
        }
        if !(self.horizon >= T::zero()) {
            return Err(HgError::InvalidInput("negative horizon".to_string()));
        }
        if !(self.tie_eps >= T::zero()) {
            return Err(HgError::InvalidInput("negative tie tolerance".to_string()));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.horizon / self.dt).round().to_usize().unwrap_or(0)
    }
}

/// One recorded point of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample<T> {
    pub t: T,
    /// `mu^t` for the plain process, `w^t` for the projected one.
    pub state: Vec<T>,
    /// Rayleigh quotient of the component orthogonal to the stationary measure
    /// (plain process) or of the state itself (projected process).
    pub rayleigh: T,
    /// Normalized-coordinate norm `|D^-1/2 (mu - mu*)|`, or `|w|` when projected.
    pub l2_norm: T,
    /// `|mu - mu*|_1`, or the mass norm `|D^1/2 w|_1` when projected.
    pub l1_dist: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionTrace<T> {
    pub samples: Vec<Sample<T>>,
    /// Times at which the support graph differed from the previous step.
    pub support_changes: Vec<T>,
}

fn sample_steps(n: usize, cadence: Cadence, steps: usize) -> Vec<usize> {
    let mut out = vec![0];
    match cadence {
        Cadence::Every(k) => {
            let k = k.max(1);
            out.extend((1..=steps).filter(|s| s % k == 0));
        }
        Cadence::Auto if n <= 64 => out.extend(1..=steps),
        Cadence::Auto | Cadence::Geometric(_) => {
            let r = match cadence {
                Cadence::Geometric(r) if r > 1.0 => r,
                _ => 1.1,
            };
            let mut x = 1.0f64;
            while (x as usize) <= steps {
                let s = x as usize;
                if *out.last().unwrap() != s {
                    out.push(s);
                }
                x = (x * r).max(x + 1.0);
            }
        }
    }
    if *out.last().unwrap() != steps {
        out.push(steps);
    }
    out
}

fn measure_sample<T: Scalar>(h: &Hypergraph<T>, pi: &[T], mu: &[T], t: T) -> Sample<T> {
    let mass: T = mu.iter().copied().sum();
    let omega: Vec<T> = mu.iter().zip(pi).map(|(&m, &p)| m - mass * p).collect();
    let x: Vec<T> = omega.iter().zip(h.degrees()).map(|(&o, &d)| o / d).collect();
    let l2 = omega
        .iter()
        .zip(h.degrees())
        .map(|(&o, &d)| o * o / d)
        .sum::<T>()
        .sqrt();
    let rayleigh = operator::rayleigh(h, &x).unwrap_or(T::zero());
    Sample {
        t,
        state: mu.to_vec(),
        rayleigh,
        l2_norm: l2,
        l1_dist: omega.iter().map(|o| o.abs()).sum(),
    }
}

fn projected_sample<T: Scalar>(h: &Hypergraph<T>, w: &[T], t: T) -> Sample<T> {
    Sample {
        t,
        state: w.to_vec(),
        rayleigh: operator::rayleigh_normalized(h, w).unwrap_or(T::zero()),
        l2_norm: norm2(w),
        l1_dist: w
            .iter()
            .zip(h.degrees())
            .map(|(&v, &d)| (v * d.sqrt()).abs())
            .sum(),
    }
}

fn measure_step<T: Scalar>(h: &Hypergraph<T>, mu: &[T], dt: T, eps: T) -> Result<(Vec<T>, TieSets)> {
    let x: Vec<T> = mu.iter().zip(h.degrees()).map(|(&m, &d)| m / d).collect();
    let ties = tie_sets(h, &x, eps)?;
    let lap = laplacian_action(h, &ties, &x);
    let next = mu.iter().zip(&lap).map(|(&m, &l)| m - dt * l).collect();
    Ok((next, ties))
}

fn projected_step<T: Scalar>(
    h: &Hypergraph<T>,
    w: &[T],
    dt: T,
    eps: T,
    p: &Projector<T>,
) -> Result<(Vec<T>, TieSets)> {
    let x = operator::to_density(h, w);
    let ties = tie_sets(h, &x, eps)?;
    let lap = laplacian_action(h, &ties, &x);
    let raw: Vec<T> = w
        .iter()
        .zip(&lap)
        .zip(h.degrees())
        .map(|((&v, &l), &d)| v - dt * l / d.sqrt())
        .collect();
    Ok((p.apply(&raw), ties))
}

/// One Euler step. Without a projector `omega` is a measure; with one it is a
/// normalized vector that must already lie in the projector's range.
pub fn step<T: Scalar>(h: &Hypergraph<T>, omega: &[T], cfg: &DispersionConfig<T>) -> Result<Vec<T>> {
    cfg.validate()?;
    if omega.len() != h.n() {
        return Err(HgError::InvalidInput("vector length mismatch".to_string()));
    }
    match &cfg.projector {
        None => Ok(measure_step(h, omega, cfg.dt, cfg.tie_eps)?.0),
        Some(p) => {
            if p.defect(omega) > T::of(1e-6) {
                return Err(HgError::InvalidInput(
                    "start vector is not in the projected subspace".to_string(),
                ));
            }
            Ok(projected_step(h, omega, cfg.dt, cfg.tie_eps, p)?.0)
        }
    }
}

/// Runs the plain process from a probability measure, or the projected process
/// from a normalized vector when the configuration carries a projector.
pub fn simulate<T: Scalar>(
    h: &Hypergraph<T>,
    mu0: &[T],
    cfg: &DispersionConfig<T>,
) -> Result<DispersionTrace<T>> {
    if cfg.projector.is_some() {
        return simulate_projected(h, mu0, cfg);
    }
    cfg.validate()?;
    if mu0.len() != h.n() {
        return Err(HgError::InvalidInput("vector length mismatch".to_string()));
    }
    let pi = h.stationary_distribution();
    let steps = cfg.steps();
    let marks = sample_steps(h.n(), cfg.cadence, steps);
    let mut samples = vec![measure_sample(h, &pi, mu0, T::zero())];
    let mut changes = Vec::new();
    let mut mu = mu0.to_vec();
    let mut prev: Option<TieSets> = None;
    let mut next_mark = 1;
    for s in 1..=steps {
        let (next, ties) = measure_step(h, &mu, cfg.dt, cfg.tie_eps)?;
        if prev.as_ref().is_some_and(|p| *p != ties) {
            changes.push(T::of((s - 1) as f64) * cfg.dt);
        }
        prev = Some(ties);
        mu = next;
        if next_mark < marks.len() && marks[next_mark] == s {
            samples.push(measure_sample(h, &pi, &mu, T::of(s as f64) * cfg.dt));
            next_mark += 1;
        }
    }
    Ok(DispersionTrace {
        samples,
        support_changes: changes,
    })
}

/// Runs the projected process on normalized vectors.
pub fn simulate_projected<T: Scalar>(
    h: &Hypergraph<T>,
    w0: &[T],
    cfg: &DispersionConfig<T>,
) -> Result<DispersionTrace<T>> {
    cfg.validate()?;
    if w0.len() != h.n() {
        return Err(HgError::InvalidInput("vector length mismatch".to_string()));
    }
    let p = cfg.projector.clone().unwrap_or(Projector::Identity);
    if p.defect(w0) > T::of(1e-6) {
        return Err(HgError::InvalidInput(
            "start vector is not in the projected subspace".to_string(),
        ));
    }
    let steps = cfg.steps();
    let marks = sample_steps(h.n(), cfg.cadence, steps);
    let mut samples = vec![projected_sample(h, w0, T::zero())];
    let mut changes = Vec::new();
    let mut w = w0.to_vec();
    let mut prev: Option<TieSets> = None;
    let mut next_mark = 1;
    for s in 1..=steps {
        let (next, ties) = projected_step(h, &w, cfg.dt, cfg.tie_eps, &p)?;
        if prev.as_ref().is_some_and(|q| *q != ties) {
            changes.push(T::of((s - 1) as f64) * cfg.dt);
        }
        prev = Some(ties);
        w = next;
        if next_mark < marks.len() && marks[next_mark] == s {
            samples.push(projected_sample(h, &w, T::of(s as f64) * cfg.dt));
            next_mark += 1;
        }
    }
    Ok(DispersionTrace {
        samples,
        support_changes: changes,
    })
}

/// Outcome of a mixing-time measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingReport<T> {
    /// First step time with `|mu^t - mu*|_1 <= delta`; `None` if the horizon ran out.
    pub time: Option<T>,
    pub final_distance: T,
    /// `log(n / delta) / lambda2` when an eigenvalue estimate was supplied.
    pub bound: Option<T>,
    pub within_bound: Option<bool>,
}

/// `log(n / delta) / lambda2`.
pub fn mixing_upper_bound<T: Scalar>(n: usize, delta: T, lambda2: T) -> T {
    (T::of(n as f64) / delta).ln() / lambda2
}

/// `log(1 / delta) / (16 lambda2)`.
pub fn mixing_lower_bound<T: Scalar>(delta: T, lambda2: T) -> T {
    (T::one() / delta).ln() / (T::of(16.0) * lambda2)
}

/// Measures the mixing time of the plain process started at `mu0`.
pub fn mixing_time<T: Scalar>(
    h: &Hypergraph<T>,
    mu0: &[T],
    delta: T,
    cfg: &DispersionConfig<T>,
    lambda2: Option<T>,
) -> Result<MixingReport<T>> {
    let cfg = DispersionConfig {
        delta,
        projector: None,
        ..cfg.clone()
    };
    cfg.validate()?;
    if mu0.len() != h.n() {
        return Err(HgError::InvalidInput("vector length mismatch".to_string()));
    }
    let pi = h.stationary_distribution();
    let dist = |mu: &[T]| -> T { mu.iter().zip(&pi).map(|(&a, &b)| (a - b).abs()).sum() };
    let mut mu = mu0.to_vec();
    let mut d = dist(&mu);
    let mut time = if d <= delta { Some(T::zero()) } else { None };
    let steps = cfg.steps();
    let mut s = 0;
    while time.is_none() && s < steps {
        s += 1;
        mu = measure_step(h, &mu, cfg.dt, cfg.tie_eps)?.0;
        d = dist(&mu);
        if d <= delta {
            time = Some(T::of(s as f64) * cfg.dt);
        }
    }
    let bound = lambda2
        .filter(|&l| l > T::zero())
        .map(|l| mixing_upper_bound(h.n(), delta, l));
    let within_bound = match (time, bound) {
        (Some(t), Some(b)) => Some(t <= b),
        (None, Some(b)) if T::of(steps as f64) * cfg.dt >= b => Some(false),
        _ => None,
    };
    Ok(MixingReport {
        time,
        final_distance: d,
        bound,
        within_bound,
    })
}

/// Probability measure far from stationary whose Rayleigh quotient is at most
/// four times that of `x`, for regular hypergraphs.
///
/// Shifts `x` to a median so both signed parts have half the support, keeps the
/// part of larger norm, centers it, and rescales to `l1` distance exactly 1/2
/// from the uniform measure.
pub fn slow_mixing_distribution<T: Scalar>(h: &Hypergraph<T>, x: &[T]) -> Result<Vec<T>> {
    if x.len() != h.n() {
        return Err(HgError::InvalidInput("vector length mismatch".to_string()));
    }
    if !h.is_regular(T::of(1e-9)) {
        return Err(HgError::Unsupported(
            "slow-mixing construction requires a regular hypergraph".to_string(),
        ));
    }
    let n = h.n();
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite entries"));
    if sorted[n - 1] - sorted[0] <= T::zero() {
        return Err(HgError::InvalidInput("constant vector".to_string()));
    }
    let c = if n % 2 == 0 {
        (sorted[n / 2 - 1] + sorted[n / 2]) / T::of(2.0)
    } else {
        sorted[n / 2]
    };
    let plus: Vec<T> = x.iter().map(|&v| (v - c).max(T::zero())).collect();
    let minus: Vec<T> = x.iter().map(|&v| (c - v).max(T::zero())).collect();
    let part = if norm2(&plus) >= norm2(&minus) { plus } else { minus };
    let mean = part.iter().copied().sum::<T>() / T::of(n as f64);
    let omega: Vec<T> = part.iter().map(|&v| v - mean).collect();
    let l1: T = omega.iter().map(|v| v.abs()).sum();
    if l1 <= T::zero() {
        return Err(HgError::InvalidInput(
            "vector has no usable signed part".to_string(),
        ));
    }
    let base = T::one() / T::of(n as f64);
    Ok(omega
        .iter()
        .map(|&o| (base + o / (T::of(2.0) * l1)).max(T::zero()))
        .collect())
}

/// Sweep cut of the dispersion state at the time with the slowest average
/// decay rate `log(|w^0|^2 / |w^t|^2) / t`.
///
/// Only times before the process mixes to `delta / 2` are considered.
pub fn bottleneck_cut<T: Scalar>(
    h: &Hypergraph<T>,
    mu0: &[T],
    cfg: &DispersionConfig<T>,
) -> Result<CutResult<T>> {
    let plain = DispersionConfig {
        projector: None,
        ..cfg.clone()
    };
    let trace = simulate(h, mu0, &plain)?;
    let first = &trace.samples[0];
    if first.l2_norm <= T::zero() {
        return Err(HgError::InvalidInput(
            "start measure is already stationary".to_string(),
        ));
    }
    let floor = first.l2_norm * T::of(1e-12);
    let mixed_at = trace
        .samples
        .iter()
        .find(|s| s.l1_dist <= cfg.delta)
        .map(|s| s.t);
    let limit = mixed_at.map(|t| t / T::of(2.0));
    let mut best: Option<(T, &Sample<T>)> = None;
    for s in trace.samples.iter().skip(1) {
        if s.l2_norm <= floor || limit.is_some_and(|l| s.t > l) {
            continue;
        }
        let score = (first.l2_norm * first.l2_norm / (s.l2_norm * s.l2_norm)).ln() / s.t;
        if best.is_none_or(|(b, _)| score < b) {
            best = Some((score, s));
        }
    }
    let chosen = best.map(|(_, s)| s).unwrap_or(first);
    let pi = h.stationary_distribution();
    let mass: T = chosen.state.iter().copied().sum();
    let density: Vec<T> = chosen
        .state
        .iter()
        .zip(&pi)
        .zip(h.degrees())
        .map(|((&m, &p), &d)| (m - mass * p) / d)
        .collect();
    sweep_cut(h, &density)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> Hypergraph<f64> {
        Hypergraph::unweighted(2, vec![vec![0, 1]]).unwrap()
    }

    #[test]
    fn stationary_is_fixed() {
        let h = Hypergraph::<f64>::unweighted(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        let pi = h.stationary_distribution();
        let next = step(&h, &pi, &DispersionConfig::default()).unwrap();
        for (a, b) in next.iter().zip(&pi) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn single_edge_step() {
        let cfg = DispersionConfig::default().with_dt(0.1);
        let next = step(&edge(), &[1.0, 0.0], &cfg).unwrap();
        assert!((next[0] - 0.9).abs() < 1e-15 && (next[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_large_dt() {
        let cfg = DispersionConfig::default().with_dt(1.0);
        assert!(step(&edge(), &[1.0, 0.0], &cfg).is_err());
    }

    #[test]
    fn single_edge_mixing_time() {
        let cfg = DispersionConfig::default().with_dt(1e-3).with_horizon(10.0);
        let r = mixing_time(&edge(), &[1.0, 0.0], 0.01, &cfg, Some(2.0)).unwrap();
        let t = r.time.unwrap();
        assert!((t - 100f64.ln() / 2.0).abs() < 0.05 * 100f64.ln() / 2.0);
        assert_eq!(r.within_bound, Some(true));
    }

    #[test]
    fn slow_start_is_half_away() {
        let h = Hypergraph::<f64>::unweighted(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]])
            .unwrap();
        let mu = slow_mixing_distribution(&h, &[3.0, 1.0, -1.0, -2.0]).unwrap();
        let dist: f64 = mu.iter().map(|m| (m - 0.25).abs()).sum();
        assert!((dist - 0.5).abs() < 1e-12);
        assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn irregular_slow_start_rejected() {
        let h = Hypergraph::<f64>::unweighted(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(matches!(
            slow_mixing_distribution(&h, &[1.0, 0.0, -1.0]),
            Err(HgError::Unsupported(_))
        ));
    }

    #[test]
    fn sample_marks_cover_ends() {
        assert_eq!(sample_steps(4, Cadence::Every(3), 7), vec![0, 3, 6, 7]);
        let g = sample_steps(100, Cadence::Auto, 50);
        assert_eq!(g[0], 0);
        assert_eq!(*g.last().unwrap(), 50);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
