//! Sparsest cut with unit demands.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::hypergraph::BRUTE_FORCE_MAX_N;
use crate::rng::{rng_for, DEFAULT_SEED};
use crate::sdp::{distance, evaluate, Functional, SdpProblem};
use crate::spectral::orthogonal_complement;
use crate::{HgError, Hypergraph, Result};

#[derive(Clone, Debug)]
pub struct DemandInstance {
    pub hypergraph: Hypergraph<f64>,
    pub pairs: Vec<(usize, usize)>,
}

impl DemandInstance {
    pub fn new(hypergraph: Hypergraph<f64>, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(HgError::InvalidInput("no demand pairs".to_string()));
        }
        for &(s, t) in &pairs {
            if s >= hypergraph.n() || t >= hypergraph.n() {
                return Err(HgError::InvalidInput(format!("demand ({s}, {t}) out of range")));
            }
            if s == t {
                return Err(HgError::InvalidInput(format!("demand ({s}, {t}) has equal endpoints")));
            }
        }
        Ok(DemandInstance { hypergraph, pairs })
    }

    /// Reads one `s t` pair per line, 1-based. Blank lines and lines starting
    /// with `%` or `#` are skipped.
    pub fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
                continue;
            }
            let ids: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| HgError::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if ids.len() != 2 || ids.contains(&0) {
                return Err(HgError::Parse {
                    line: i + 1,
                    msg: "expected two 1-based vertex ids".to_string(),
                });
            }
            out.push((ids[0] - 1, ids[1] - 1));
        }
        Ok(out)
    }

    /// Number of demand pairs with exactly one endpoint in the set.
    pub fn separated(&self, inside: &[bool]) -> usize {
        self.pairs.iter().filter(|&&(s, t)| inside[s] != inside[t]).count()
    }

    /// `w(E(S, V\S)) / #separated demands`; `None` when nothing is separated.
    pub fn sparsity(&self, set: &[usize]) -> Result<Option<f64>> {
        let n = self.hypergraph.n();
        let mut inside = vec![false; n];
        for &v in set {
            if v >= n {
                return Err(HgError::InvalidCut(format!("vertex {v} out of range")));
            }
            inside[v] = true;
        }
        let sep = self.separated(&inside);
        Ok((sep > 0).then(|| self.hypergraph.cut_weight(&inside) / sep as f64))
    }

    /// Exact minimum sparsity over all cuts.
    pub fn brute_force(&self) -> Result<(Vec<usize>, f64)> {
        let h = &self.hypergraph;
        let n = h.n();
        if n > BRUTE_FORCE_MAX_N {
            return Err(HgError::SizeGuard {
                what: "vertices",
                got: n as u128,
                limit: BRUTE_FORCE_MAX_N as u128,
            });
        }
        let masks: Vec<u32> = h.edges().iter().map(|e| e.iter().fold(0, |a, &v| a | 1 << v)).collect();
        let full: u32 = (1u32 << n) - 1;
        let mut best = (0u32, f64::INFINITY);
        for s in 1..(1u32 << (n - 1)) {
            let sep = self
                .pairs
                .iter()
                .filter(|&&(a, b)| (s >> a & 1) != (s >> b & 1))
                .count();
            if sep == 0 {
                continue;
            }
            let cut: f64 = masks
                .iter()
                .zip(h.weights())
                .filter(|(m, _)| *m & s != 0 && *m & !s & full != 0)
                .map(|(_, w)| w)
                .sum();
            let phi = cut / sep as f64;
            if phi < best.1 {
                best = (s, phi);
            }
        }
        Ok(((0..n).filter(|&v| best.0 >> v & 1 == 1).collect(), best.1))
    }
}

#[derive(Clone, Debug)]
pub struct DemandsConfig {
    pub trials: usize,
    pub seed: u64,
    /// Triangle inequalities on all triples up to this many vertices.
    pub all_triples_max_n: usize,
    /// Above that, triples sampled per pass.
    pub sampled_triples: usize,
    pub repair_passes: usize,
}

impl Default for DemandsConfig {
    fn default() -> Self {
        DemandsConfig {
            trials: 32,
            seed: DEFAULT_SEED,
            all_triples_max_n: 60,
            sampled_triples: 20_000,
            repair_passes: 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DemandsResult {
    pub set: Vec<usize>,
    pub sparsity: f64,
    pub separated: usize,
    pub sdp_value: f64,
    /// Largest triangle inequality violation of the SDP solution over all triples.
    pub triangle_violation: f64,
    pub trial: usize,
}

fn triangle(i: usize, j: usize, k: usize) -> Functional {
    // d(i,j) + d(j,k) - d(i,k) >= 0
    let mut f = distance(i, j);
    f.extend(distance(j, k));
    f.extend(distance(i, k).into_iter().map(|(a, b, c)| (a, b, -c)));
    f
}

fn all_triangles(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in i + 1..n {
                if j != i && j != k {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

fn sq_dist(y: &nalgebra::DMatrix<f64>, i: usize, j: usize) -> f64 {
    y[(i, i)] + y[(j, j)] - 2.0 * y[(i, j)]
}

fn max_violation(y: &nalgebra::DMatrix<f64>, n: usize) -> f64 {
    all_triangles(n)
        .into_iter()
        .map(|(i, j, k)| sq_dist(y, i, k) - sq_dist(y, i, j) - sq_dist(y, j, k))
        .fold(0.0, f64::max)
}

/// Relaxation with squared-distance vectors and triangle inequalities,
/// followed by Gaussian projection and a sweep over prefix cuts.
pub fn sparsest_cut_demands(inst: &DemandInstance, cfg: &DemandsConfig) -> Result<DemandsResult> {
    let h = &inst.hypergraph;
    let n = h.n();
    let terms = h
        .edges()
        .iter()
        .zip(h.weights())
        .map(|(e, &w)| {
            let mut pieces = Vec::new();
            for (a, &i) in e.iter().enumerate() {
                for &j in &e[a + 1..] {
                    pieces.push(distance(i, j));
                }
            }
            (w, pieces)
        })
        .collect();
    let norm: Functional = inst.pairs.iter().flat_map(|&(s, t)| distance(s, t)).collect();
    // Distances are translation invariant; pinning the centroid at the origin
    // removes the unbounded direction.
    let ones = vec![1.0 / (n as f64).sqrt(); n];
    let mut problem = SdpProblem {
        n,
        basis: Some(orthogonal_complement(&[ones], n)),
        terms,
        equalities: vec![(norm.clone(), 1.0)],
        inequalities: Vec::new(),
    };
    let triples = all_triangles(n);
    let sol = if n <= cfg.all_triples_max_n {
        problem.inequalities = triples.iter().map(|&(i, j, k)| triangle(i, j, k)).collect();
        problem.solve()?
    } else {
        let mut chosen: std::collections::BTreeSet<usize> = Default::default();
        let mut rng = rng_for(cfg.seed, u64::MAX);
        let mut sol = None;
        for pass in 0..=cfg.repair_passes {
            if pass == 0 {
                for _ in 0..cfg.sampled_triples.min(triples.len()) {
                    chosen.insert(rand::Rng::random_range(&mut rng, 0..triples.len()));
                }
            } else if let Some(s) = &sol {
                let s: &crate::sdp::SdpSolution = s;
                let mut worst: Vec<(f64, usize)> = triples
                    .iter()
                    .enumerate()
                    .map(|(t, &(i, j, k))| (sq_dist(&s.gram, i, k) - sq_dist(&s.gram, i, j) - sq_dist(&s.gram, j, k), t))
                    .filter(|(v, _)| *v > 1e-9)
                    .collect();
                if worst.is_empty() {
                    break;
                }
                worst.sort_by(|a, b| b.0.total_cmp(&a.0));
                chosen.extend(worst.into_iter().take(cfg.sampled_triples).map(|(_, t)| t));
            }
            problem.inequalities = chosen.iter().map(|&t| {
                let (i, j, k) = triples[t];
                triangle(i, j, k)
            }).collect();
            sol = Some(problem.solve()?);
        }
        sol.expect("at least one pass")
    };
    let scale = evaluate(&norm, &sol.gram);
    let sdp_value = if scale > 0.0 { sol.objective / scale } else { f64::INFINITY };
    let triangle_violation = if n <= cfg.all_triples_max_n { max_violation(&sol.gram, n) } else { f64::NAN };

    let masks: Vec<Vec<usize>> = h.edges().to_vec();
    let cols = sol.factor.ncols();
    let mut best: Option<(f64, usize, Vec<usize>, usize)> = None;
    for t in 0..cfg.trials.max(1) {
        let mut rng = rng_for(cfg.seed, t as u64);
        let g: Vec<f64> = (0..cols).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x: Vec<f64> = (0..n)
            .map(|i| (0..cols).map(|c| sol.factor[(i, c)] * g[c]).sum())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
        let mut inside = vec![false; n];
        for p in 0..n - 1 {
            inside[order[p]] = true;
            let sep = inst.separated(&inside);
            if sep == 0 {
                continue;
            }
            let cut: f64 = masks
                .iter()
                .zip(h.weights())
                .filter(|(e, _)| {
                    let a = e.iter().filter(|&&v| inside[v]).count();
                    a > 0 && a < e.len()
                })
                .map(|(_, w)| w)
                .sum();
            let phi = cut / sep as f64;
            if best.as_ref().is_none_or(|b| phi < b.0) {
                let mut set = order[..=p].to_vec();
                set.sort_unstable();
                best = Some((phi, sep, set, t));
            }
        }
    }
    let (sparsity, separated, set, trial) =
        best.ok_or_else(|| HgError::Solver("no prefix cut separates a demand".to_string()))?;
    Ok(DemandsResult {
        set,
        sparsity,
        separated,
        sdp_value,
        triangle_violation,
        trial,
    })
}
