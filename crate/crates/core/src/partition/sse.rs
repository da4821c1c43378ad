use serde::Serialize;

use super::separator::OrthogonalSeparator;
use super::sweep::sweep_cut_nonneg;
use crate::cut::{CutResult, RatioType};
use crate::rng::{rng_for, DEFAULT_SEED};
use crate::spectral::{eig_sequence, Method, SpectralConfig, SpectralEmbedding};
use crate::{HgError, Hypergraph, Result};

#[derive(Clone, Debug)]
pub struct SseConfig {
    pub trials: usize,
    pub seed: u64,
    pub beta: f64,
    /// Sets larger than `size_factor * n / k` are not returned unless nothing
    /// smaller was found.
    pub size_factor: f64,
    pub method: Method,
    pub spectral: SpectralConfig,
}

impl Default for SseConfig {
    fn default() -> Self {
        SseConfig {
            trials: 48,
            seed: DEFAULT_SEED,
            beta: 0.99,
            size_factor: 24.0,
            method: Method::Iterative,
            spectral: SpectralConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SseResult {
    pub cut: CutResult<f64>,
    pub size: usize,
    pub size_bound: f64,
    /// False when no trial produced a set within the size bound.
    pub within_bound: bool,
    /// Trial that produced the set.
    pub trial: usize,
}

/// Connected pieces of `set` under the edges restricted to it.
pub(crate) fn pieces(h: &Hypergraph<f64>, set: &[usize]) -> Vec<Vec<usize>> {
    let n = h.n();
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for e in h.edges() {
        let mut first = None;
        for &v in e.iter().filter(|&&v| inside[v]) {
            match first {
                None => first = Some(v),
                Some(f) => {
                    let (a, b) = (find(&mut parent, f), find(&mut parent, v));
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &v in set {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    for g in &mut out {
        g.sort_unstable();
    }
    out.sort();
    out
}

/// Small set of low expansion from the spectral embedding of the first `k`
/// eigenvectors.
pub fn small_set_expansion(h: &Hypergraph<f64>, k: usize, cfg: &SseConfig) -> Result<SseResult> {
    if k < 2 || k >= h.n() {
        return Err(HgError::InvalidInput(format!("k = {k} must satisfy 2 <= k < n")));
    }
    let pairs = eig_sequence(h, k, cfg.method, &cfg.spectral)?;
    let emb = SpectralEmbedding::from_pairs(h, &pairs)?;
    small_set_expansion_with(h, &emb, cfg)
}

/// As [`small_set_expansion`] with a precomputed embedding.
pub fn small_set_expansion_with(h: &Hypergraph<f64>, emb: &SpectralEmbedding, cfg: &SseConfig) -> Result<SseResult> {
    let n = h.n();
    let k = emb.k;
    let size_bound = cfg.size_factor * n as f64 / k as f64;
    let sep = OrthogonalSeparator::new(&emb.unit_points(), cfg.beta, k.max(2))?;
    // (within bound, expansion, size, set, trial)
    let mut best: Option<(bool, f64, usize, Vec<usize>, usize)> = None;
    for t in 0..cfg.trials {
        let mut rng = rng_for(cfg.seed, t as u64);
        let s = sep.sample(&mut rng);
        if s.is_empty() || s.len() == n {
            continue;
        }
        let mut x = vec![0.0; n];
        for &v in &s {
            x[v] = emb.sq_norm(v);
        }
        let swept = match sweep_cut_nonneg(h, &x) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let mut candidates = pieces(h, &swept.set);
        if candidates.len() > 1 {
            candidates.push(swept.set.clone());
        }
        for c in candidates {
            let phi = h.expansion(&c)?;
            let ok = c.len() as f64 <= size_bound;
            let better = match &best {
                None => true,
                Some((bok, bphi, bsize, bset, _)) => {
                    (!ok, phi, c.len(), &c).partial_cmp(&(!*bok, *bphi, *bsize, bset))
                        == Some(std::cmp::Ordering::Less)
                }
            };
            if better {
                best = Some((ok, phi, c.len(), c, t));
            }
        }
    }
    let (within_bound, _, size, set, trial) =
        best.ok_or_else(|| HgError::Solver("no trial produced a proper set".to_string()))?;
    let cut = CutResult::evaluate(h, set, RatioType::Symmetric, Vec::new())?;
    Ok(SseResult {
        cut,
        size,
        size_bound,
        within_bound,
        trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_of_a_set() {
        let h = Hypergraph::unweighted(5, vec![vec![0, 1], vec![1, 2, 3], vec![3, 4]]).unwrap();
        assert_eq!(pieces(&h, &[0, 2, 3, 4]), vec![vec![0], vec![2, 3, 4]]);
    }

    #[test]
    fn finds_a_component() {
        let h = Hypergraph::unweighted(
            9,
            vec![vec![0, 1, 2], vec![0, 2], vec![3, 4, 5], vec![3, 5], vec![6, 7, 8], vec![6, 8]],
        )
        .unwrap();
        let r = small_set_expansion(&h, 3, &SseConfig::default()).unwrap();
        assert_eq!(r.cut.expansion, 0.0);
        assert_eq!(r.size, 3);
    }
}
