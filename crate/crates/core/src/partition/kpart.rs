use serde::Serialize;

use super::separator::OrthogonalSeparator;
use super::sweep::sweep_cut_nonneg;
use crate::cut::PartitionResult;
use crate::rng::{rng_for, DEFAULT_SEED};
use crate::spectral::{eig_sequence, EigenPair, Method, SpectralConfig, SpectralEmbedding};
use crate::{HgError, Hypergraph, Result};

#[derive(Clone, Debug)]
pub struct KpartConfig {
    pub seed: u64,
    pub beta: f64,
    /// Number of sampling rounds is `rounds_factor * k`.
    pub rounds_factor: usize,
    /// Accepted sets have expansion at most `budget_factor * sqrt(lambda_k)`.
    pub budget_factor: f64,
    /// Accepted sets have `sum_{i in S} |u_i|^2` at most this.
    pub mass_cap: f64,
    pub method: Method,
    pub spectral: SpectralConfig,
}

impl Default for KpartConfig {
    fn default() -> Self {
        KpartConfig {
            seed: DEFAULT_SEED,
            beta: 0.99,
            rounds_factor: 100,
            budget_factor: 10.0,
            mass_cap: 3.0,
            method: Method::Iterative,
            spectral: SpectralConfig::default(),
        }
    }
}

impl KpartConfig {
    /// The constants of the original analysis: `10^5 k` rounds and budget
    /// `10^5 sqrt(lambda_k)`.
    pub fn paper_constants(self) -> Self {
        KpartConfig {
            rounds_factor: 100_000,
            budget_factor: 1e5,
            ..self
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KpartResult {
    pub partition: PartitionResult<f64>,
    /// `lambda_k` estimate the budget was derived from.
    pub lambda_k: f64,
    pub budget: f64,
    pub rounds: usize,
}

/// Peels up to `k` disjoint sets of small expansion.
pub fn multi_partition(h: &Hypergraph<f64>, k: usize, cfg: &KpartConfig) -> Result<KpartResult> {
    if k < 2 || k > h.n() {
        return Err(HgError::InvalidInput(format!("k = {k} must satisfy 2 <= k <= n")));
    }
    let pairs = eig_sequence(h, k, cfg.method, &cfg.spectral)?;
    multi_partition_with(h, &pairs, cfg)
}

/// As [`multi_partition`] from precomputed eigenpairs `v_1..v_k`.
pub fn multi_partition_with(h: &Hypergraph<f64>, pairs: &[EigenPair], cfg: &KpartConfig) -> Result<KpartResult> {
    let n = h.n();
    let k = pairs.len();
    let emb = SpectralEmbedding::from_pairs(h, pairs)?;
    let lambda_k = pairs.last().map_or(0.0, |p| p.value.max(0.0));
    let budget = cfg.budget_factor * lambda_k.sqrt();
    let sep = OrthogonalSeparator::new(&emb.unit_points(), cfg.beta, k.max(2))?;
    let mut alive = vec![true; n];
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let rounds = cfg.rounds_factor * k;
    let mut used = 0;
    for t in 0..rounds {
        if sets.len() >= k || !alive.iter().any(|&a| a) {
            break;
        }
        used = t + 1;
        let mut rng = rng_for(cfg.seed, t as u64);
        let s = sep.sample(&mut rng);
        let mut x = vec![0.0; n];
        for &v in s.iter().filter(|&&v| alive[v]) {
            x[v] = emb.sq_norm(v);
        }
        if x.iter().all(|&v| v == 0.0) {
            continue;
        }
        let swept = match sweep_cut_nonneg(h, &x) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let mass: f64 = swept.set.iter().map(|&v| emb.sq_norm(v)).sum();
        let phi = h.expansion(&swept.set)?;
        if mass <= cfg.mass_cap && phi <= budget + 1e-12 {
            for &v in &swept.set {
                alive[v] = false;
            }
            sets.push(swept.set);
        }
    }
    Ok(KpartResult {
        partition: PartitionResult::new(h, sets, k)?,
        lambda_k,
        budget,
        rounds: used,
    })
}
