//! Self-check report.
//!
//! Runs the property checks behind the acceptance criteria on a named corpus
//! and collects one row per (criterion, instance). Everything is seeded, so
//! two runs with the same seed give identical reports.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::corpus::{cycle_graph, planted_clusters, random_regular_graph, small_corpus};
use crate::dispersion::{mixing_time, simulate, slow_mixing_distribution, Cadence, DispersionConfig};
use crate::linalg::{dot, sym_eigen};
use crate::partition::{
    cheeger_check, small_set_expansion, sparsest_cut_demands, sweep_bound, sweep_cut, DemandInstance,
    DemandsConfig, OrthogonalSeparator, SseConfig,
};
use crate::rng::{derive_seed, rng_for};
use crate::spectral::{eig_sequence, exact_eigs, sdp_eig_k, ExactConfig, Method, SdpConfig, SpectralConfig, SpectralEmbedding};
use crate::vertexexp::{brute_force_vertex_expansion, lambda_inf, reduce_to_hypergraph, vertex_expansion, Graph, LambdaInfConfig};
use crate::{HgError, Hypergraph, Result};

type H = Hypergraph<f64>;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub criterion: u32,
    pub check: String,
    pub instance: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub corpus: String,
    pub seed: u64,
    pub rows: Vec<CheckRow>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    /// Rows grouped by criterion: `(criterion, passed, failed)`.
    pub fn summary(&self) -> Vec<(u32, usize, usize)> {
        let mut out: Vec<(u32, usize, usize)> = Vec::new();
        for r in &self.rows {
            if out.last().is_none_or(|l| l.0 != r.criterion) {
                out.push((r.criterion, 0, 0));
            }
            let last = out.last_mut().expect("pushed above");
            if r.passed {
                last.1 += 1;
            } else {
                last.2 += 1;
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "corpus {} seed {}", self.corpus, self.seed);
        let _ = writeln!(s, "{:<4} {:<6} {:<26} {:<16} detail", "crit", "status", "check", "instance");
        for r in &self.rows {
            let status = if r.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{:<4} {:<6} {:<26} {:<16} {}", r.criterion, status, r.check, r.instance, r.detail);
        }
        for (c, p, f) in self.summary() {
            let status = if f == 0 { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "criterion {c:2}: {status} ({p} passed, {f} failed)");
        }
        s
    }
}

struct Collector {
    rows: Vec<CheckRow>,
}

impl Collector {
    fn push(&mut self, criterion: u32, check: &str, instance: &str, passed: bool, detail: String) {
        self.rows.push(CheckRow {
            criterion,
            check: check.to_string(),
            instance: instance.to_string(),
            passed,
            detail,
        });
    }

    /// Records an error as a failed row.
    fn push_result(&mut self, criterion: u32, check: &str, instance: &str, r: Result<(bool, String)>) {
        match r {
            Ok((p, d)) => self.push(criterion, check, instance, p, d),
            Err(e) => self.push(criterion, check, instance, false, format!("error: {e}")),
        }
    }
}

/// Names accepted by [`run`].
pub const CORPORA: &[&str] = &["small"];

/// Runs every check on the named corpus.
pub fn run(corpus: &str, seed: u64) -> Result<Report> {
    if !CORPORA.contains(&corpus) {
        return Err(HgError::InvalidInput(format!("unknown corpus {corpus:?}")));
    }
    let instances = small_corpus();
    let mut c = Collector { rows: Vec::new() };
    let spectral = SpectralConfig::default();
    let mut exact = Vec::new();
    for (name, h) in &instances {
        let k = 3.min(h.n());
        exact.push(eig_sequence(h, k, Method::Exact, &spectral).map_err(|e| {
            HgError::Solver(format!("exact eigenvalues failed on {name}: {e}"))
        })?);
    }

    for (name, h) in &instances {
        if h.r_max() == 2 {
            c.push_result(1, "graph spectrum", name, check_graph_spectrum(h));
        }
    }
    for ((name, h), pairs) in instances.iter().zip(&exact) {
        c.push_result(2, "cheeger sandwich", name, cheeger_check(h, pairs[1].value, None).map(|r| {
            (r.holds, format!("lambda2 {:.6} phi {:.6}", r.lambda2, r.expansion))
        }));
    }
    for ((name, h), pairs) in instances.iter().zip(&exact) {
        c.push_result(3, "sweep guarantee", name, (|| {
            let x = pairs[1].density(h);
            let cut = sweep_cut(h, &x)?;
            let bound = sweep_bound(pairs[1].value, h.r_min());
            Ok((cut.expansion <= bound + 1e-12, format!("phi {:.6} bound {:.6}", cut.expansion, bound)))
        })());
    }
    for (t, (name, h)) in instances.iter().enumerate() {
        c.push_result(4, "dispersion laws", name, check_dispersion(h, derive_seed(seed, t as u64)));
    }
    for ((name, h), pairs) in instances.iter().zip(&exact) {
        c.push_result(5, "mixing upper bound", name, check_mixing_upper(h, pairs[1].value));
    }
    for (name, h) in regular_instances() {
        c.push_result(5, "slow mixing start", &name, check_slow_start(&h));
    }
    c.push_result(5, "single edge closed form", "edge", check_single_edge());
    for ((name, h), pairs) in instances.iter().zip(&exact) {
        c.push_result(6, "diameter bound", name, (|| {
            if !h.is_connected() {
                return Ok((true, "disconnected, skipped".to_string()));
            }
            let d = h.diameter_bfs()?;
            let l2 = pairs[1].value;
            let bound = (h.n() as f64).ln() / (1.0 / (1.0 - l2)).ln();
            let ok = l2 < 1.0 && d as f64 <= bound + 1e-12;
            Ok((ok, format!("diameter {d} bound {bound:.6} lambda2 {l2:.6}")))
        })());
    }
    c.push_result(7, "single 3-edge", "triple", check_triple());
    for ((name, h), pairs) in instances.iter().zip(&exact) {
        c.push_result(8, "sdp soundness", name, check_sdp(h, pairs, seed));
    }
    for ((name, h), pairs) in instances.iter().zip(&exact) {
        c.push_result(9, "embedding identities", name, (|| {
            let emb = SpectralEmbedding::from_pairs(h, pairs)?;
            let k = pairs.len() as f64;
            let (m, p) = (emb.mass(h), emb.pair_mass(h));
            let ok = (m - k).abs() <= 1e-8 && (p - k).abs() <= 1e-8;
            Ok((ok, format!("k {k} mass {m:.10} pair mass {p:.10}")))
        })());
    }
    for (i, k) in [2usize, 3].into_iter().enumerate() {
        let name = format!("planted-{k}");
        c.push_result(10, "sse recovery", &name, check_sse(k, derive_seed(seed, 100 + i as u64)));
    }
    for m in [2usize, 3] {
        c.push_result(11, "separator contract", &format!("m={m}"), check_separator(m, derive_seed(seed, 200 + m as u64)));
    }
    for (t, (name, h)) in instances.iter().enumerate().filter(|(_, (_, h))| h.n() >= 3) {
        c.push_result(12, "demands soundness", name, check_demands(h, derive_seed(seed, 300 + t as u64)));
    }
    for (name, g) in regular_graphs() {
        c.push_result(13, "reduction sandwich", &name, check_reduction(&g));
        c.push_result(13, "factor four", &name, check_factor_four(&g));
        c.push_result(13, "vertex cheeger", &name, check_bht(&g));
    }
    c.push_result(14, "seeded rerun", "planted-2", (|| {
        let a = check_sse(2, derive_seed(seed, 100))?;
        let b = check_sse(2, derive_seed(seed, 100))?;
        Ok((a == b, "two runs agree".to_string()))
    })());

    Ok(Report {
        corpus: corpus.to_string(),
        seed,
        rows: c.rows,
    })
}

fn check_graph_spectrum(h: &H) -> Result<(bool, String)> {
    let n = h.n();
    let d = h.degrees();
    let mut m = DMatrix::<f64>::identity(n, n);
    for (e, &w) in h.edges().iter().zip(h.weights()) {
        let v = w / (d[e[0]] * d[e[1]]).sqrt();
        m[(e[0], e[1])] -= v;
        m[(e[1], e[0])] -= v;
    }
    let (want, _) = sym_eigen(m);
    let got: Vec<f64> = exact_eigs(h, &[], &ExactConfig::default())?.iter().map(|p| p.value).collect();
    if got.len() != want.len() {
        return Ok((false, format!("{} eigenvalues, expected {}", got.len(), want.len())));
    }
    let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((err <= 1e-9, format!("max deviation {err:.2e}")))
}

fn check_dispersion(h: &H, seed: u64) -> Result<(bool, String)> {
    let dt = 1e-3;
    let mut cfg = DispersionConfig::default().with_dt(dt).with_horizon(5.0);
    cfg.cadence = Cadence::Every(1);
    let mut rng = rng_for(seed, 0);
    let mut mu: Vec<f64> = (0..h.n()).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
    let s: f64 = mu.iter().sum();
    mu.iter_mut().for_each(|v| *v /= s);
    let trace = simulate(h, &mu, &cfg)?;
    let changes: Vec<i64> = trace.support_changes.iter().map(|t| (t / dt).round() as i64).collect();
    let (mut mono, mut rate, mut worst) = (0, 0, 0.0f64);
    for w in trace.samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.rayleigh > a.rayleigh + 10.0 * dt {
            mono += 1;
        }
        let step = (b.t / dt).round() as i64;
        if changes.iter().any(|&c| (c - step).abs() <= 1) {
            continue;
        }
        let (na, nb) = (a.l2_norm * a.l2_norm, b.l2_norm * b.l2_norm);
        let predicted = -2.0 * a.rayleigh * na;
        if na < 1e-20 || predicted == 0.0 {
            continue;
        }
        let rel = (((nb - na) / dt - predicted) / predicted).abs();
        worst = worst.max(rel);
        if rel > 0.05 {
            rate += 1;
        }
    }
    Ok((
        mono == 0 && rate == 0,
        format!("{mono} monotonicity violations, {rate} rate mismatches, worst rate error {worst:.2e}"),
    ))
}

fn check_mixing_upper(h: &H, lambda2: f64) -> Result<(bool, String)> {
    if lambda2 <= 1e-9 {
        return Ok((true, "disconnected, skipped".to_string()));
    }
    let delta: f64 = 0.01;
    let bound = (h.n() as f64 / delta).ln() / lambda2;
    let cfg = DispersionConfig::default().with_dt(1e-2).with_horizon(bound * 1.2);
    let mut worst: f64 = 0.0;
    for v in 0..h.n() {
        let mut mu = vec![0.0; h.n()];
        mu[v] = 1.0;
        let r = mixing_time(h, &mu, delta, &cfg, Some(lambda2))?;
        worst = worst.max(r.time.unwrap_or(f64::INFINITY));
    }
    Ok((worst <= bound, format!("slowest {worst:.4} bound {bound:.4}")))
}

fn regular_instances() -> Vec<(String, H)> {
    let mut out = Vec::new();
    for n in [5usize, 6] {
        let edges = (0..n).map(|i| vec![i, (i + 1) % n, (i + 2) % n]).collect();
        out.push((format!("triple-ring-{n}"), H::unweighted(n, edges).expect("valid ring")));
    }
    let edges = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
    out.push(("cycle-6".to_string(), H::unweighted(6, edges).expect("valid cycle")));
    out
}

fn check_slow_start(h: &H) -> Result<(bool, String)> {
    let delta: f64 = 0.01;
    let pairs = eig_sequence(h, 2, Method::Exact, &SpectralConfig::default())?;
    let l2 = pairs[1].value;
    let mu = slow_mixing_distribution(h, &pairs[1].density(h))?;
    let lb = (1.0 / delta).ln() / (16.0 * l2);
    let cfg = DispersionConfig::default().with_dt(1e-3).with_horizon(2.0 * lb + 1.0);
    let t = mixing_time(h, &mu, delta, &cfg, Some(l2))?.time;
    let ok = t.is_none_or(|t| t >= lb);
    Ok((ok, format!("time {} lower bound {lb:.4}", t.map_or("none".to_string(), |t| format!("{t:.4}")))))
}

fn check_single_edge() -> Result<(bool, String)> {
    let h = H::unweighted(2, vec![vec![0, 1]])?;
    let cfg = DispersionConfig::default().with_dt(1e-3).with_horizon(10.0);
    let delta: f64 = 0.01;
    let t = mixing_time(&h, &[1.0, 0.0], delta, &cfg, None)?
        .time
        .ok_or_else(|| HgError::Solver("single edge did not mix".to_string()))?;
    let closed = (1.0 / delta).ln() / 2.0;
    Ok((((t - closed) / closed).abs() <= 0.05, format!("time {t:.4} closed form {closed:.4}")))
}

fn check_triple() -> Result<(bool, String)> {
    let h = H::unweighted(3, vec![vec![0, 1, 2]])?;
    let all = exact_eigs(&h, &[], &ExactConfig::default())?;
    let seq = eig_sequence(&h, 2, Method::Exact, &SpectralConfig::default())?;
    let mut x = seq[1].density(&h);
    x.sort_by(f64::total_cmp);
    let shape = (x[0] - x[1]).abs() < 1e-9 && (x[2] + 2.0 * x[0]).abs() < 1e-9
        || (x[1] - x[2]).abs() < 1e-9 && (x[0] + 2.0 * x[2]).abs() < 1e-9;
    let two = all.iter().any(|p| {
        let mut y = p.density(&h);
        y.sort_by(f64::total_cmp);
        (p.value - 2.0).abs() < 1e-12 && y[1].abs() < 1e-9 && (y[0] + y[2]).abs() < 1e-9
    });
    let phi = h.brute_force_expansion()?.1;
    let l2 = seq[1].value;
    Ok((
        (l2 - 1.5).abs() < 1e-12 && shape && two && phi == 1.0,
        format!("lambda2 {l2:.6} phi {phi}"),
    ))
}

fn check_sdp(h: &H, pairs: &[crate::spectral::EigenPair], seed: u64) -> Result<(bool, String)> {
    let cfg = SdpConfig {
        trials: 50,
        seed,
        ..SdpConfig::default()
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for k in 2..=pairs.len().min(3) {
        if k >= h.n() {
            break;
        }
        let priors: Vec<Vec<f64>> = pairs[..k - 1].iter().map(|p| p.vector.clone()).collect();
        let out = sdp_eig_k(h, &priors, &cfg)?;
        let lk = pairs[k - 1].value;
        let orth = priors.iter().map(|p| dot(p, &out.pair.vector).abs()).fold(0.0, f64::max);
        let bound = if k == 2 { lk } else { k as f64 * lk };
        ok &= out.sdp_value <= bound + 1e-6 && orth <= 1e-10;
        detail.push(format!("k {k} sdp {:.6} bound {bound:.6} orth {orth:.1e}", out.sdp_value));
    }
    if detail.is_empty() {
        detail.push("too few vertices".to_string());
    }
    Ok((ok, detail.join("; ")))
}

fn check_sse(k: usize, seed: u64) -> Result<(bool, String)> {
    let h = planted_clusters(k, 5, true, seed)?;
    let cfg = SseConfig {
        seed,
        ..SseConfig::default()
    };
    let r = small_set_expansion(&h, k, &cfg)?;
    let n = h.n();
    let mut best = f64::INFINITY;
    for mask in 1u64..(1 << n) {
        if mask.count_ones() as usize > n / k {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        best = best.min(h.expansion(&set)?);
    }
    let phi = r.cut.expansion;
    let ok = (phi == 0.0 || phi <= best + 1e-12) && r.size as f64 <= 24.0 * n as f64 / k as f64;
    Ok((ok, format!("phi {phi:.6} best {best:.6} size {}", r.size)))
}

fn check_separator(m: usize, seed: u64) -> Result<(bool, String)> {
    let s = 0.5f64.sqrt();
    let points = vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![s, s, 0.0], vec![0.0, 0.0, 1.0]];
    let n = points.len();
    let beta = 0.99;
    let sep = OrthogonalSeparator::new(&points, beta, m)?;
    let samples = 20_000;
    let mut rng = rng_for(seed, 0);
    let mut single = vec![0usize; n];
    let mut both = vec![vec![0usize; n]; n];
    for _ in 0..samples {
        let s = sep.sample(&mut rng);
        for &a in &s {
            single[a] += 1;
            for &b in &s {
                both[a][b] += 1;
            }
        }
    }
    let ns = samples as f64;
    let p = 1.0 / m as f64;
    let sigma = (p * (1.0 - p) / ns).sqrt();
    let worst = single.iter().map(|&c| (c as f64 / ns - p).abs() / sigma).fold(0.0, f64::max);
    let q = p * p;
    let sigma2 = (q * (1.0 - q) / ns).sqrt();
    let mut co: f64 = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            if dot(&points[a], &points[b]) <= beta {
                co = co.max(both[a][b] as f64 / ns);
            }
        }
    }
    Ok((
        worst <= 3.0 && co <= q + 3.0 * sigma2,
        format!("inclusion within {worst:.2} sigma, max co-occurrence {co:.4}"),
    ))
}

fn check_demands(h: &H, seed: u64) -> Result<(bool, String)> {
    let n = h.n();
    let mut rng = rng_for(seed, 0);
    let mut pairs = Vec::new();
    while pairs.len() < 3 {
        let a = rand::Rng::random_range(&mut rng, 0..n);
        let b = rand::Rng::random_range(&mut rng, 0..n);
        if a != b {
            pairs.push((a, b));
        }
    }
    let inst = DemandInstance::new(h.clone(), pairs)?;
    let opt = inst.brute_force()?.1;
    let r = sparsest_cut_demands(&inst, &DemandsConfig { seed, ..DemandsConfig::default() })?;
    let ok = r.sdp_value <= opt + 1e-6 && r.sparsity >= r.sdp_value - 1e-6;
    Ok((ok, format!("sdp {:.6} optimum {opt:.6} rounded {:.6}", r.sdp_value, r.sparsity)))
}

fn regular_graphs() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in [5usize, 6] {
        out.push((format!("cycle-{n}"), cycle_graph(n).expect("valid cycle")));
    }
    let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    out.push(("k4".to_string(), Graph::unweighted(4, &k4).expect("valid K4")));
    out.push(("3-regular-8".to_string(), random_regular_graph(8, 3, 2).expect("valid graph")));
    out
}

fn check_reduction(g: &Graph) -> Result<(bool, String)> {
    let h = reduce_to_hypergraph(g)?;
    let n = g.n();
    let d = g.max_degree() as f64;
    let mut bad = 0;
    for mask in 1u64..(1 << n) - 1 {
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let phiv = vertex_expansion(g, &set)? / d;
        let phih = h.expansion(&set)?;
        if !(phih <= phiv + 1e-12 && phiv <= phih + 1e-12) {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("{bad} of {} sets violate phi_H = phi_V / d", (1u64 << n) - 2)))
}

fn check_factor_four(g: &Graph) -> Result<(bool, String)> {
    let h = reduce_to_hypergraph(g)?;
    let d = g.max_degree() as f64;
    let li = lambda_inf(g, &LambdaInfConfig::default())?;
    let l2 = eig_sequence(&h, 2, Method::Iterative, &SpectralConfig::default())?[1].value;
    let r = li.lambda_inf / d;
    Ok((
        l2 / 4.0 <= r + 1e-9 && r <= l2 + 1e-9,
        format!("lambda2(H) {l2:.6} lambda_inf/d {r:.6}"),
    ))
}

fn check_bht(g: &Graph) -> Result<(bool, String)> {
    let li = lambda_inf(g, &LambdaInfConfig::default())?.lambda_inf;
    let phi = brute_force_vertex_expansion(g)?.1;
    Ok((
        li / 2.0 <= phi + 1e-9 && phi <= (2.0 * li).sqrt() + 1e-9,
        format!("lambda_inf {li:.6} phi_V {phi:.6}"),
    ))
}
