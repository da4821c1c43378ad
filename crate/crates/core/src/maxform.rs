//! Quotients `sum_t w_t max_{(i,j) in P_t} (x_i - x_j)^2 / sum_i g_i x_i^2`.
//!
//! Both the hypergraph Laplacian (one term per edge, all pairs of the edge)
//! and the vertex expansion Laplacian (one term per vertex, pairs with its
//! neighbours) have this shape. Work happens on normalized vectors
//! `f = g^1/2 x`, where the quotient becomes `num(x) / |f|^2`.
//!
//! A configuration fixes, per term, which pairs attain the max. On the face of
//! vectors realizing a configuration the numerator is a fixed quadratic form,
//! so critical points of the quotient there are eigenvectors of a matrix.
//! Whether such a vector is an eigenvector of the nonlinear operator is decided
//! by fitting the split of each term's weight among its tied pairs.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{canonical_sign, dot, norm, null_space, sym_eigen};
use crate::rng::rng_for;
use crate::{HgError, Hypergraph, Result};

#[derive(Clone, Debug)]
pub(crate) enum TermKind {
    /// Maximum over all pairs of the listed vertices.
    Edge(Vec<usize>),
    /// Maximum over the pairs `(center, v)`, `v` in `others`.
    Star { center: usize, others: Vec<usize> },
}

#[derive(Clone, Debug)]
pub(crate) struct Term {
    pub weight: f64,
    pub kind: TermKind,
}

/// Which pairs of a term attain its maximum.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Config {
    Flat,
    /// Edge term: `top` at the maximum, `bottom` at the minimum (or reversed).
    Split { top: Vec<usize>, bottom: Vec<usize> },
    /// Star term: picked neighbours with `x_center - x_v = sign * delta`.
    Star { picks: Vec<(usize, f64)> },
}

#[derive(Clone, Debug)]
pub(crate) struct MaxForm {
    pub n: usize,
    pub terms: Vec<Term>,
    root: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct ExactOptions {
    pub tie_max: usize,
    pub budget: u128,
    pub tie_eps: f64,
    pub residual_tol: f64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            tie_max: 2,
            budget: 1_000_000,
            tie_eps: 1e-7,
            residual_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct IterOptions {
    pub dt: f64,
    pub min_dt: f64,
    pub max_steps: usize,
    pub tol: f64,
    pub window: usize,
    pub tie_eps: f64,
    pub restarts: usize,
    pub seed: u64,
    pub residual_tol: f64,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            dt: 0.5,
            min_dt: 1e-4,
            max_steps: 200_000,
            tol: 1e-12,
            window: 50,
            tie_eps: 1e-9,
            restarts: 8,
            seed: 0,
            residual_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct IterOutcome {
    pub value: f64,
    pub vector: Vec<f64>,
    pub converged: bool,
    pub residual: f64,
}

fn spread_range(x: &[f64]) -> f64 {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if hi > lo {
        hi - lo
    } else {
        0.0
    }
}

fn project_out(priors: &[Vec<f64>], v: &mut [f64]) {
    for p in priors {
        let c = dot(v, p);
        for (a, &b) in v.iter_mut().zip(p) {
            *a -= c * b;
        }
    }
}

fn project_simplex(v: &mut [f64]) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        acc += ui;
        let t = (acc - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let k = items.len();
    for mask in 1u32..(1 << k) {
        if (mask.count_ones() as usize) <= max {
            out.push((0..k).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect());
        }
    }
    out
}

impl MaxForm {
    pub fn new(n: usize, metric: Vec<f64>, terms: Vec<Term>) -> Self {
        let root = metric.iter().map(|g| g.sqrt()).collect();
        MaxForm {
            n,
            terms,
            root,
        }
    }

    pub fn from_hypergraph(h: &Hypergraph<f64>) -> Self {
        let terms = h
            .edges()
            .iter()
            .zip(h.weights())
            .map(|(e, &w)| Term {
                weight: w,
                kind: TermKind::Edge(e.clone()),
            })
            .collect();
        MaxForm::new(h.n(), h.degrees().to_vec(), terms)
    }

    /// Image of the constant vector in normalized coordinates, unit length.
    pub fn trivial(&self) -> Vec<f64> {
        let s = norm(&self.root);
        self.root.iter().map(|r| r / s).collect()
    }

    pub fn to_x(&self, f: &[f64]) -> Vec<f64> {
        f.iter().zip(&self.root).map(|(v, r)| v / r).collect()
    }

    fn spread(&self, t: &Term, x: &[f64]) -> f64 {
        match &t.kind {
            TermKind::Edge(vs) => {
                let (lo, hi) = vs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                    (l.min(x[v]), h.max(x[v]))
                });
                hi - lo
            }
            TermKind::Star { center, others } => others
                .iter()
                .map(|&v| (x[*center] - x[v]).abs())
                .fold(0.0, f64::max),
        }
    }

    pub fn numerator(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let s = self.spread(t, x);
                t.weight * s * s
            })
            .sum()
    }

    /// Quotient of a normalized vector.
    pub fn quotient(&self, f: &[f64]) -> f64 {
        let den = dot(f, f);
        if den == 0.0 {
            return 0.0;
        }
        self.numerator(&self.to_x(f)) / den
    }

    /// Tie structure of `x` with absolute tolerance `tau`.
    pub fn ties(&self, x: &[f64], tau: f64) -> Vec<Config> {
        self.terms
            .iter()
            .map(|t| match &t.kind {
                TermKind::Edge(vs) => {
                    let (lo, hi) = vs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                        (l.min(x[v]), h.max(x[v]))
                    });
                    if hi - lo <= tau {
                        return Config::Flat;
                    }
                    let top: Vec<usize> = vs.iter().copied().filter(|&v| x[v] >= hi - tau).collect();
                    let bottom: Vec<usize> = vs.iter().copied().filter(|&v| x[v] <= lo + tau).collect();
                    if top.iter().any(|v| bottom.contains(v)) {
                        Config::Flat
                    } else {
                        Config::Split { top, bottom }
                    }
                }
                TermKind::Star { center, others } => {
                    let c = *center;
                    let m = others.iter().map(|&v| (x[c] - x[v]).abs()).fold(0.0, f64::max);
                    if m <= tau {
                        return Config::Flat;
                    }
                    let picks = others
                        .iter()
                        .filter(|&&v| (x[c] - x[v]).abs() >= m - tau)
                        .map(|&v| (v, if x[c] - x[v] >= 0.0 { 1.0 } else { -1.0 }))
                        .collect();
                    Config::Star { picks }
                }
            })
            .collect()
    }

    /// `Lap x` with uniform splitting of every term's weight among its tied pairs.
    pub fn lap_apply(&self, configs: &[Config], x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (t, c) in self.terms.iter().zip(configs) {
            let w = t.weight;
            match (c, &t.kind) {
                (Config::Flat, _) => {}
                (Config::Split { top, bottom }, _) => {
                    let avg = |s: &[usize]| s.iter().map(|&v| x[v]).sum::<f64>() / s.len() as f64;
                    let (at, ab) = (avg(top), avg(bottom));
                    for &s in top {
                        out[s] += w / top.len() as f64 * (x[s] - ab);
                    }
                    for &r in bottom {
                        out[r] += w / bottom.len() as f64 * (x[r] - at);
                    }
                }
                (Config::Star { picks }, TermKind::Star { center, .. }) => {
                    let share = w / picks.len() as f64;
                    for &(v, _) in picks {
                        let d = share * (x[*center] - x[v]);
                        out[*center] += d;
                        out[v] -= d;
                    }
                }
                (Config::Star { .. }, TermKind::Edge(_)) => unreachable!("star config on edge term"),
            }
        }
        out
    }

    /// Normalized Laplacian `g^-1/2 Lap_x x` with relative tie tolerance.
    pub fn apply_normalized(&self, f: &[f64], tie_eps: f64) -> Vec<f64> {
        let x = self.to_x(f);
        let configs = self.ties(&x, tie_eps * spread_range(&x));
        let lap = self.lap_apply(&configs, &x);
        lap.iter().zip(&self.root).map(|(l, r)| l / r).collect()
    }

    fn term_configs(&self, t: &Term, tie_max: usize) -> Vec<Config> {
        match &t.kind {
            TermKind::Edge(vs) if vs.len() == 2 => vec![Config::Split {
                top: vec![vs[0]],
                bottom: vec![vs[1]],
            }],
            TermKind::Edge(vs) => {
                let mut out = vec![Config::Flat];
                for s in subsets_up_to(vs, tie_max) {
                    let rest: Vec<usize> = vs.iter().copied().filter(|v| !s.contains(v)).collect();
                    for r in subsets_up_to(&rest, tie_max) {
                        if s.iter().min() < r.iter().min() {
                            out.push(Config::Split {
                                top: s.clone(),
                                bottom: r,
                            });
                        }
                    }
                }
                out
            }
            TermKind::Star { others, .. } => {
                let mut out = vec![Config::Flat];
                for &v in others {
                    out.push(Config::Star {
                        picks: vec![(v, 1.0)],
                    });
                }
                if tie_max >= 2 {
                    for (i, &v) in others.iter().enumerate() {
                        for &u in &others[i + 1..] {
                            out.push(Config::Star {
                                picks: vec![(v, 1.0), (u, 1.0)],
                            });
                            out.push(Config::Star {
                                picks: vec![(v, 1.0), (u, -1.0)],
                            });
                        }
                    }
                }
                out
            }
        }
    }

    /// Linear equalities (on `x`) defining the face of a configuration.
    fn face_rows(&self, t: &Term, c: &Config, rows: &mut Vec<Vec<(usize, f64)>>) {
        let chain = |set: &[usize], rows: &mut Vec<Vec<(usize, f64)>>| {
            for w in set.windows(2) {
                rows.push(vec![(w[0], 1.0), (w[1], -1.0)]);
            }
        };
        match (c, &t.kind) {
            (Config::Flat, TermKind::Edge(vs)) => chain(vs, rows),
            (Config::Flat, TermKind::Star { center, others }) => {
                for &v in others {
                    rows.push(vec![(*center, 1.0), (v, -1.0)]);
                }
            }
            (Config::Split { top, bottom }, _) => {
                chain(top, rows);
                chain(bottom, rows);
            }
            (Config::Star { picks }, TermKind::Star { center, .. }) => {
                let (v0, s0) = picks[0];
                for &(v, s) in &picks[1..] {
                    // s0 (x_c - x_v0) - s (x_c - x_v) = 0
                    rows.push(vec![(*center, s0 - s), (v0, -s0), (v, s)]);
                }
            }
            (Config::Star { .. }, TermKind::Edge(_)) => unreachable!("star config on edge term"),
        }
    }

    fn compatible(&self, t: &Term, c: &Config, x: &[f64], tau: f64) -> bool {
        match (c, &t.kind) {
            (Config::Flat, _) => self.spread(t, x) <= tau,
            (Config::Split { top, bottom }, TermKind::Edge(vs)) => {
                let (lo, hi) = vs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                    (l.min(x[v]), h.max(x[v]))
                });
                let fits = |up: &[usize], down: &[usize]| {
                    up.iter().all(|&v| x[v] >= hi - tau) && down.iter().all(|&v| x[v] <= lo + tau)
                };
                fits(top, bottom) || fits(bottom, top)
            }
            (Config::Star { picks }, TermKind::Star { center, .. }) => {
                let m = self.spread(t, x);
                let c = *center;
                let all_max = picks.iter().all(|&(v, _)| (x[c] - x[v]).abs() >= m - tau);
                if !all_max || picks.len() == 1 {
                    return all_max;
                }
                let (v0, s0) = picks[0];
                let d0 = s0 * (x[c] - x[v0]);
                picks.iter().all(|&(v, s)| {
                    let d = s * (x[c] - x[v]);
                    d * d0 >= -tau * tau || d.abs() <= tau || d0.abs() <= tau
                })
            }
            _ => false,
        }
    }

    /// Dense normalized Laplacian of a configuration with uniform splitting.
    fn config_matrix(&self, configs: &[Config]) -> DMatrix<f64> {
        let mut lap = DMatrix::<f64>::zeros(self.n, self.n);
        let mut add = |i: usize, j: usize, w: f64| {
            lap[(i, i)] += w;
            lap[(j, j)] += w;
            lap[(i, j)] -= w;
            lap[(j, i)] -= w;
        };
        for (t, c) in self.terms.iter().zip(configs) {
            match (c, &t.kind) {
                (Config::Flat, _) => {}
                (Config::Split { top, bottom }, _) => {
                    let w = t.weight / (top.len() * bottom.len()) as f64;
                    for &s in top {
                        for &r in bottom {
                            add(s, r, w);
                        }
                    }
                }
                (Config::Star { picks }, TermKind::Star { center, .. }) => {
                    let w = t.weight / picks.len() as f64;
                    for &(v, _) in picks {
                        add(*center, v, w);
                    }
                }
                (Config::Star { .. }, TermKind::Edge(_)) => unreachable!("star config on edge term"),
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                lap[(i, j)] /= self.root[i] * self.root[j];
            }
        }
        lap
    }

    /// Smallest `|P (L_alpha f - lambda f)|` over splittings `alpha` of each
    /// term's weight among its tied pairs, `P` removing the prior directions.
    pub fn certificate_residual(&self, configs: &[Config], f: &[f64], lambda: f64, priors: &[Vec<f64>]) -> f64 {
        self.certificate_residual_below(configs, f, lambda, priors, f64::INFINITY)
    }

    /// As [`Self::certificate_residual`], but may return any lower bound
    /// above `cutoff` instead of the exact value.
    pub fn certificate_residual_below(
        &self,
        configs: &[Config],
        f: &[f64],
        lambda: f64,
        priors: &[Vec<f64>],
        cutoff: f64,
    ) -> f64 {
        let x = self.to_x(f);
        let mut fixed = vec![0.0; self.n];
        let mut groups: Vec<Vec<Vec<f64>>> = Vec::new();
        for (t, c) in self.terms.iter().zip(configs) {
            let w = t.weight;
            match (c, &t.kind) {
                (Config::Flat, _) => {}
                (Config::Split { top, bottom }, _) => {
                    let avg = |s: &[usize]| s.iter().map(|&v| x[v]).sum::<f64>() / s.len() as f64;
                    let delta = avg(top) - avg(bottom);
                    for (side, sign) in [(top, 1.0), (bottom, -1.0)] {
                        if side.len() == 1 {
                            fixed[side[0]] += sign * w * delta;
                        } else {
                            let cols = side
                                .iter()
                                .map(|&v| {
                                    let mut col = vec![0.0; self.n];
                                    col[v] = sign * w * delta;
                                    col
                                })
                                .collect();
                            groups.push(cols);
                        }
                    }
                }
                (Config::Star { picks }, TermKind::Star { center, .. }) => {
                    let contrib = |v: usize| {
                        let mut col = vec![0.0; self.n];
                        let d = w * (x[*center] - x[v]);
                        col[*center] += d;
                        col[v] -= d;
                        col
                    };
                    if picks.len() == 1 {
                        let col = contrib(picks[0].0);
                        for (a, b) in fixed.iter_mut().zip(col) {
                            *a += b;
                        }
                    } else {
                        groups.push(picks.iter().map(|&(v, _)| contrib(v)).collect());
                    }
                }
                (Config::Star { .. }, TermKind::Edge(_)) => unreachable!("star config on edge term"),
            }
        }
        let to_f = |v: &mut Vec<f64>| {
            for (a, r) in v.iter_mut().zip(&self.root) {
                *a /= r;
            }
            project_out(priors, v);
        };
        to_f(&mut fixed);
        let mut pf = f.to_vec();
        project_out(priors, &mut pf);
        for (a, b) in fixed.iter_mut().zip(&pf) {
            *a -= lambda * b;
        }
        for g in groups.iter_mut() {
            for col in g.iter_mut() {
                to_f(col);
            }
        }
        fit_simplex_ls(&fixed, &groups, cutoff)
    }

    fn prior_rows(&self, configs: &[Config], priors: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut sparse = Vec::new();
        for (t, c) in self.terms.iter().zip(configs) {
            self.face_rows(t, c, &mut sparse);
        }
        let mut rows: Vec<Vec<f64>> = sparse
            .into_iter()
            .map(|r| {
                let mut row = vec![0.0; self.n];
                for (i, c) in r {
                    row[i] += c / self.root[i];
                }
                row
            })
            .collect();
        rows.extend(priors.iter().cloned());
        rows
    }

    /// Critical points of the quotient on the face of `configs` inside the
    /// complement of `priors`, filtered to those realizing the configuration.
    pub fn face_candidates(&self, configs: &[Config], priors: &[Vec<f64>], opts: &ExactOptions) -> Vec<Candidate> {
        let rows = self.prior_rows(configs, priors);
        let basis = null_space(&rows, self.n);
        let q = basis.ncols();
        if q == 0 {
            return Vec::new();
        }
        let lhat = self.config_matrix(configs);
        let k = basis.transpose() * &lhat * &basis;
        let (_, vecs) = sym_eigen(k);
        let mut out = Vec::new();
        for j in 0..q {
            let y: DVector<f64> = vecs.column(j).into();
            let fv = &basis * y;
            let mut f: Vec<f64> = fv.iter().copied().collect();
            let s = norm(&f);
            if s == 0.0 {
                continue;
            }
            for v in f.iter_mut() {
                *v /= s;
            }
            let x = self.to_x(&f);
            let tau = opts.tie_eps * spread_range(&x);
            if !self
                .terms
                .iter()
                .zip(configs)
                .all(|(t, c)| self.compatible(t, c, &x, tau))
            {
                continue;
            }
            let value = self.quotient(&f);
            let residual = self.certificate_residual_below(configs, &f, value, priors, opts.residual_tol);
            if residual <= opts.residual_tol {
                canonical_sign(&mut f);
                out.push(Candidate {
                    value,
                    vector: f,
                    residual,
                });
            }
        }
        out
    }

    /// Number of configurations the exhaustive search would visit.
    pub fn config_count(&self, tie_max: usize) -> u128 {
        self.terms
            .iter()
            .map(|t| self.term_configs(t, tie_max).len() as u128)
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    /// All certified eigenpairs over the enumerated configurations, sorted by
    /// value and deduplicated.
    pub fn enumerate(&self, priors: &[Vec<f64>], opts: &ExactOptions) -> Result<Vec<Candidate>> {
        let lists: Vec<Vec<Config>> = self
            .terms
            .iter()
            .map(|t| self.term_configs(t, opts.tie_max))
            .collect();
        let total = lists
            .iter()
            .map(|l| l.len() as u128)
            .fold(1u128, |a, b| a.saturating_mul(b));
        if total > opts.budget {
            return Err(HgError::SizeGuard {
                what: "configurations",
                got: total,
                limit: opts.budget,
            });
        }
        let mut found = Vec::new();
        // The all-tied face is not enumerated; add the constant vector directly.
        let trivial = self.trivial();
        if priors.iter().all(|p| dot(p, &trivial).abs() <= 1e-12) {
            found.push(Candidate {
                value: 0.0,
                vector: trivial,
                residual: 0.0,
            });
        }
        let mut idx = vec![0usize; lists.len()];
        let mut configs: Vec<Config> = lists.iter().map(|l| l[0].clone()).collect();
        loop {
            found.extend(self.face_candidates(&configs, priors, opts));
            let mut pos = 0;
            loop {
                if pos == lists.len() {
                    return Ok(dedup(found));
                }
                idx[pos] += 1;
                if idx[pos] < lists[pos].len() {
                    configs[pos] = lists[pos][idx[pos]].clone();
                    break;
                }
                idx[pos] = 0;
                configs[pos] = lists[pos][0].clone();
                pos += 1;
            }
        }
    }

    fn random_start(&self, priors: &[Vec<f64>], seed: u64, counter: u64) -> Vec<f64> {
        let mut rng = rng_for(seed, counter);
        let mut v: Vec<f64> = (0..self.n).map(|_| StandardNormal.sample(&mut rng)).collect();
        project_out(priors, &mut v);
        project_out(priors, &mut v);
        v
    }

    /// One run of the normalized projected dispersion, shrinking the step when
    /// progress stalls.
    fn descend(&self, start: &[f64], priors: &[Vec<f64>], opts: &IterOptions) -> (Vec<f64>, f64, bool) {
        let mut w = start.to_vec();
        project_out(priors, &mut w);
        let s = norm(&w);
        if s == 0.0 {
            return (w, f64::INFINITY, false);
        }
        w.iter_mut().for_each(|v| *v /= s);
        let mut value = self.quotient(&w);
        let mut best = (w.clone(), value);
        let mut dt = opts.dt;
        let mut window_start = value;
        let mut steps = 0;
        let mut converged = false;
        while steps < opts.max_steps {
            let lw = self.apply_normalized(&w, opts.tie_eps);
            let mut next: Vec<f64> = w.iter().zip(&lw).map(|(a, b)| a - dt * b).collect();
            project_out(priors, &mut next);
            let s = norm(&next);
            if s < 1e-8 {
                // The step annihilated w: it sits in an eigenspace with value 1/dt.
                dt /= 2.0;
                steps += 1;
                continue;
            }
            next.iter_mut().for_each(|v| *v /= s);
            w = next;
            value = self.quotient(&w);
            steps += 1;
            if value < best.1 {
                best = (w.clone(), value);
            }
            if steps % opts.window == 0 {
                if window_start - best.1 <= opts.tol * best.1.max(1e-300) {
                    dt /= 4.0;
                    if dt < opts.min_dt {
                        converged = true;
                        break;
                    }
                    w = best.0.clone();
                }
                window_start = best.1;
            }
        }
        (best.0, best.1, converged)
    }

    /// Snaps an approximate minimizer onto the face suggested by its near-ties.
    fn polish(&self, w: &[f64], value: f64, priors: &[Vec<f64>], opts: &IterOptions) -> Option<Candidate> {
        let x = self.to_x(w);
        let range = spread_range(&x);
        let exact = ExactOptions {
            residual_tol: opts.residual_tol,
            ..ExactOptions::default()
        };
        let mut best: Option<Candidate> = None;
        for scale in [1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8] {
            let configs = self.ties(&x, scale * range);
            for c in self.face_candidates(&configs, priors, &exact) {
                if c.value <= value + 1e-9 * value.max(1.0)
                    && best.as_ref().is_none_or(|b| c.value < b.value)
                {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// Minimizes the quotient over the complement of `priors` from several
    /// starts, returning the best polished result.
    pub fn minimize(&self, priors: &[Vec<f64>], warm: &[Vec<f64>], opts: &IterOptions) -> IterOutcome {
        let mut starts: Vec<Vec<f64>> = warm.to_vec();
        for r in 0..opts.restarts {
            starts.push(self.random_start(priors, opts.seed, r as u64));
        }
        let mut best: Option<IterOutcome> = None;
        for s in &starts {
            let (w, value, converged) = self.descend(s, priors, opts);
            if !value.is_finite() {
                continue;
            }
            let outcome = match self.polish(&w, value, priors, opts) {
                Some(c) => IterOutcome {
                    value: c.value,
                    vector: c.vector,
                    converged,
                    residual: c.residual,
                },
                None => {
                    let x = self.to_x(&w);
                    let configs = self.ties(&x, 1e-7 * spread_range(&x));
                    let residual = self.certificate_residual(&configs, &w, value, priors);
                    let mut vector = w;
                    canonical_sign(&mut vector);
                    IterOutcome {
                        value,
                        vector,
                            converged,
                        residual,
                    }
                }
            };
            if best.as_ref().is_none_or(|b| outcome.value < b.value - 1e-13) {
                best = Some(outcome);
            }
        }
        best.unwrap_or(IterOutcome {
            value: f64::NAN,
            vector: vec![0.0; self.n],
            converged: false,
            residual: f64::INFINITY,
        })
    }
}

/// Sorts by value and drops near-duplicates.
fn dedup(mut found: Vec<Candidate>) -> Vec<Candidate> {
    found.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.vector.iter().map(|v| v.to_bits()).cmp(b.vector.iter().map(|v| v.to_bits())))
    });
    let mut out: Vec<Candidate> = Vec::new();
    for c in found {
        let dup = out
            .iter()
            .rev()
            .take_while(|o| (o.value - c.value).abs() <= 1e-8)
            .any(|o| dot(&o.vector, &c.vector).abs() > 1.0 - 1e-6);
        if !dup {
            out.push(c);
        }
    }
    out
}

/// Least squares over `alpha` with each group summing to one, letting only
/// the indices in `free[g]` be nonzero. Returns the minimizer (over all
/// columns) and its residual.
fn affine_solve(r0: &[f64], cols: &[&Vec<f64>], free: &[Vec<usize>]) -> Option<(Vec<f64>, f64)> {
    let mut fixed = r0.to_vec();
    let mut free_cols: Vec<Vec<f64>> = Vec::new();
    for set in free {
        let last = *set.last()?;
        for (fi, ci) in fixed.iter_mut().zip(cols[last].iter()) {
            *fi += ci;
        }
        for &i in &set[..set.len() - 1] {
            free_cols.push(cols[i].iter().zip(cols[last].iter()).map(|(a, b)| a - b).collect());
        }
    }
    let mut alpha = vec![0.0; cols.len()];
    if free_cols.is_empty() {
        for set in free {
            alpha[set[0]] = 1.0;
        }
        return Some((alpha, norm(&fixed)));
    }
    let n = r0.len();
    let a = DMatrix::from_fn(n, free_cols.len(), |i, j| free_cols[j][i]);
    let b = DVector::from_iterator(n, fixed.iter().map(|v| -v));
    let svd = a.clone().svd(true, true);
    let mut beta = svd.solve(&b, 1e-12).ok()?;
    let mut r = &a * &beta - &b;
    // The SVD can be loose on rank-deficient systems; refine on the normal residual.
    for _ in 0..3 {
        let step = svd.solve(&(-&r), 1e-12).ok()?;
        let next = &beta + step;
        let rn = &a * &next - &b;
        if rn.norm() >= r.norm() {
            break;
        }
        beta = next;
        r = rn;
    }
    let mut k = 0;
    for set in free {
        let mut sum = 0.0;
        for &i in &set[..set.len() - 1] {
            alpha[i] = beta[k];
            sum += beta[k];
            k += 1;
        }
        alpha[*set.last()?] = 1.0 - sum;
    }
    Some((alpha, r.norm()))
}

/// As [`affine_solve`], reporting only the residual and whether the minimizer
/// is nonnegative.
fn affine_ls(r0: &[f64], cols: &[&Vec<f64>], free: &[Vec<usize>]) -> Option<(f64, bool)> {
    let (alpha, r) = affine_solve(r0, cols, free)?;
    Some((r, alpha.iter().all(|&v| v >= -1e-12)))
}

fn residual_of(r0: &[f64], cols: &[&Vec<f64>], alpha: &[f64]) -> Vec<f64> {
    let mut r = r0.to_vec();
    for (a, c) in alpha.iter().zip(cols) {
        for (ri, ci) in r.iter_mut().zip(c.iter()) {
            *ri += a * ci;
        }
    }
    r
}

/// `min |r0 + sum_g sum_k alpha_gk c_gk|` with each `alpha_g` on the simplex.
///
/// Stops early with a lower bound once that bound exceeds `cutoff`.
fn fit_simplex_ls(r0: &[f64], groups: &[Vec<Vec<f64>>], cutoff: f64) -> f64 {
    if groups.is_empty() {
        return norm(r0);
    }
    let cols: Vec<&Vec<f64>> = groups.iter().flatten().collect();
    let spans: Vec<(usize, usize)> = groups
        .iter()
        .scan(0, |acc, g| {
            let s = *acc;
            *acc += g.len();
            Some((s, g.len()))
        })
        .collect();
    // Dropping the sign constraints gives a lower bound, and the exact answer
    // when the unconstrained minimizer happens to be feasible.
    let all: Vec<Vec<usize>> = spans.iter().map(|&(s, len)| (s..s + len).collect()).collect();
    if let Some((r, feasible)) = affine_ls(r0, &cols, &all) {
        if feasible || r > cutoff {
            return r;
        }
    }
    let project = |a: &mut [f64]| {
        for &(s, len) in &spans {
            project_simplex(&mut a[s..s + len]);
        }
    };
    // A few accelerated projected-gradient steps to guess the support.
    let lip: f64 = cols.iter().map(|c| dot(c, c)).sum();
    let mut alpha: Vec<f64> = spans
        .iter()
        .flat_map(|&(_, len)| std::iter::repeat_n(1.0 / len as f64, len))
        .collect();
    if lip > 0.0 {
        let mut y = alpha.clone();
        let mut t = 1.0f64;
        for _ in 0..300 {
            let r = residual_of(r0, &cols, &y);
            let mut next: Vec<f64> = y
                .iter()
                .zip(&cols)
                .map(|(yi, c)| yi - dot(c, &r) / lip)
                .collect();
            project(&mut next);
            let tn = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            y = next
                .iter()
                .zip(&alpha)
                .map(|(a, b)| a + (t - 1.0) / tn * (a - b))
                .collect();
            alpha = next;
            t = tn;
        }
    }
    active_set_ls(r0, &cols, &spans, alpha)
}

/// Primal active-set method for the simplex-constrained problem, started from
/// a feasible `alpha`. Each iteration solves the equality-constrained problem
/// on the current support, then either walks toward it until a weight hits
/// zero or frees the column with the most negative reduced gradient.
fn active_set_ls(r0: &[f64], cols: &[&Vec<f64>], spans: &[(usize, usize)], mut alpha: Vec<f64>) -> f64 {
    let mut free: Vec<Vec<usize>> = spans
        .iter()
        .map(|&(s, len)| {
            let mut f: Vec<usize> = (s..s + len).filter(|&i| alpha[i] > 1e-12).collect();
            if f.is_empty() {
                let top = (s..s + len).max_by(|&a, &b| alpha[a].total_cmp(&alpha[b])).unwrap_or(s);
                f.push(top);
            }
            f
        })
        .collect();
    // Renormalize onto the chosen support.
    for (set, &(s, len)) in free.iter().zip(spans) {
        let total: f64 = set.iter().map(|&i| alpha[i]).sum();
        for i in s..s + len {
            alpha[i] = if set.contains(&i) && total > 0.0 {
                alpha[i] / total
            } else {
                0.0
            };
        }
        if total <= 0.0 {
            alpha[set[0]] = 1.0;
        }
    }
    let mut best = norm(&residual_of(r0, cols, &alpha));
    for _ in 0..20 * cols.len() + 20 {
        let Some((z, _)) = affine_solve(r0, cols, &free) else {
            break;
        };
        let infeasible: Vec<usize> = free.iter().flatten().copied().filter(|&i| z[i] < -1e-14).collect();
        if infeasible.is_empty() {
            alpha = z.iter().map(|v| v.max(0.0)).collect();
            let r = residual_of(r0, cols, &alpha);
            best = best.min(norm(&r));
            let g: Vec<f64> = cols.iter().map(|c| dot(c, &r)).collect();
            let scale = 1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut entering: Option<(usize, usize, f64)> = None;
            for (k, (set, &(s, len))) in free.iter().zip(spans).enumerate() {
                let level = set.iter().map(|&i| g[i]).sum::<f64>() / set.len() as f64;
                for i in (s..s + len).filter(|i| !set.contains(i)) {
                    let reduced = g[i] - level;
                    if reduced < -1e-12 * scale && entering.is_none_or(|(_, _, r)| reduced < r) {
                        entering = Some((k, i, reduced));
                    }
                }
            }
            match entering {
                Some((k, i, _)) => free[k].push(i),
                None => break,
            }
        } else {
            let t = infeasible
                .iter()
                .map(|&i| alpha[i] / (alpha[i] - z[i]))
                .fold(1.0f64, f64::min)
                .max(0.0);
            for (a, zi) in alpha.iter_mut().zip(&z) {
                *a += t * (zi - *a);
            }
            for set in free.iter_mut() {
                if set.len() > 1 {
                    let keep = *set.iter().max_by(|&&a, &&b| alpha[a].total_cmp(&alpha[b])).unwrap();
                    set.retain(|&i| i == keep || alpha[i] > 1e-15);
                }
            }
            for (set, &(s, len)) in free.iter().zip(spans) {
                for i in s..s + len {
                    if !set.contains(&i) {
                        alpha[i] = 0.0;
                    }
                }
            }
        }
    }
    best
}
