//! Vertex expansion of graphs, its hypergraph reduction and the vertex
//! expansion Markov operator.
//!
//! Boundaries count vertices: for `S`, `N_in(S)` are the vertices of `S` with a
//! neighbour outside and `N_out(S)` the outside vertices with a neighbour in
//! `S`. Edge weights are carried but do not enter these counts.

use serde::Serialize;

use crate::hypergraph::BRUTE_FORCE_MAX_N;
use crate::linalg::dot;
use crate::maxform::{ExactOptions, MaxForm, Term, TermKind};
use crate::rng::DEFAULT_SEED;
use crate::spectral::{IterConfig, Method};
use crate::{HgError, Hypergraph, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph; parallel edges collapse in the neighbourhoods.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(HgError::InvalidInput(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(HgError::InvalidInput(format!("self loop at {u}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(HgError::InvalidInput(format!("edge ({u}, {v}) has weight {w}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Graph::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0)).collect())
    }

    /// Reads `u v [w]` lines with 1-based ids; `n` is the largest id seen.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n = 0;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: String| HgError::Parse { line: i + 1, msg };
            if toks.len() < 2 || toks.len() > 3 {
                return Err(err("expected `u v [w]`".to_string()));
            }
            let id = |t: &str| -> Result<usize> {
                match t.parse::<usize>() {
                    Ok(0) => Err(err("vertex ids are 1-based".to_string())),
                    Ok(v) => Ok(v - 1),
                    Err(e) => Err(err(e.to_string())),
                }
            };
            let (u, v) = (id(toks[0])?, id(toks[1])?);
            let w = match toks.get(2) {
                Some(t) => t.parse::<f64>().map_err(|e| err(e.to_string()))?,
                None => 1.0,
            };
            if u == v {
                return Err(err(format!("self loop at vertex {}", u + 1)));
            }
            n = n.max(u + 1).max(v + 1);
            edges.push((u, v, w));
        }
        Graph::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_regular(&self) -> bool {
        self.adj.windows(2).all(|w| w[0].len() == w[1].len())
    }

    fn membership(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut inside = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(HgError::InvalidCut(format!("vertex {v} out of range")));
            }
            inside[v] = true;
        }
        let k = inside.iter().filter(|&&b| b).count();
        if k == 0 || k == self.n {
            return Err(HgError::InvalidCut("set must be nonempty and proper".to_string()));
        }
        Ok(inside)
    }

    /// `(|N_in(S)|, |N_out(S)|)`.
    pub fn boundaries(&self, set: &[usize]) -> Result<(usize, usize)> {
        let inside = self.membership(set)?;
        let nin = (0..self.n)
            .filter(|&v| inside[v] && self.adj[v].iter().any(|&u| !inside[u]))
            .count();
        let nout = (0..self.n)
            .filter(|&v| !inside[v] && self.adj[v].iter().any(|&u| inside[u]))
            .count();
        Ok((nin, nout))
    }
}

/// `(|N_in(S)| + |N_out(S)|) / |S|`.
pub fn vertex_expansion(g: &Graph, set: &[usize]) -> Result<f64> {
    let (a, b) = g.boundaries(set)?;
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok((a + b) as f64 / s.len() as f64)
}

/// `|N_out(S)| / |S|`.
pub fn outer_vertex_expansion(g: &Graph, set: &[usize]) -> Result<f64> {
    let (_, b) = g.boundaries(set)?;
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(b as f64 / s.len() as f64)
}

/// Minimum over `|S| <= n/2` of a set function, by enumeration.
fn brute_force_min(g: &Graph, f: impl Fn(&[usize]) -> Result<f64>) -> Result<(Vec<usize>, f64)> {
    let n = g.n;
    if n > BRUTE_FORCE_MAX_N {
        return Err(HgError::SizeGuard {
            what: "vertices",
            got: n as u128,
            limit: BRUTE_FORCE_MAX_N as u128,
        });
    }
    if n < 2 {
        return Err(HgError::InvalidInput("graph needs two vertices".to_string()));
    }
    let mut best = (Vec::new(), f64::INFINITY);
    for mask in 1u32..(1u32 << n) - 1 {
        if 2 * mask.count_ones() as usize > n {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let phi = f(&set)?;
        if phi < best.1 {
            best = (set, phi);
        }
    }
    Ok(best)
}

/// Minimum of [`vertex_expansion`] over sets with `|S| <= n/2`.
pub fn brute_force_vertex_expansion(g: &Graph) -> Result<(Vec<usize>, f64)> {
    brute_force_min(g, |s| vertex_expansion(g, s))
}

/// Minimum of [`outer_vertex_expansion`] over sets with `|S| <= n/2`.
pub fn brute_force_outer_vertex_expansion(g: &Graph) -> Result<(Vec<usize>, f64)> {
    brute_force_min(g, |s| outer_vertex_expansion(g, s))
}

/// One unit-weight hyperedge `{v} + N(v)` per vertex `v`.
pub fn reduce_to_hypergraph(g: &Graph) -> Result<Hypergraph<f64>> {
    if let Some(v) = (0..g.n).find(|&v| g.adj[v].is_empty()) {
        return Err(HgError::InvalidInput(format!("vertex {v} is isolated")));
    }
    let edges = (0..g.n)
        .map(|v| {
            let mut e = vec![v];
            e.extend_from_slice(&g.adj[v]);
            e
        })
        .collect();
    Hypergraph::unweighted(g.n, edges)
}

fn vertex_form(g: &Graph) -> Result<MaxForm> {
    let d = g.max_degree();
    if d == 0 {
        return Err(HgError::InvalidInput("graph has no edges".to_string()));
    }
    let terms = (0..g.n)
        .filter(|&v| !g.adj[v].is_empty())
        .map(|v| Term {
            weight: 1.0,
            kind: TermKind::Star {
                center: v,
                others: g.adj[v].clone(),
            },
        })
        .collect();
    Ok(MaxForm::new(g.n, vec![d as f64; g.n], terms))
}

/// `M_vert(X)`: every vertex sends weight `1/d` along an edge to a neighbour of
/// maximal `|X_u - X_v|` (weight split evenly among ties at relative
/// tolerance `tie_eps`), with self loops bringing every degree to one.
pub fn apply_mvert(g: &Graph, x: &[f64], tie_eps: f64) -> Result<Vec<f64>> {
    if x.len() != g.n {
        return Err(HgError::InvalidInput("vector length mismatch".to_string()));
    }
    let form = vertex_form(g)?;
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let configs = form.ties(x, tie_eps * (hi - lo).max(0.0));
    let lap = form.lap_apply(&configs, x);
    let d = g.max_degree() as f64;
    Ok(x.iter().zip(lap).map(|(a, l)| a - l / d).collect())
}

/// `sum_u max_{v ~ u} (X_u - X_v)^2 / (sum X_u^2 - (sum X_u)^2 / n)`.
pub fn poincare_quotient(g: &Graph, x: &[f64]) -> Result<f64> {
    if x.len() != g.n {
        return Err(HgError::InvalidInput("vector length mismatch".to_string()));
    }
    let num: f64 = (0..g.n)
        .map(|u| {
            g.adj[u]
                .iter()
                .map(|&v| (x[u] - x[v]) * (x[u] - x[v]))
                .fold(0.0, f64::max)
        })
        .sum();
    let mean = x.iter().sum::<f64>() / g.n as f64;
    let den: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if den == 0.0 {
        return Err(HgError::ZeroVector);
    }
    Ok(num / den)
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaInf {
    /// Minimum of the Poincaré quotient.
    pub lambda_inf: f64,
    /// Second eigenvalue of `I - M_vert`, equal to `lambda_inf / d`.
    pub lambda2_mvert: f64,
    pub max_degree: usize,
    /// Minimizer, centered and of unit length.
    pub vector: Vec<f64>,
    pub method: Method,
    pub consistency_residual: f64,
}

#[derive(Clone, Debug)]
pub struct LambdaInfConfig {
    pub method: Method,
    pub iter: IterConfig,
    pub tie_max: usize,
    pub budget: u128,
}

impl Default for LambdaInfConfig {
    fn default() -> Self {
        LambdaInfConfig {
            method: Method::Iterative,
            iter: IterConfig {
                seed: DEFAULT_SEED,
                dt: 0.25,
                restarts: 12,
                ..IterConfig::default()
            },
            tie_max: 2,
            budget: 1_000_000,
        }
    }
}

/// Minimizes the Poincaré quotient over vectors orthogonal to the constants.
pub fn lambda_inf(g: &Graph, cfg: &LambdaInfConfig) -> Result<LambdaInf> {
    if g.n < 2 {
        return Err(HgError::InvalidInput("graph needs two vertices".to_string()));
    }
    let form = vertex_form(g)?;
    let d = g.max_degree();
    let ones = vec![1.0 / (g.n as f64).sqrt(); g.n];
    let priors = vec![ones];
    let (value, vector, residual) = match cfg.method {
        Method::Exact => {
            let opts = ExactOptions {
                tie_max: cfg.tie_max,
                budget: cfg.budget,
                ..ExactOptions::default()
            };
            let best = form
                .enumerate(&priors, &opts)?
                .into_iter()
                .next()
                .ok_or_else(|| HgError::Solver("no consistent configuration found".to_string()))?;
            (best.value, best.vector, best.residual)
        }
        Method::Iterative => {
            let out = form.minimize(&priors, &[], &cfg.iter.options());
            (out.value, out.vector, out.residual)
        }
        Method::Sdp => return Err(HgError::Unsupported("SDP method for lambda_inf".to_string())),
    };
    debug_assert!(dot(&vector, &priors[0]).abs() < 1e-8);
    Ok(LambdaInf {
        lambda_inf: value * d as f64,
        lambda2_mvert: value,
        max_degree: d,
        vector,
        method: cfg.method,
        consistency_residual: residual,
    })
}
