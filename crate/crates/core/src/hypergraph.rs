//! The weighted hypergraph `H = (V, E, w)` and its combinatorial quantities.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{HgError, Result, Scalar};

/// A real vector indexed by vertices.
pub type VertexVector<T> = Vec<T>;

/// Largest vertex count accepted by [`Hypergraph::brute_force_expansion`].
pub const BRUTE_FORCE_MAX_N: usize = 22;

/// Immutable weighted hypergraph on vertices `0..n`.
///
/// Every edge has at least two distinct vertices and a strictly positive
/// weight, and every vertex lies in at least one edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypergraph<T> {
    n: usize,
    edges: Vec<Vec<usize>>,
    weights: Vec<T>,
    degrees: Vec<T>,
    #[serde(skip)]
    incidence: Vec<Vec<usize>>,
}

impl<T: Scalar> Hypergraph<T> {
    pub fn new(n: usize, edges: Vec<Vec<usize>>, weights: Vec<T>) -> Result<Self> {
        if edges.len() != weights.len() {
            return Err(HgError::InvalidHypergraph(format!(
                "{} edges but {} weights",
                edges.len(),
                weights.len()
            )));
        }
        let mut seen = vec![usize::MAX; n];
        for (idx, e) in edges.iter().enumerate() {
            if e.len() < 2 {
                return Err(HgError::InvalidHypergraph(format!(
                    "edge {idx} has fewer than two vertices"
                )));
            }
            for &v in e {
                if v >= n {
                    return Err(HgError::InvalidHypergraph(format!(
                        "edge {idx} references vertex {v} outside 0..{n}"
                    )));
                }
                if seen[v] == idx {
                    return Err(HgError::InvalidHypergraph(format!(
                        "edge {idx} repeats vertex {v}"
                    )));
                }
                seen[v] = idx;
            }
        }
        for (idx, w) in weights.iter().enumerate() {
            if !(w.is_finite() && *w > T::zero()) {
                return Err(HgError::InvalidHypergraph(format!(
                    "edge {idx} has nonpositive weight {w}"
                )));
            }
        }
        let mut degrees = vec![T::zero(); n];
        let mut incidence = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            for &v in e {
                degrees[v] = degrees[v] + weights[idx];
                incidence[v].push(idx);
            }
        }
        if let Some(v) = incidence.iter().position(|inc| inc.is_empty()) {
            return Err(HgError::InvalidHypergraph(format!("vertex {v} is isolated")));
        }
        Ok(Hypergraph {
            n,
            edges,
            weights,
            degrees,
            incidence,
        })
    }

    /// Hypergraph with all weights equal to one.
    pub fn unweighted(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let m = edges.len();
        Self::new(n, edges, vec![T::one(); m])
    }

    /// Rebuilds derived data after deserialization.
    pub fn rebuild(self) -> Result<Self> {
        Self::new(self.n, self.edges, self.weights)
    }

    /// Converts weights to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Hypergraph<U> {
        let weights = self.weights.iter().map(|w| U::of(w.f64())).collect();
        Hypergraph::new(self.n, self.edges.clone(), weights).expect("valid after cast")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, e: usize) -> T {
        self.weights[e]
    }

    pub fn degrees(&self) -> &[T] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> T {
        self.degrees[v]
    }

    /// Edges containing `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn volume(&self) -> T {
        self.degrees.iter().copied().sum()
    }

    pub fn volume_of(&self, set: &[usize]) -> T {
        set.iter().map(|&v| self.degrees[v]).sum()
    }

    pub fn r_min(&self) -> usize {
        self.edges.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn r_max(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> T {
        self.degrees.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_degree(&self) -> T {
        self.degrees.iter().copied().fold(T::zero(), T::max)
    }

    /// All degrees equal up to a relative tolerance.
    pub fn is_regular(&self, rel_tol: T) -> bool {
        let lo = self.min_degree();
        let hi = self.max_degree();
        hi - lo <= rel_tol * hi
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = vec![start];
            label[start] = id;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &e in &self.incidence[u] {
                    for &v in &self.edges[e] {
                        if label[v] == usize::MAX {
                            label[v] = id;
                            comp.push(v);
                        }
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
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
            return Err(HgError::InvalidCut(
                "set must be nonempty and proper".to_string(),
            ));
        }
        Ok(inside)
    }

    /// Total weight of edges with vertices on both sides.
    pub fn cut_weight(&self, inside: &[bool]) -> T {
        self.edges
            .iter()
            .zip(&self.weights)
            .filter(|(e, _)| {
                let a = e.iter().filter(|&&v| inside[v]).count();
                a > 0 && a < e.len()
            })
            .fold(T::zero(), |acc, (_, &w)| acc + w)
    }

    /// `w(E(S, V\S)) / min(vol S, vol V\S)`.
    pub fn expansion(&self, set: &[usize]) -> Result<T> {
        let inside = self.membership(set)?;
        let cut = self.cut_weight(&inside);
        let vs: T = (0..self.n)
            .filter(|&v| inside[v])
            .map(|v| self.degrees[v])
            .sum();
        let rest = self.volume() - vs;
        Ok(cut / vs.min(rest))
    }

    /// `w(E(S, V\S)) / vol S`.
    pub fn one_sided_expansion(&self, set: &[usize]) -> Result<T> {
        let inside = self.membership(set)?;
        let cut = self.cut_weight(&inside);
        Ok(cut / self.volume_of(set))
    }

    /// Exact minimizer of the expansion over all proper subsets.
    ///
    /// The returned side is the one of smaller volume.
    pub fn brute_force_expansion(&self) -> Result<(Vec<usize>, T)> {
        if self.n > BRUTE_FORCE_MAX_N {
            return Err(HgError::SizeGuard {
                what: "vertices",
                got: self.n as u128,
                limit: BRUTE_FORCE_MAX_N as u128,
            });
        }
        let n = self.n;
        let masks: Vec<u32> = self
            .edges
            .iter()
            .map(|e| e.iter().fold(0u32, |acc, &v| acc | (1 << v)))
            .collect();
        let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
        let total = self.volume();
        let mut best = (0u32, T::infinity());
        for s in 1..(1u32 << (n - 1)) {
            let mut cut = T::zero();
            for (em, &w) in masks.iter().zip(&self.weights) {
                if em & s != 0 && em & !s & full != 0 {
                    cut = cut + w;
                }
            }
            let mut vs = T::zero();
            let mut bits = s;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                vs = vs + self.degrees[v];
                bits &= bits - 1;
            }
            let phi = cut / vs.min(total - vs);
            if phi < best.1 {
                let side = if vs + vs <= total { s } else { full & !s };
                best = (side, phi);
            }
        }
        let set = (0..n).filter(|&v| best.0 >> v & 1 == 1).collect();
        Ok((set, best.1))
    }

    /// Stationary distribution `d_v / vol(V)`.
    pub fn stationary_distribution(&self) -> VertexVector<T> {
        let vol = self.volume();
        self.degrees.iter().map(|&d| d / vol).collect()
    }

    /// Vertex adjacency of the clique expansion (sorted, without self).
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (u, list) in adj.iter_mut().enumerate() {
            for &e in &self.incidence[u] {
                list.extend(self.edges[e].iter().copied().filter(|&v| v != u));
            }
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Largest number of hyperedges needed to connect two vertices.
    pub fn diameter_bfs(&self) -> Result<usize> {
        let adj = self.neighbors();
        let mut diameter = 0;
        for s in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            for &d in &dist {
                if d == usize::MAX {
                    return Err(HgError::Disconnected);
                }
                diameter = diameter.max(d);
            }
        }
        Ok(diameter)
    }

    /// Parses the hMETIS `.hgr` format.
    ///
    /// Header `m n [fmt]`; `fmt = 1` prefixes each edge line with its weight.
    /// Vertex ids are 1-based. Lines starting with `%` are comments.
    pub fn parse_hmetis(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
        let (hline, header) = lines.next().ok_or(HgError::Parse {
            line: 0,
            msg: "missing header".to_string(),
        })?;
        let hfields: Vec<&str> = header.split_whitespace().collect();
        if hfields.len() < 2 || hfields.len() > 3 {
            return Err(HgError::Parse {
                line: hline,
                msg: "header must be `m n [fmt]`".to_string(),
            });
        }
        let parse_count = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| HgError::Parse {
                line: hline,
                msg: format!("bad {what} `{s}`"),
            })
        };
        let m = parse_count(hfields[0], "edge count")?;
        let n = parse_count(hfields[1], "vertex count")?;
        let weighted = match hfields.get(2).copied() {
            None | Some("0") => false,
            Some("1") => true,
            Some(other) => {
                return Err(HgError::Parse {
                    line: hline,
                    msg: format!("unsupported fmt `{other}` (vertex weights are not supported)"),
                })
            }
        };
        let mut edges = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for (line, body) in lines {
            if edges.len() == m {
                return Err(HgError::Parse {
                    line,
                    msg: format!("more than {m} edge lines"),
                });
            }
            let mut fields = body.split_whitespace();
            let w = if weighted {
                let tok = fields.next().unwrap_or("");
                let w: f64 = tok.parse().map_err(|_| HgError::Parse {
                    line,
                    msg: format!("bad weight `{tok}`"),
                })?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(HgError::Parse {
                        line,
                        msg: format!("nonpositive weight {w}"),
                    });
                }
                w
            } else {
                1.0
            };
            let mut e = Vec::new();
            for tok in fields {
                let id: usize = tok.parse().map_err(|_| HgError::Parse {
                    line,
                    msg: format!("bad vertex id `{tok}`"),
                })?;
                if id == 0 || id > n {
                    return Err(HgError::Parse {
                        line,
                        msg: format!("vertex id {id} outside 1..={n}"),
                    });
                }
                if e.contains(&(id - 1)) {
                    return Err(HgError::Parse {
                        line,
                        msg: format!("vertex id {id} repeated"),
                    });
                }
                e.push(id - 1);
            }
            if e.len() < 2 {
                return Err(HgError::Parse {
                    line,
                    msg: "singleton or empty edge".to_string(),
                });
            }
            edges.push(e);
            weights.push(T::of(w));
        }
        if edges.len() != m {
            return Err(HgError::Parse {
                line: text.lines().count(),
                msg: format!("expected {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, edges, weights).map_err(|err| HgError::Parse {
            line: hline,
            msg: err.to_string(),
        })
    }

    /// Writes the hMETIS format; weights are emitted only when some differ from one.
    pub fn to_hmetis(&self) -> String {
        let weighted = self.weights.iter().any(|&w| w != T::one());
        let mut out = String::new();
        if weighted {
            let _ = writeln!(out, "{} {} 1", self.m(), self.n);
        } else {
            let _ = writeln!(out, "{} {}", self.m(), self.n);
        }
        for (e, w) in self.edges.iter().zip(&self.weights) {
            if weighted {
                let _ = write!(out, "{w} ");
            }
            let ids: Vec<String> = e.iter().map(|v| (v + 1).to_string()).collect();
            let _ = writeln!(out, "{}", ids.join(" "));
        }
        out
    }
}
