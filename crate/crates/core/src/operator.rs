//! The hypergraph Markov operator, its support graph and the Rayleigh quotient.
//!
//! For a vector `x` on the vertices every edge `e` picks the set `S_e` of its
//! vertices where `x` is maximal and the set `R_e` where it is minimal, and
//! contributes a complete bipartite graph on `S_e x R_e` whose edges share the
//! weight `w(e)` equally. Self-loops pad every vertex to its degree. An edge on
//! which `x` is constant only contributes self-loops.
//!
//! Values closer than `eps * (max x - min x)` are treated as equal.

use serde::{Deserialize, Serialize};

use crate::{HgError, Hypergraph, Result, Scalar};

/// Default relative tie tolerance.
pub const DEFAULT_TIE_EPS: f64 = 1e-9;

/// Argmax/argmin structure of one edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeTies {
    /// All values on the edge are equal.
    Flat,
    /// `top` holds the maximizers, `bottom` the minimizers.
    Split { top: Vec<usize>, bottom: Vec<usize> },
}

/// Tie sets of every edge under a vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieSets {
    pub edges: Vec<EdgeTies>,
}

fn tolerance<T: Scalar>(x: &[T], eps: T) -> T {
    let (lo, hi) = x
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi > lo {
        eps * (hi - lo)
    } else {
        T::zero()
    }
}

fn check_input<T: Scalar>(h: &Hypergraph<T>, x: &[T], eps: T) -> Result<()> {
    if x.len() != h.n() {
        return Err(HgError::InvalidInput(format!(
            "vector has length {} but hypergraph has {} vertices",
            x.len(),
            h.n()
        )));
    }
    if !(eps >= T::zero()) {
        return Err(HgError::InvalidInput("negative tie tolerance".to_string()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(HgError::InvalidInput("non-finite entry".to_string()));
    }
    Ok(())
}

/// Computes `S_e` and `R_e` for every edge.
pub fn tie_sets<T: Scalar>(h: &Hypergraph<T>, x: &[T], eps: T) -> Result<TieSets> {
    check_input(h, x, eps)?;
    let tau = tolerance(x, eps);
    let edges = h
        .edges()
        .iter()
        .map(|e| {
            let (lo, hi) = e.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                (lo.min(x[v]), hi.max(x[v]))
            });
            if hi - lo <= tau {
                return EdgeTies::Flat;
            }
            let top: Vec<usize> = e.iter().copied().filter(|&v| x[v] >= hi - tau).collect();
            let bottom: Vec<usize> = e.iter().copied().filter(|&v| x[v] <= lo + tau).collect();
            if top.iter().any(|v| bottom.contains(v)) {
                EdgeTies::Flat
            } else {
                EdgeTies::Split { top, bottom }
            }
        })
        .collect();
    Ok(TieSets { edges })
}

/// The graph `G_X` with its bipartite edges and self-loops.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportGraph<T> {
    pub n: usize,
    /// Non-loop edges `(i, j, w)` with `i < j`; parallel entries are merged.
    pub pairs: Vec<(usize, usize, T)>,
    /// Self-loop weight per vertex.
    pub loops: Vec<T>,
}

impl<T: Scalar> SupportGraph<T> {
    /// Weighted degree of every vertex, a self-loop counted once.
    pub fn degrees(&self) -> Vec<T> {
        let mut d = self.loops.clone();
        for &(i, j, w) in &self.pairs {
            d[i] = d[i] + w;
            d[j] = d[j] + w;
        }
        d
    }

    /// `G y`.
    pub fn adjacency_apply(&self, y: &[T]) -> Vec<T> {
        let mut out: Vec<T> = self.loops.iter().zip(y).map(|(&l, &v)| l * v).collect();
        for &(i, j, w) in &self.pairs {
            out[i] = out[i] + w * y[j];
            out[j] = out[j] + w * y[i];
        }
        out
    }

    /// Walk matrix `A_X = G_X D^-1` applied to a measure.
    pub fn walk_apply(&self, degrees: &[T], mu: &[T]) -> Vec<T> {
        let y: Vec<T> = mu.iter().zip(degrees).map(|(&m, &d)| m / d).collect();
        self.adjacency_apply(&y)
    }

    /// Every triple of the graph, loops included, as `(i, j, w)`.
    pub fn all_edges(&self) -> Vec<(usize, usize, T)> {
        let mut out: Vec<(usize, usize, T)> = self
            .loops
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > T::zero())
            .map(|(v, &w)| (v, v, w))
            .collect();
        out.extend(self.pairs.iter().copied());
        out.sort_by_key(|&(i, j, _)| (i, j));
        out
    }
}

/// Builds `G_X` for the density vector `x`.
pub fn support_graph<T: Scalar>(h: &Hypergraph<T>, x: &[T], eps: T) -> Result<SupportGraph<T>> {
    let ties = tie_sets(h, x, eps)?;
    Ok(support_graph_from_ties(h, &ties))
}

/// Builds `G_X` from precomputed tie sets.
pub fn support_graph_from_ties<T: Scalar>(h: &Hypergraph<T>, ties: &TieSets) -> SupportGraph<T> {
    let mut pairs: Vec<(usize, usize, T)> = Vec::new();
    let mut used = vec![T::zero(); h.n()];
    for (idx, t) in ties.edges.iter().enumerate() {
        if let EdgeTies::Split { top, bottom } = t {
            let w = h.weight(idx) / T::of((top.len() * bottom.len()) as f64);
            for &s in top {
                for &r in bottom {
                    pairs.push((s.min(r), s.max(r), w));
                    used[s] = used[s] + w;
                    used[r] = used[r] + w;
                }
            }
        }
    }
    pairs.sort_by_key(|&(i, j, _)| (i, j));
    let mut merged: Vec<(usize, usize, T)> = Vec::with_capacity(pairs.len());
    for (i, j, w) in pairs {
        match merged.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 = last.2 + w,
            _ => merged.push((i, j, w)),
        }
    }
    let loops = h
        .degrees()
        .iter()
        .zip(&used)
        .map(|(&d, &u)| (d - u).max(T::zero()))
        .collect();
    SupportGraph {
        n: h.n(),
        pairs: merged,
        loops,
    }
}

/// `(D - G_X) x` computed edge by edge from the tie sets.
pub fn laplacian_action<T: Scalar>(h: &Hypergraph<T>, ties: &TieSets, x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); h.n()];
    for (idx, t) in ties.edges.iter().enumerate() {
        if let EdgeTies::Split { top, bottom } = t {
            let w = h.weight(idx);
            let avg = |set: &[usize]| set.iter().map(|&v| x[v]).sum::<T>() / T::of(set.len() as f64);
            let (at, ab) = (avg(top), avg(bottom));
            let wt = w / T::of(top.len() as f64);
            let wb = w / T::of(bottom.len() as f64);
            for &s in top {
                out[s] = out[s] + wt * (x[s] - ab);
            }
            for &r in bottom {
                out[r] = out[r] + wb * (x[r] - at);
            }
        }
    }
    out
}

/// `M(x) = D^-1 G_x x` on densities, with an explicit tie tolerance.
pub fn apply_markov_with<T: Scalar>(h: &Hypergraph<T>, x: &[T], eps: T) -> Result<Vec<T>> {
    let ties = tie_sets(h, x, eps)?;
    let lap = laplacian_action(h, &ties, x);
    Ok(x.iter()
        .zip(&lap)
        .zip(h.degrees())
        .map(|((&v, &l), &d)| v - l / d)
        .collect())
}

/// `M(x)` with the default tie tolerance. Constant vectors are fixed points.
pub fn apply_markov<T: Scalar>(h: &Hypergraph<T>, x: &[T]) -> Result<Vec<T>> {
    apply_markov_with(h, x, T::of(DEFAULT_TIE_EPS))
}

/// `L(x) = x - M(x)`.
pub fn apply_laplacian<T: Scalar>(h: &Hypergraph<T>, x: &[T]) -> Result<Vec<T>> {
    let ties = tie_sets(h, x, T::of(DEFAULT_TIE_EPS))?;
    let lap = laplacian_action(h, &ties, x);
    Ok(lap.iter().zip(h.degrees()).map(|(&l, &d)| l / d).collect())
}

/// Measure form `mu -> A_X mu` with `X = D^-1 mu`; preserves total mass.
pub fn apply_walk<T: Scalar>(h: &Hypergraph<T>, mu: &[T], eps: T) -> Result<Vec<T>> {
    let x: Vec<T> = mu.iter().zip(h.degrees()).map(|(&m, &d)| m / d).collect();
    let ties = tie_sets(h, &x, eps)?;
    let lap = laplacian_action(h, &ties, &x);
    Ok(mu.iter().zip(&lap).map(|(&m, &l)| m - l).collect())
}

/// Normalized form `f -> D^-1/2 G_X D^-1/2 f` with `X = D^-1/2 f`.
pub fn apply_markov_normalized<T: Scalar>(h: &Hypergraph<T>, f: &[T], eps: T) -> Result<Vec<T>> {
    let x: Vec<T> = f.iter().zip(h.degrees()).map(|(&v, &d)| v / d.sqrt()).collect();
    let ties = tie_sets(h, &x, eps)?;
    let lap = laplacian_action(h, &ties, &x);
    Ok(f.iter()
        .zip(&lap)
        .zip(h.degrees())
        .map(|((&v, &l), &d)| v - l / d.sqrt())
        .collect())
}

/// `sum_e w(e) max_{i,j in e} (x_i - x_j)^2`.
pub fn rayleigh_numerator<T: Scalar>(h: &Hypergraph<T>, x: &[T]) -> T {
    h.edges()
        .iter()
        .zip(h.weights())
        .map(|(e, &w)| {
            let (lo, hi) = e.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                (lo.min(x[v]), hi.max(x[v]))
            });
            w * (hi - lo) * (hi - lo)
        })
        .sum()
}

/// Rayleigh quotient of a density: `sum_e w(e) max (x_i - x_j)^2 / sum_i d_i x_i^2`.
pub fn rayleigh<T: Scalar>(h: &Hypergraph<T>, x: &[T]) -> Result<T> {
    check_input(h, x, T::zero())?;
    let den: T = x.iter().zip(h.degrees()).map(|(&v, &d)| d * v * v).sum();
    if den <= T::zero() {
        return Err(HgError::ZeroVector);
    }
    Ok(rayleigh_numerator(h, x) / den)
}

/// Rayleigh quotient of a normalized vector `f = D^1/2 x`.
pub fn rayleigh_normalized<T: Scalar>(h: &Hypergraph<T>, f: &[T]) -> Result<T> {
    let x = to_density(h, f);
    rayleigh(h, &x)
}

/// `D^-1/2 f`.
pub fn to_density<T: Scalar>(h: &Hypergraph<T>, f: &[T]) -> Vec<T> {
    f.iter().zip(h.degrees()).map(|(&v, &d)| v / d.sqrt()).collect()
}

/// `D^1/2 x`.
pub fn to_normalized<T: Scalar>(h: &Hypergraph<T>, x: &[T]) -> Vec<T> {
    x.iter().zip(h.degrees()).map(|(&v, &d)| v * d.sqrt()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple() -> Hypergraph<f64> {
        Hypergraph::unweighted(3, vec![vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn triple_tie_completion() {
        let h = triple();
        let g = support_graph(&h, &[2.0, -1.0, -1.0], 1e-9).unwrap();
        assert_eq!(g.pairs, vec![(0, 1, 0.5), (0, 2, 0.5)]);
        assert_eq!(g.loops, vec![0.0, 0.5, 0.5]);
        assert_eq!(g.degrees(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn constant_is_fixed() {
        let h = triple();
        let g = support_graph(&h, &[3.0; 3], 1e-9).unwrap();
        assert!(g.pairs.is_empty());
        assert_eq!(apply_markov(&h, &[3.0; 3]).unwrap(), vec![3.0; 3]);
    }

    #[test]
    fn markov_on_indicator() {
        let h = triple();
        assert_eq!(apply_markov(&h, &[1.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn laplacian_on_extreme_pair() {
        let h = triple();
        let x = [1.0, 0.0, -1.0];
        assert_eq!(apply_laplacian(&h, &x).unwrap(), vec![2.0, 0.0, -2.0]);
        assert_eq!(rayleigh(&h, &x).unwrap(), 2.0);
        assert_eq!(rayleigh(&h, &[2.0, -1.0, -1.0]).unwrap(), 1.5);
        assert_eq!(rayleigh(&h, &[0.0; 3]), Err(HgError::ZeroVector));
    }

    #[test]
    fn walk_preserves_stationary() {
        let h = Hypergraph::<f64>::unweighted(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        let pi = h.stationary_distribution();
        let out = apply_walk(&h, &pi, 1e-9).unwrap();
        for (a, b) in out.iter().zip(&pi) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_tolerance_rejected() {
        assert!(support_graph(&triple(), &[1.0, 0.0, 0.0], -1.0).is_err());
    }
}
