//! Graph baseline: replace every hyperedge by a clique (or a sparse circulant
//! for large edges) and round the graph's second eigenvector.

use std::collections::BTreeMap;

use serde::Serialize;

use super::sweep::sweep_cut;
use crate::cut::CutResult;
use crate::linalg::{column, sym_eigen};
use crate::{Hypergraph, Result};

/// Edges up to this size become cliques.
pub const CLIQUE_MAX_RANK: usize = 16;
/// Neighbours per vertex in the circulant used for larger edges.
pub const CIRCULANT_DEGREE: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct BaselineResult {
    /// The replacement graph as a 2-uniform hypergraph.
    #[serde(skip)]
    pub graph: Hypergraph<f64>,
    pub cut: CutResult<f64>,
    /// Expansion of the returned set in the hypergraph.
    pub hypergraph_expansion: f64,
    pub graph_expansion: f64,
}

/// Graph with the same vertex degrees as `h`.
///
/// An edge `e` of size `r <= 16` becomes a clique with weight `w / (r - 1)` per
/// pair; larger edges become a circulant in which each vertex is joined to its
/// `CIRCULANT_DEGREE` nearest positions, each pair with weight `w / 8`.
pub fn clique_expansion(h: &Hypergraph<f64>) -> Result<Hypergraph<f64>> {
    let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut add = |a: usize, b: usize, w: f64| {
        let key = if a < b { (a, b) } else { (b, a) };
        *pairs.entry(key).or_insert(0.0) += w;
    };
    for (e, &w) in h.edges().iter().zip(h.weights()) {
        let r = e.len();
        if r <= CLIQUE_MAX_RANK {
            let pw = w / (r - 1) as f64;
            for (i, &a) in e.iter().enumerate() {
                for &b in &e[i + 1..] {
                    add(a, b, pw);
                }
            }
        } else {
            let half = CIRCULANT_DEGREE / 2;
            let pw = w / CIRCULANT_DEGREE as f64;
            for i in 0..r {
                for s in 1..=half {
                    add(e[i], e[(i + s) % r], pw);
                }
            }
        }
    }
    let (edges, weights): (Vec<Vec<usize>>, Vec<f64>) =
        pairs.into_iter().map(|((a, b), w)| (vec![a, b], w)).unzip();
    Hypergraph::new(h.n(), edges, weights)
}

/// Spectral sweep on the clique expansion.
pub fn clique_expansion_baseline(h: &Hypergraph<f64>) -> Result<BaselineResult> {
    let g = clique_expansion(h)?;
    let n = g.n();
    let root: Vec<f64> = g.degrees().iter().map(|d| d.sqrt()).collect();
    let mut m = nalgebra::DMatrix::<f64>::identity(n, n);
    for (e, &w) in g.edges().iter().zip(g.weights()) {
        let (a, b) = (e[0], e[1]);
        let v = w / (root[a] * root[b]);
        m[(a, b)] -= v;
        m[(b, a)] -= v;
    }
    let (_, vectors) = sym_eigen(m);
    let f = column(&vectors, 1);
    let x: Vec<f64> = f.iter().zip(&root).map(|(v, r)| v / r).collect();
    let cut = sweep_cut(&g, &x)?;
    let hypergraph_expansion = h.expansion(&cut.set)?;
    let graph_expansion = cut.expansion;
    Ok(BaselineResult {
        graph: g,
        cut,
        hypergraph_expansion,
        graph_expansion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_is_unchanged() {
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]], vec![1.0, 2.0]).unwrap();
        let g = clique_expansion(&h).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert_eq!(g.weights(), h.weights());
    }

    #[test]
    fn triple_becomes_triangle() {
        let h = Hypergraph::unweighted(3, vec![vec![0, 1, 2]]).unwrap();
        let r = clique_expansion_baseline(&h).unwrap();
        assert_eq!(r.graph.m(), 3);
        assert_eq!(r.graph.degrees(), h.degrees());
        assert!(r.hypergraph_expansion <= r.graph_expansion + 1e-12);
    }
}
