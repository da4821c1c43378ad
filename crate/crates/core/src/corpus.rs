//! Seeded random instances.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::rng::rng_for;
use crate::vertexexp::Graph;
use crate::{HgError, Hypergraph, Result};

/// Random unweighted hypergraph on `n` vertices with `m` edges whose sizes are
/// drawn uniformly from `sizes`. Vertices left uncovered are attached to a
/// random edge, so no vertex is isolated.
pub fn random_hypergraph(n: usize, m: usize, sizes: (usize, usize), seed: u64) -> Result<Hypergraph<f64>> {
    let (lo, hi) = sizes;
    if lo < 2 || hi < lo || hi > n || m == 0 {
        return Err(HgError::InvalidInput("bad size range".to_string()));
    }
    let mut rng = rng_for(seed, 0);
    let verts: Vec<usize> = (0..n).collect();
    let mut edges: Vec<Vec<usize>> = (0..m)
        .map(|_| {
            let r = rng.random_range(lo..=hi);
            let mut e: Vec<usize> = verts.choose_multiple(&mut rng, r).copied().collect();
            e.sort_unstable();
            e
        })
        .collect();
    for v in 0..n {
        if !edges.iter().any(|e| e.contains(&v)) {
            let candidates: Vec<usize> = (0..m).filter(|&i| edges[i].len() < hi).collect();
            let i = if candidates.is_empty() {
                rng.random_range(0..m)
            } else {
                candidates[rng.random_range(0..candidates.len())]
            };
            edges[i].push(v);
            edges[i].sort_unstable();
        }
    }
    Hypergraph::unweighted(n, edges)
}

/// As [`random_hypergraph`] with weights uniform in `[0.5, 2)`.
pub fn random_weighted_hypergraph(n: usize, m: usize, sizes: (usize, usize), seed: u64) -> Result<Hypergraph<f64>> {
    let h = random_hypergraph(n, m, sizes, seed)?;
    let mut rng = rng_for(seed, 1);
    let w = (0..m).map(|_| rng.random_range(0.5..2.0)).collect();
    Hypergraph::new(n, h.edges().to_vec(), w)
}

/// Random graph as a 2-uniform hypergraph: a random spanning tree plus extra
/// random pairs, weights uniform in `[0.5, 2)` when `weighted`.
pub fn random_graph(n: usize, extra: usize, weighted: bool, seed: u64) -> Result<Hypergraph<f64>> {
    if n < 2 {
        return Err(HgError::InvalidInput("need two vertices".to_string()));
    }
    let mut rng = rng_for(seed, 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges: Vec<Vec<usize>> = (1..n)
        .map(|i| {
            let j = rng.random_range(0..i);
            let (a, b) = (order[i].min(order[j]), order[i].max(order[j]));
            vec![a, b]
        })
        .collect();
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let e = vec![a.min(b), a.max(b)];
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    let weights = edges
        .iter()
        .map(|_| if weighted { rng.random_range(0.5..2.0) } else { 1.0 })
        .collect();
    Hypergraph::new(n, edges, weights)
}

/// `k` clusters of `size` vertices, each a ring of random triples plus a
/// chord, optionally joined by one bridging edge between the first two.
pub fn planted_clusters(k: usize, size: usize, bridge: bool, seed: u64) -> Result<Hypergraph<f64>> {
    if size < 3 || k < 1 {
        return Err(HgError::InvalidInput("clusters need at least three vertices".to_string()));
    }
    let mut rng = rng_for(seed, 0);
    let mut edges = Vec::new();
    for c in 0..k {
        let base = c * size;
        for i in 0..size {
            let mut e = vec![base + i, base + (i + 1) % size];
            let extra = base + rng.random_range(0..size);
            if !e.contains(&extra) {
                e.push(extra);
            }
            e.sort_unstable();
            edges.push(e);
        }
    }
    if bridge && k >= 2 {
        edges.push(vec![rng.random_range(0..size), size + rng.random_range(0..size)]);
    }
    Hypergraph::unweighted(k * size, edges)
}

/// Random `d`-regular simple graph by the configuration model with retries.
pub fn random_regular_graph(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(HgError::InvalidInput(format!("no {d}-regular graph on {n} vertices")));
    }
    for attempt in 0..10_000u64 {
        let mut rng = rng_for(seed, attempt);
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(&mut rng);
        let mut pairs: Vec<(usize, usize)> = stubs
            .chunks(2)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
            .collect();
        if pairs.iter().any(|&(a, b)| a == b) {
            continue;
        }
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return Graph::unweighted(n, &pairs);
    }
    Err(HgError::Solver("configuration model kept producing multigraphs".to_string()))
}

/// The cycle on `n` vertices.
pub fn cycle_graph(n: usize) -> Result<Graph> {
    let e: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::unweighted(n, &e)
}

/// Small named instances used by `verify`.
pub fn small_corpus() -> Vec<(String, Hypergraph<f64>)> {
    let mut out = vec![
        ("edge".to_string(), Hypergraph::unweighted(2, vec![vec![0, 1]]).unwrap()),
        ("triple".to_string(), Hypergraph::unweighted(3, vec![vec![0, 1, 2]]).unwrap()),
        (
            "path4".to_string(),
            Hypergraph::unweighted(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap(),
        ),
        (
            "two-triples".to_string(),
            Hypergraph::unweighted(5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap(),
        ),
        (
            "fano-lines".to_string(),
            Hypergraph::unweighted(7, vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6], vec![1, 3, 5]]).unwrap(),
        ),
    ];
    for s in 0..6u64 {
        let n = 5 + (s as usize % 3);
        out.push((format!("random-{s}"), random_hypergraph(n, 4, (2, 3), 100 + s).unwrap()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_valid_and_seeded() {
        let a = random_hypergraph(8, 4, (2, 3), 5).unwrap();
        let b = random_hypergraph(8, 4, (2, 3), 5).unwrap();
        assert_eq!(a.edges(), b.edges());
        let g = random_regular_graph(8, 3, 1).unwrap();
        assert!(g.is_regular() && g.max_degree() == 3);
        let p = planted_clusters(3, 5, true, 2).unwrap();
        assert_eq!(p.n(), 15);
        assert!(random_graph(6, 3, true, 9).unwrap().is_connected());
    }
}
