use hgspec::dispersion::{
    mixing_time, simulate, slow_mixing_distribution, step, DispersionConfig, Projector,
};
use hgspec::operator::{apply_laplacian, apply_markov, rayleigh, support_graph};
use hgspec::partition::{
    cheeger_check, clique_expansion, multi_partition, sparsest_cut_demands, sweep_cut, sweep_cut_nonneg,
    DemandInstance, DemandsConfig, KpartConfig,
};
use hgspec::spectral::{eig_sequence, exact_eigs, iterative_eig, sdp_eig_k, trivial_vector, ExactConfig, Method, SdpConfig, SpectralConfig};
use hgspec::vertexexp::{apply_mvert, lambda_inf, reduce_to_hypergraph, vertex_expansion, Graph, LambdaInfConfig};
use hgspec::{Hypergraph, Hypergraph32};

type H = Hypergraph<f64>;

fn triple() -> H {
    H::unweighted(3, vec![vec![0, 1, 2]]).unwrap()
}

fn sorted_edges(h: &H) -> Vec<Vec<usize>> {
    h.edges()
        .iter()
        .map(|e| {
            let mut e = e.clone();
            e.sort();
            e
        })
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn expansion_values() {
    assert_eq!(triple().expansion(&[0]).unwrap(), 1.0);
    let two = H::unweighted(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    assert_eq!(two.expansion(&[0, 1]).unwrap(), 0.0);
    assert_eq!(two.brute_force_expansion().unwrap().1, 0.0);
    let chain = H::unweighted(5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
    // One crossing edge; vol {1,2,3} = 4, complement 2.
    assert_eq!(chain.expansion(&[0, 1, 2]).unwrap(), 0.5);
    assert!(chain.brute_force_expansion().unwrap().1 <= 0.5);
    assert_eq!(triple().brute_force_expansion().unwrap().1, 1.0);
}

#[test]
fn stationary_and_diameter() {
    let path = H::unweighted(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
    assert_eq!(path.stationary_distribution(), vec![0.25, 0.5, 0.25]);
    assert_eq!(triple().diameter_bfs().unwrap(), 1);
    let chain = H::unweighted(5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
    assert_eq!(chain.diameter_bfs().unwrap(), 2);
    let four = H::unweighted(5, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]]).unwrap();
    assert_eq!(four.diameter_bfs().unwrap(), 4);
}

#[test]
fn hmetis_examples() {
    let h = H::parse_hmetis("1 3\n1 2 3\n").unwrap();
    assert_eq!(h.edges(), &[vec![0, 1, 2]]);
    let w = H::parse_hmetis("2 4 1\n2.5 1 2\n1 3 4\n").unwrap();
    assert_eq!(w.weights(), &[2.5, 1.0]);
    assert_eq!(w.edges(), &[vec![0, 1], vec![2, 3]]);
}

#[test]
fn operator_on_triple() {
    let h = triple();
    let g = support_graph(&h, &[2.0, -1.0, -1.0], 0.0).unwrap();
    let mut edges = g.all_edges();
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let off: Vec<_> = edges.iter().filter(|e| e.0 != e.1).collect();
    assert_eq!(off.len(), 2);
    assert!(off.iter().all(|e| e.0 == 0 && close(e.2, 0.5, 1e-15)));
    let m = apply_markov(&h, &[1.0, 0.0, 0.0]).unwrap();
    assert!(m.iter().zip([0.0, 0.5, 0.5]).all(|(a, b)| close(*a, b, 1e-15)));
    let l = apply_laplacian(&h, &[1.0, 0.0, -1.0]).unwrap();
    assert!(l.iter().zip([2.0, 0.0, -2.0]).all(|(a, b)| close(*a, b, 1e-15)));
    assert!(close(rayleigh(&h, &[1.0, 0.0, -1.0]).unwrap(), 2.0, 1e-15));
    assert!(close(rayleigh(&h, &[2.0, -1.0, -1.0]).unwrap(), 1.5, 1e-15));
    assert_eq!(apply_markov(&h, &[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 1.0, 1.0]);
}

#[test]
fn dispersion_examples() {
    let edge = H::unweighted(2, vec![vec![0, 1]]).unwrap();
    let cfg = DispersionConfig::default().with_dt(0.1);
    let next = step(&edge, &[1.0, 0.0], &cfg).unwrap();
    assert!(close(next[0], 0.9, 1e-15) && close(next[1], 0.1, 1e-15));

    let pi = triple().stationary_distribution();
    let trace = simulate(&triple(), &pi, &cfg.clone().with_horizon(1.0)).unwrap();
    assert!(trace.samples.iter().all(|s| s.l1_dist.abs() <= 1e-15));

    let cfg = DispersionConfig::default().with_dt(1e-3).with_horizon(1.0);
    let trace = simulate(&edge, &[1.0, 0.0], &cfg).unwrap();
    for s in &trace.samples {
        assert!(close(s.l1_dist, (-2.0 * s.t).exp(), 2e-3));
    }
    let t = mixing_time(&edge, &[1.0, 0.0], 0.01, &cfg.clone().with_horizon(10.0), None).unwrap().time.unwrap();
    assert!(close(t, 100f64.ln() / 2.0, 0.05 * 100f64.ln() / 2.0));
    let t0 = mixing_time(&edge, &[0.5, 0.5], 0.01, &cfg, None).unwrap().time.unwrap();
    assert_eq!(t0, 0.0);
}

#[test]
fn projected_step_scales_eigenvector() {
    let h = triple();
    let pairs = eig_sequence(&h, 2, Method::Exact, &SpectralConfig::default()).unwrap();
    let v = &pairs[1].vector;
    let dt = 0.01;
    let cfg = DispersionConfig::default()
        .with_dt(dt)
        .with_projector(Projector::orthogonal_to(&[trivial_vector(&h)]));
    let next = step(&h, v, &cfg).unwrap();
    for (a, b) in next.iter().zip(v) {
        assert!(close(*a, (1.0 - dt * 1.5) * b, 1e-12));
    }
}

#[test]
fn slow_start_is_half_away() {
    let ring = H::unweighted(6, (0..6).map(|i| vec![i, (i + 1) % 6, (i + 2) % 6]).collect()).unwrap();
    let pairs = eig_sequence(&ring, 2, Method::Exact, &SpectralConfig::default()).unwrap();
    let x = pairs[1].density(&ring);
    let mu = slow_mixing_distribution(&ring, &x).unwrap();
    let dist: f64 = mu.iter().map(|m| (m - 1.0 / 6.0).abs()).sum();
    assert!(close(dist, 0.5, 1e-12));
    assert!(close(mu.iter().sum::<f64>(), 1.0, 1e-12));
}

#[test]
fn spectra_of_small_edges() {
    let edge = H::unweighted(2, vec![vec![0, 1]]).unwrap();
    let p = exact_eigs(&edge, &[], &ExactConfig::default()).unwrap();
    let values: Vec<f64> = p.iter().map(|p| p.value).collect();
    assert_eq!(values.len(), 2);
    assert!(close(values[0], 0.0, 1e-12) && close(values[1], 2.0, 1e-12));

    let h = triple();
    let seq = eig_sequence(&h, 2, Method::Exact, &SpectralConfig::default()).unwrap();
    assert!(close(seq[1].value, 1.5, 1e-12));
    let x = seq[1].density(&h);
    let big = x.iter().cloned().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    let others: Vec<f64> = x.iter().filter(|v| (**v - big).abs() > 1e-9).map(|v| v / big).collect();
    assert_eq!(others.len(), 2);
    assert!(others.iter().all(|r| close(*r, -0.5, 1e-9)));
    let all = exact_eigs(&h, &[], &ExactConfig::default()).unwrap();
    assert!(all.iter().any(|p| close(p.value, 2.0, 1e-9)));

    let two = H::unweighted(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    let seq = eig_sequence(&two, 2, Method::Exact, &SpectralConfig::default()).unwrap();
    assert!(seq[1].value.abs() <= 1e-12);
    let one = eig_sequence(&h, 1, Method::Exact, &SpectralConfig::default()).unwrap();
    assert_eq!(one.len(), 1);
    assert!(one[0].vector.iter().all(|v| close(*v, 1.0 / 3f64.sqrt(), 1e-12)));
}

#[test]
fn iterative_and_sdp_on_triple() {
    let h = triple();
    let v1 = trivial_vector(&h);
    let it = iterative_eig(&h, &[v1.clone()], &Default::default()).unwrap();
    assert!(close(it.value, 1.5, 1e-3));
    let sdp = sdp_eig_k(&h, &[v1], &SdpConfig::default()).unwrap();
    assert!(sdp.sdp_value <= 1.5 + 1e-6);
    assert!(sdp.pair.value <= 192.0 * 3f64.ln() * sdp.sdp_value + 1e-9);

    let two = H::unweighted(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    let s = sdp_eig_k(&two, &[trivial_vector(&two)], &SdpConfig::default()).unwrap();
    assert!(s.sdp_value.abs() <= 1e-6);
    assert!(s.pair.value.abs() <= 1e-6);
}

#[test]
fn sweep_examples() {
    let h = triple();
    let c = sweep_cut_nonneg(&h, &[1.0, 0.0, 1.0]).unwrap();
    assert_eq!(c.set, vec![0, 2]);
    assert_eq!(c.expansion, 0.5);
    let pairs = eig_sequence(&h, 2, Method::Exact, &SpectralConfig::default()).unwrap();
    let cut = sweep_cut(&h, &pairs[1].density(&h)).unwrap();
    assert_eq!(cut.expansion, 1.0);
    assert_eq!(cut.set.len(), 1);
}

#[test]
fn cheeger_examples() {
    let edge = H::unweighted(2, vec![vec![0, 1]]).unwrap();
    let r = cheeger_check(&edge, 2.0, None).unwrap();
    assert!(r.holds && r.expansion == 1.0 && r.lower == 1.0 && r.upper == 2.0);
    let r = cheeger_check(&triple(), 1.5, None).unwrap();
    assert!(r.holds && r.expansion == 1.0 && r.lower == 0.75);
    assert!(close(r.upper, 3f64.sqrt(), 1e-15));
}

#[test]
fn demands_on_path() {
    let path = H::unweighted(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
    let inst = DemandInstance::new(path, vec![(0, 2)]).unwrap();
    let r = sparsest_cut_demands(&inst, &DemandsConfig::default()).unwrap();
    assert_eq!(r.sparsity, 1.0);
    assert_eq!(r.separated, 1);
    assert!(r.sdp_value <= 1.0 + 1e-6);
    assert!(DemandInstance::new(triple(), vec![]).is_err());
}

#[test]
fn kpart_on_components() {
    let h = H::unweighted(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
    let r = multi_partition(&h, 2, &KpartConfig::default()).unwrap();
    assert!(r.partition.complete);
    assert_eq!(r.partition.max_expansion, 0.0);
    let mut sets = r.partition.sets.clone();
    sets.iter_mut().for_each(|s| s.sort());
    sets.sort();
    assert_eq!(sets, vec![vec![0, 1, 2], vec![3, 4, 5]]);
}

#[test]
fn clique_expansion_examples() {
    let g = H::unweighted(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
    let c = clique_expansion(&g).unwrap();
    assert_eq!(c.edges(), g.edges());
    assert_eq!(c.weights(), g.weights());
    let t = clique_expansion(&triple()).unwrap();
    assert_eq!(t.m(), 3);
    assert_eq!(t.degrees(), triple().degrees());
}

#[test]
fn vertex_expansion_examples() {
    let k4 = Graph::unweighted(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    assert_eq!(vertex_expansion(&k4, &[0]).unwrap(), 4.0);
    let path = Graph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
    assert_eq!(vertex_expansion(&path, &[0]).unwrap(), 2.0);
    let split = Graph::unweighted(4, &[(0, 1), (2, 3)]).unwrap();
    assert_eq!(vertex_expansion(&split, &[0, 1]).unwrap(), 0.0);

    let star = Graph::unweighted(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
    let h = reduce_to_hypergraph(&star).unwrap();
    let mut edges = sorted_edges(&h);
    edges.sort();
    assert_eq!(edges, vec![vec![0, 1], vec![0, 1, 2, 3], vec![0, 2], vec![0, 3]]);

    let c6 = Graph::unweighted(6, &(0..6).map(|i| (i, (i + 1) % 6)).collect::<Vec<_>>()).unwrap();
    let h = reduce_to_hypergraph(&c6).unwrap();
    assert_eq!(h.m(), 6);
    for v in 0..6 {
        let mut want = vec![v, (v + 1) % 6, (v + 5) % 6];
        want.sort();
        assert!(sorted_edges(&h).contains(&want));
    }

    assert_eq!(apply_mvert(&c6, &[3.0; 6], 0.0).unwrap(), vec![3.0; 6]);
    let edge = Graph::unweighted(2, &[(0, 1)]).unwrap();
    // Both endpoints see a squared gap of 4 over a centered norm of 2, while
    // the reduced hypergraph (two copies of the edge) has lambda2 = 2.
    let li = lambda_inf(&edge, &LambdaInfConfig::default()).unwrap();
    assert!(close(li.lambda_inf, 4.0, 1e-9));
    let reduced = reduce_to_hypergraph(&edge).unwrap();
    let seq = eig_sequence(&reduced, 2, Method::Exact, &SpectralConfig::default()).unwrap();
    assert!(close(seq[1].value, 2.0, 1e-9));
}

#[test]
fn single_precision_dispersion() {
    let h = Hypergraph32::unweighted(3, vec![vec![0, 1, 2]]).unwrap();
    let cfg = DispersionConfig::<f32>::default().with_dt(0.01).with_horizon(1.0);
    let trace = simulate(&h, &[1.0, 0.0, 0.0], &cfg).unwrap();
    let last = trace.samples.last().unwrap();
    assert!((last.state.iter().sum::<f32>() - 1.0).abs() <= 1e-5);
    assert!(last.l1_dist < 1.0);
}
