use proptest::prelude::*;

use cnotnet::analysis::{power_law_fit, BoundReport};
use cnotnet::channel::{apply_channel, attractor_projection, hs_distance, DensityMatrix};
use cnotnet::groupwalk::{
    build_walk_matrix, generate_group, graph_generators, trace_phi_power, trace_phi_power_direct,
};
use cnotnet::induced::{apply_cnot, build_induced_graph, connectivity_check, unweighted_diameter, BasisState};
use cnotnet::network::{apply_noise, make_complete, InteractionGraph, NoiseSpec};
use cnotnet::rng::rng_from_seed;
use cnotnet::spectral::{algebraic_connectivity, algebraic_connectivity_dense, DenseMatrix, LanczosConfig};
use rand::Rng;

/// Random interaction graph: a random subset of ordered pairs with random weights.
fn graph(max_qubits: usize) -> impl Strategy<Value = InteractionGraph> {
    (2..=max_qubits, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = rng_from_seed(seed);
        let mut weights = Vec::new();
        for c in 0..n {
            for t in (0..n).filter(|&t| t != c) {
                if rng.gen_bool(0.5) {
                    weights.push((c, t, rng.gen_range(0.05..1.0)));
                }
            }
        }
        if weights.is_empty() {
            weights.push((0, 1, 1.0));
        }
        InteractionGraph::from_weights(n, weights).unwrap()
    })
}

fn density(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = rng_from_seed(seed);
    let d = 1 << n;
    let rows: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let a = DenseMatrix::from_rows(&rows).unwrap();
    let gram = a.matmul(&a.transpose());
    let tr = gram.trace();
    DensityMatrix::from_vec_unchecked(n, gram.as_slice().iter().map(|x| x / tr).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn probabilities_sum_to_one(g in graph(8)) {
        let total: f64 = g.links().iter().map(|l| l.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let back = InteractionGraph::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn noise_keeps_links_and_normalization(eps in 0.0f64..1.0, seed: u64, n in 2usize..8) {
        let g = make_complete(n).unwrap();
        let noisy = apply_noise(&g, &NoiseSpec::new(eps, seed).unwrap()).unwrap();
        prop_assert_eq!(noisy.links().len(), g.links().len());
        let total: f64 = noisy.links().iter().map(|l| l.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let again = apply_noise(&g, &NoiseSpec::new(eps, seed).unwrap()).unwrap();
        prop_assert_eq!(noisy, again);
    }

    #[test]
    fn cnot_preserves_control_and_flips_target(n in 2usize..16, x: u64, c in 0usize..16, dt in 1usize..16) {
        let c = c % n;
        let t = (c + dt % (n - 1).max(1)) % n;
        prop_assume!(t != c);
        let s = BasisState(x as usize & ((1 << n) - 1));
        let y = apply_cnot(s, c, t, n).unwrap();
        prop_assert_eq!(y.is_excited(c), s.is_excited(c));
        prop_assert_eq!(y.index() ^ s.index(), if s.is_excited(c) { 1 << t } else { 0 });
        prop_assert_eq!(apply_cnot(y, c, t, n).unwrap(), s);
    }

    #[test]
    fn induced_graph_is_symmetric_and_stochastic(g in graph(7)) {
        let ig = build_induced_graph(&g).unwrap();
        for u in 0..ig.n_vertices() {
            prop_assert!((ig.row_sum(u) - 1.0).abs() < 1e-12);
            for v in ig.neighbors(u) {
                prop_assert_eq!(ig.weight(u, v), ig.weight(v, u));
            }
            // Loop weight is the probability that the control is unexcited.
            let s = ig.state_of(u);
            let idle: f64 = g.links().iter().filter(|l| !s.is_excited(l.control)).map(|l| l.probability).sum();
            prop_assert!((ig.loop_weight(u) - idle).abs() < 1e-12);
        }
    }

    #[test]
    fn lanczos_agrees_with_dense(g in graph(6)) {
        let ig = build_induced_graph(&g).unwrap();
        prop_assume!(connectivity_check(&ig).connected);
        let a = algebraic_connectivity(&ig, &LanczosConfig::default()).unwrap();
        let b = algebraic_connectivity_dense(&ig).unwrap();
        prop_assert!((a.lambda_2 - b.lambda_2).abs() < 1e-8);
        prop_assert!((a.lambda_min - b.lambda_min).abs() < 1e-8);
        prop_assert!(b.lambda_min >= -1.0 - 1e-12 && b.lambda_2 <= 1.0 + 1e-12);
        prop_assert!(a.gamma > 0.0);
    }

    #[test]
    fn channel_preserves_states_and_contracts(g in graph(4), seed: u64) {
        let n = g.n_qubits();
        let rho = density(n, seed);
        let out = apply_channel(&g, &rho).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
        prop_assert!(out.max_asymmetry() < 1e-12);
        prop_assert!(out.min_eigenvalue().unwrap() > -1e-10);
        let proj = attractor_projection(&g).unwrap();
        prop_assert!(proj.distance(&out) <= proj.distance(&rho) + 1e-12);
        // The channel is a contraction in Hilbert–Schmidt distance.
        let sigma = density(n, seed ^ 0xff);
        let after = hs_distance(&out, &apply_channel(&g, &sigma).unwrap()).unwrap();
        prop_assert!(after <= hs_distance(&rho, &sigma).unwrap() + 1e-12);
    }

    #[test]
    fn group_trace_identity(g in graph(3), k in 0usize..8) {
        let (gens, probs) = graph_generators(&g).unwrap();
        let gt = generate_group(&gens, 1000).unwrap();
        let w = build_walk_matrix(&gt, &probs).unwrap();
        prop_assert!(w.column_sums().iter().all(|s| (s - 1.0).abs() < 1e-12));
        prop_assert_eq!(w.max_asymmetry(), 0.0);
        let diff = trace_phi_power(&gt, &w, k) - trace_phi_power_direct(&g, k).unwrap();
        prop_assert!(diff.abs() < 1e-10);
    }

    #[test]
    fn noisy_complete_respects_bounds(n in 3usize..7, eps in 0.0f64..0.5, seed: u64) {
        // Mild noise keeps both lower bounds valid.
        let g = apply_noise(&make_complete(n).unwrap(), &NoiseSpec::new(eps, seed).unwrap()).unwrap();
        let ig = build_induced_graph(&g).unwrap();
        let gamma = algebraic_connectivity(&ig, &LanczosConfig::default()).unwrap().gamma;
        let report = BoundReport::new(&g, gamma, unweighted_diameter(&ig).unwrap());
        prop_assert!(report.min_weight_bound_holds == Some(true));
    }

    #[test]
    fn fit_recovers_noiseless_coefficients(a in -3.0f64..3.0, b in -3.0f64..3.0, lo in 3usize..9) {
        let pts: Vec<(usize, f64)> = (lo..lo + 9).map(|n| (n, a / n as f64 + b / (n * n) as f64)).collect();
        let f = power_law_fit(&pts, (1.0, 2.0), lo).unwrap();
        prop_assert!((f.a - a).abs() < 1e-12 && (f.b - b).abs() < 1e-12);
        prop_assert!(f.residuals.iter().all(|r| r.1.abs() < 1e-13));
    }
}
