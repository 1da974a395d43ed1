mod common;

use common::*;
use graphlets::distances::reverse_bound;
use graphlets::generators::{bipartite_quasirandom, chung_lu, complete, complete_bipartite, matching};
use graphlets::quasirandom::{
    bipartite_epsilon_discrepancy, bipartite_epsilon_spectral, qr_epsilon_discrepancy, qr_epsilon_spectral,
    qr_trace_defect, Property,
};
use graphlets::spectral::spectrum;
use graphlets::subsets::Mode;
use graphlets::{Error, Graph};
use proptest::prelude::*;

#[test]
fn spectral_certificate_examples() {
    for n in 3..=10 {
        let c = qr_epsilon_spectral(&complete(n).unwrap()).unwrap();
        assert_eq!(c.property, Property::SpectralIv);
        assert!((c.epsilon - 1.0 / (n as f64 - 1.0)).abs() < 1e-12);
    }
    for m in 2..=6 {
        assert!(qr_epsilon_spectral(&matching(m).unwrap()).unwrap().epsilon >= 1.0 - 1e-12);
    }
}

#[test]
fn chung_lu_certificate_shrinks_with_n() {
    for seed in 1..=3 {
        let small = qr_epsilon_spectral(&chung_lu(&vec![16.0; 64], seed).unwrap())
            .unwrap()
            .epsilon;
        let large = qr_epsilon_spectral(&chung_lu(&vec![128.0; 512], seed).unwrap())
            .unwrap()
            .epsilon;
        assert!(large < small, "seed {seed}: {large} vs {small}");
    }
}

#[test]
fn discrepancy_certificate_examples() {
    let k2 = qr_epsilon_discrepancy(&complete(2).unwrap(), Mode::Exact).unwrap();
    assert!((k2.epsilon - 0.5).abs() < 1e-15 && k2.exact);
    assert!(matches!(
        qr_epsilon_discrepancy(&graphlets::generators::path(13).unwrap(), Mode::Exact),
        Err(Error::ExactModeTooLarge { size: 13, limit: 12 })
    ));
    let big = chung_lu(&vec![10.0; 60], 4).unwrap();
    let sampled = qr_epsilon_discrepancy(&big, Mode::Sampled { samples: 500, seed: 9 }).unwrap();
    assert!(!sampled.exact);
    assert!(sampled.epsilon <= qr_epsilon_spectral(&big).unwrap().epsilon + 1e-12);
}

#[test]
fn whole_vertex_set_has_zero_deviation() {
    let mut r = rng(8);
    for n in 2..9 {
        let g = random_graph(&mut r, n, 0.0..1.0);
        let all: Vec<usize> = (0..n).collect();
        let e = g.incidence(&all, &all);
        assert!((e - g.volume() * g.volume() / g.volume()).abs() < 1e-12);
    }
}

#[test]
fn trace_defect_examples() {
    let k4 = qr_trace_defect(&complete(4).unwrap(), 4).unwrap();
    assert!((k4.epsilon - 1.0 / 27.0).abs() < 1e-12);
    for (a, b) in [(2, 3), (3, 3), (1, 4)] {
        assert!((qr_trace_defect(&complete_bipartite(a, b).unwrap(), 4).unwrap().epsilon - 1.0).abs() < 1e-12);
    }
    assert!(qr_trace_defect(&complete(4).unwrap(), 0).is_err());
    assert!(qr_trace_defect(&complete(4).unwrap(), 5).is_err());
}

/// With every nontrivial `|ρ_i| ≤ δ` the defect is at most `(n−1)δ^k`.
#[test]
fn trace_defect_power_sum_bound() {
    let mut r = rng(12);
    for _ in 0..20 {
        let n = 12;
        let g = random_graph(&mut r, n, 0.3..1.0);
        let rho = spectrum(&g).unwrap().rho;
        let delta = rho[1..].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for k in [2, 4, 6] {
            let d = qr_trace_defect(&g, k).unwrap().epsilon;
            assert!(d <= (n as f64 - 1.0) * delta.powi(k as i32) + 1e-12);
        }
    }
}

#[test]
fn bipartite_examples() {
    for (a, b) in [(2, 2), (2, 5), (4, 4), (1, 3)] {
        let g = complete_bipartite(a, b).unwrap();
        let x: Vec<usize> = (0..a).collect();
        assert!(bipartite_epsilon_spectral(&g, &x, false).unwrap().epsilon < 1e-10);
        assert!((bipartite_epsilon_spectral(&g, &x, true).unwrap().epsilon - 0.5).abs() < 1e-10);
        if a + b <= 12 {
            assert!(
                bipartite_epsilon_discrepancy(&g, &x, Mode::Exact, false)
                    .unwrap()
                    .epsilon
                    < 1e-12
            );
        }
    }
    let g = complete_bipartite(2, 2).unwrap();
    assert!(matches!(
        bipartite_epsilon_spectral(&g, &[0, 0], false),
        Err(Error::InvalidPartition(_))
    ));
    assert!(matches!(
        bipartite_epsilon_spectral(&g, &[9], false),
        Err(Error::InvalidPartition(_))
    ));
}

/// Edges inside one side carry no expected mass, so S, T inside X see the
/// raw edge count as deviation.
#[test]
fn within_side_edges_are_pure_error() {
    let edges = [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)];
    let g = Graph::from_edges(4, &edges, graphlets::GraphOptions::default()).unwrap();
    let c = bipartite_epsilon_discrepancy(&g, &[0, 1], Mode::Exact, false).unwrap();
    // S = {0}, T = {1}: E = 1, expectation 0, normalizer sqrt(2·2)
    assert!(c.epsilon >= 0.5 - 1e-15);
}

#[test]
fn random_bipartite_is_nearly_exact() {
    let g = bipartite_quasirandom(&vec![60.0; 200], &vec![60.0; 200], 3).unwrap();
    let x: Vec<usize> = (0..200).collect();
    let eps = bipartite_epsilon_spectral(&g, &x, false).unwrap().epsilon;
    assert!(eps < 0.35, "{eps}");
    let rho = spectrum(&g).unwrap().rho;
    assert!((rho[0] - 1.0).abs() < 1e-9 && (rho[rho.len() - 1] + 1.0).abs() < 1e-9);
}

/// The complete graph with loops is exactly rank one. Small perturbations
/// keep both certificates small, and the spectral one stays within the
/// reverse bound of the discrepancy.
#[test]
fn reverse_direction_at_small_discrepancy() {
    let mut checked = 0;
    for n in 6..=12 {
        for delta in [0.002, 0.01, 0.03] {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i..n {
                    let w = if (i + 2 * j) % 3 == 0 { 1.0 + delta } else { 1.0 };
                    edges.push((i, j, w));
                }
            }
            let g = Graph::from_edges(n, &edges, graphlets::GraphOptions::with_loops()).unwrap();
            let d = qr_epsilon_discrepancy(&g, Mode::Exact).unwrap().epsilon;
            let s = qr_epsilon_spectral(&g).unwrap().epsilon;
            assert!(d <= s + 1e-12);
            if d < 0.02 {
                assert!(
                    s <= reverse_bound(d) + 1e-9,
                    "n={n}: spec {s} vs bound {}",
                    reverse_bound(d)
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn discrepancy_below_spectral(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.0..1.0);
        let d = qr_epsilon_discrepancy(&g, Mode::Exact).unwrap().epsilon;
        prop_assert!((d - brute_discrepancy(&adjacency(&g))).abs() <= 1e-12);
        prop_assert!(d <= qr_epsilon_spectral(&g).unwrap().epsilon + 1e-12);
    }

    #[test]
    fn bipartite_discrepancy_below_spectral(seed in any::<u64>(), n in 3usize..9) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.0..1.0);
        let x: Vec<usize> = (0..n / 2).collect();
        for literal in [false, true] {
            let d = bipartite_epsilon_discrepancy(&g, &x, Mode::Exact, literal).unwrap().epsilon;
            let s = bipartite_epsilon_spectral(&g, &x, literal).unwrap().epsilon;
            prop_assert!(d <= s + 1e-12);
        }
    }

    #[test]
    fn certificates_ignore_weight_scale(seed in any::<u64>(), n in 3usize..9, c in 0.01f64..100.0) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.0..1.0);
        let h = g.scaled(c).unwrap();
        let x = [0usize];
        let pairs = [
            (qr_epsilon_spectral(&g).unwrap().epsilon, qr_epsilon_spectral(&h).unwrap().epsilon),
            (qr_epsilon_discrepancy(&g, Mode::Exact).unwrap().epsilon, qr_epsilon_discrepancy(&h, Mode::Exact).unwrap().epsilon),
            (qr_trace_defect(&g, 4).unwrap().epsilon, qr_trace_defect(&h, 4).unwrap().epsilon),
            (bipartite_epsilon_spectral(&g, &x, false).unwrap().epsilon, bipartite_epsilon_spectral(&h, &x, false).unwrap().epsilon),
            (
                bipartite_epsilon_discrepancy(&g, &x, Mode::Exact, false).unwrap().epsilon,
                bipartite_epsilon_discrepancy(&h, &x, Mode::Exact, false).unwrap().epsilon,
            ),
        ];
        for (a, b) in pairs {
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0), "{} vs {}", a, b);
        }
    }
}
