#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use graphlets::decomp::{
    exact_model_graph, model_matrix, rank2_decompose, rank2_decompose_with_vector, rank2_eta_xi, rank_k_eigs,
    rank_k_residual, split_measures, split_subset_deviation, union_spectrum_check, DecomposeOptions, DegreeSplit,
    RankKSplit,
};
use graphlets::generators::{chung_lu, complete, complete_bipartite, matching, union_quasirandom};
use graphlets::spectral::spectrum;
use graphlets::{Error, Graph, GraphOptions};
use proptest::prelude::*;
use rand::Rng;

/// `Σ_j d_j d_jᵀ / vol_j` normalized by the summed degrees, built from the
/// parts alone.
fn oracle_model(parts: &[Vec<f64>]) -> Dense {
    let n = parts[0].len();
    let d: Vec<f64> = (0..n).map(|v| parts.iter().map(|p| p[v]).sum()).collect();
    let mut x = vec![vec![0.0; n]; n];
    for p in parts {
        let vol: f64 = p.iter().sum();
        for i in 0..n {
            for j in 0..n {
                x[i][j] += p[i] * p[j] / vol / (d[i] * d[j]).sqrt();
            }
        }
    }
    x
}

fn fixture() -> (Graph, Vec<Vec<f64>>) {
    let parts = vec![vec![2.0, 1.0, 0.0], vec![0.0, 1.0, 2.0]];
    (exact_model_graph(&parts).unwrap(), parts)
}

fn random_parts(r: &mut rand_chacha::ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if r.random::<f64>() < 0.2 {
                        0.0
                    } else {
                        r.random_range(0.1..3.0)
                    }
                })
                .collect()
        })
        .map(|mut p: Vec<f64>| {
            if p.iter().all(|x| *x == 0.0) {
                p[0] = 1.0;
            }
            p
        })
        .collect()
}

fn ensure_cover(parts: &mut [Vec<f64>]) {
    let n = parts[0].len();
    for v in 0..n {
        if parts.iter().all(|p| p[v] == 0.0) {
            parts[0][v] = 0.5;
        }
    }
}

#[test]
fn eta_examples() {
    let (g, parts) = fixture();
    let split = DegreeSplit::new(&g, parts[0].clone()).unwrap();
    let (eta, xi) = rank2_eta_xi(&g, &split).unwrap();
    assert!((eta - 2.0 / 3.0).abs() < 1e-14);
    let oracle = jacobi_eigen(&oracle_model(&parts)).0;
    assert!((oracle[1] - 2.0 / 3.0).abs() < 1e-12);
    // ξ ⟂ sqrt(d) and is an eigenvector of the model
    let sd: Vec<f64> = g.degrees().iter().map(|d| d.sqrt()).collect();
    assert!(xi.iter().zip(&sd).map(|(a, b)| a * b).sum::<f64>().abs() < 1e-12);
    let x = model_matrix(&g, &split.to_rank_k()).unwrap();
    let xv = &x * nalgebra::DVector::from_column_slice(&xi);
    for i in 0..3 {
        assert!((xv[i] - eta * xi[i]).abs() < 1e-12);
    }

    let k4 = complete(4).unwrap();
    let half: Vec<f64> = k4.degrees().iter().map(|d| 0.3 * d).collect();
    assert!(
        rank2_eta_xi(&k4, &DegreeSplit::new(&k4, half).unwrap())
            .unwrap()
            .0
            .abs()
            < 1e-14
    );
    assert!(matches!(
        DegreeSplit::new(&k4, vec![4.0, 0.0, 0.0, 0.0]),
        Err(Error::InvalidSplit(_))
    ));
}

#[test]
fn union_of_exact_parts() {
    let (g1, g2) = (
        exact_model_graph(&[vec![2.0, 1.0, 1.0, 0.5]]).unwrap(),
        exact_model_graph(&[vec![0.5, 1.0, 1.0, 2.0]]).unwrap(),
    );
    let rep = union_spectrum_check(&g1, &g2).unwrap();
    assert!(rep.eps < 1e-12);
    assert!(rep.all_pass(), "{rep:?}");
    assert!((rep.rho1 - rep.eta).abs() < 1e-12);

    let k5 = complete(5).unwrap();
    let same = union_spectrum_check(&k5, &k5).unwrap();
    assert!(same.eta.abs() < 1e-12);
    assert!((same.rest - 0.25).abs() < 1e-12);
    assert!(same.rest_small && same.rho0_is_one);
}

#[test]
fn fixture_decomposes_to_its_parts() {
    let (g, parts) = fixture();
    let (split, diag) = rank2_decompose(&g, &DecomposeOptions::default()).unwrap();
    assert!((diag.alpha - 0.5).abs() < 1e-10);
    assert!((diag.rho1 - 2.0 / 3.0).abs() < 1e-12);
    assert!((diag.eta - 2.0 / 3.0).abs() < 1e-9);
    assert!(diag.residual < 1e-8);
    for v in 0..3 {
        assert!((split.d_prime[v] - parts[0][v]).abs() < 1e-8);
        assert!((split.d_doubleprime[v] - parts[1][v]).abs() < 1e-8);
    }
}

#[test]
fn refusals() {
    let opts = DecomposeOptions::default();
    assert!(matches!(
        rank2_decompose(&complete(6).unwrap(), &opts),
        Err(Error::SpectralGapTooSmall { .. })
    ));
    assert!(matches!(
        rank2_decompose(&matching(3).unwrap(), &opts),
        Err(Error::NotConnected { components: 3 })
    ));
    let kab = complete_bipartite(3, 4).unwrap();
    assert!(matches!(
        rank2_decompose(&kab, &opts),
        Err(Error::SpectralGapTooSmall { .. })
    ));
    let mut nearly_bipartite: Vec<(usize, usize, f64)> = kab.edges().collect();
    nearly_bipartite.push((0, 1, 1.0));
    let g = Graph::from_edges(7, &nearly_bipartite, GraphOptions::default()).unwrap();
    assert!(matches!(
        rank2_decompose(&g, &opts),
        Err(Error::NegativeSpectrum { .. })
    ));
    // two cliques joined by a single light edge
    let mut edges = Vec::new();
    for base in [0, 4] {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((base + i, base + j, 1.0));
            }
        }
    }
    edges.push((0, 4, 1e-9));
    let g = Graph::from_edges(8, &edges, GraphOptions::default()).unwrap();
    assert!(matches!(
        rank2_decompose(&g, &opts),
        Err(Error::NearlyDisconnected { .. })
    ));
}

#[test]
fn sign_of_the_eigenvector_does_not_matter() {
    let mut r = rng(31);
    for _ in 0..20 {
        let mut parts = random_parts(&mut r, 10, 2);
        ensure_cover(&mut parts);
        let g = exact_model_graph(&parts).unwrap();
        let s = spectrum(&g).unwrap();
        if s.rho[1] < 1e-3 {
            continue;
        }
        let phi = s.vector(1);
        let neg: Vec<f64> = phi.iter().map(|x| -x).collect();
        let (a, _) = rank2_decompose_with_vector(&g, s.rho[1], &phi).unwrap();
        let (b, _) = rank2_decompose_with_vector(&g, s.rho[1], &neg).unwrap();
        for v in 0..10 {
            assert!(
                (a.d_prime[v] - b.d_prime[v]).abs() < 1e-6 * g.degree(v),
                "{a:?} vs {b:?}"
            );
        }
        assert!(a.alpha <= 0.5 + 1e-12);
    }
}

#[test]
fn split_measures_of_fixture() {
    let (g, parts) = fixture();
    let split = DegreeSplit::new(&g, parts[0].clone()).unwrap();
    let (m1, m2) = split_measures(&g, &split).unwrap();
    let third = 1.0 / 3.0;
    for v in 0..3 {
        // cell mass = density / n
        assert!((m1.densities()[v] * third - parts[0][v] / 3.0).abs() < 1e-10);
        assert!((m2.densities()[v] * third - parts[1][v] / 3.0).abs() < 1e-10);
        let mixed = split.alpha * m1.densities()[v] + (1.0 - split.alpha) * m2.densities()[v];
        assert!((mixed * third - g.degree(v) / g.volume()).abs() < 1e-10);
    }
}

#[test]
fn rank_k_examples() {
    let k4 = complete(4).unwrap();
    let one = RankKSplit::new(&k4, vec![k4.degrees().to_vec()]).unwrap();
    let e = rank_k_eigs(&k4, &one).unwrap();
    assert_eq!(e.len(), 1);
    assert!((e[0].0 - 1.0).abs() < 1e-12);

    // disjoint supports: every part is its own block and η = 1
    let parts: Vec<Vec<f64>> = (0..3)
        .map(|j| (0..9).map(|v| if v / 3 == j { 1.0 + v as f64 } else { 0.0 }).collect())
        .collect();
    let g = exact_model_graph(&parts).unwrap();
    let split = RankKSplit::new(&g, parts).unwrap();
    for (eta, _) in rank_k_eigs(&g, &split).unwrap() {
        assert!((eta - 1.0).abs() < 1e-12);
    }
    assert!(rank_k_residual(&g, &split).unwrap() < 1e-12);
}

#[test]
fn rank_k_matches_the_oracle_model() {
    let mut r = rng(5);
    for (n, k) in [(30, 3), (60, 5), (12, 2)] {
        let mut parts = random_parts(&mut r, n, k);
        ensure_cover(&mut parts);
        let g = exact_model_graph(&parts).unwrap();
        let split = RankKSplit::new(&g, parts.clone()).unwrap();
        let eigs = rank_k_eigs(&g, &split).unwrap();
        let oracle = jacobi_eigen(&oracle_model(&parts)).0;
        for (i, (eta, xi)) in eigs.iter().enumerate() {
            assert!((eta - oracle[i]).abs() < 1e-10, "n={n} k={k}: {eta} vs {}", oracle[i]);
            assert!(*eta >= -1e-12, "model is positive semidefinite");
            assert!((xi.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10);
        }
        assert!(oracle[k..].iter().all(|x| x.abs() < 1e-10));
        assert!(eigs.windows(2).all(|w| w[0].0 >= w[1].0));
        assert!(rank_k_residual(&g, &split).unwrap() < 1e-10);
    }
}

/// Proportional parts describe the same model as a single part.
#[test]
fn proportional_parts_collapse() {
    let base = [1.0, 2.0, 3.0, 2.0, 1.0];
    let parts = vec![
        base.iter().map(|x| 0.25 * x).collect(),
        base.iter().map(|x| 0.75 * x).collect::<Vec<f64>>(),
    ];
    let g = exact_model_graph(&parts).unwrap();
    let split = RankKSplit::new(&g, parts).unwrap();
    let eigs = rank_k_eigs(&g, &split).unwrap();
    assert!((eigs[0].0 - 1.0).abs() < 1e-12 && eigs[1].0.abs() < 1e-12);
    let single = exact_model_graph(&[base.to_vec()]).unwrap();
    for u in 0..5 {
        for v in 0..5 {
            assert!((g.weight(u, v) - single.weight(u, v)).abs() < 1e-12);
        }
    }
}

/// The model has rank `k`, so by Weyl every eigenvalue of the union is within
/// the residual of the matching model eigenvalue (padded with zeros).
#[test]
fn union_of_three_random_parts() {
    let n = 300;
    let lists: Vec<Vec<f64>> = (0..3)
        .map(|j| (0..n).map(|v| if v % 3 == j { 60.0 } else { 6.0 }).collect())
        .collect();
    let (g, split) = union_quasirandom(&lists, 17).unwrap();
    let residual = rank_k_residual(&g, &split).unwrap();
    let rank_one = rank_k_residual(&g, &RankKSplit::new(&g, vec![g.degrees().to_vec()]).unwrap()).unwrap();
    assert!(residual < rank_one, "{residual} vs {rank_one}");
    assert!(residual < 0.5, "{residual}");
    let mut model: Vec<f64> = rank_k_eigs(&g, &split).unwrap().into_iter().map(|(e, _)| e).collect();
    model.resize(n, 0.0);
    model.sort_by(|a, b| b.total_cmp(a));
    let rho = spectrum(&g).unwrap().rho;
    for (a, b) in rho.iter().zip(&model) {
        assert!((a - b).abs() <= residual + 1e-9);
    }
    assert!(rho[1] > 0.3 && rho[2] > 0.3, "{:?}", &rho[..4]);
}

#[test]
fn subset_deviation_vanishes_on_exact_models() {
    let mut r = rng(44);
    let mut parts = random_parts(&mut r, 9, 3);
    ensure_cover(&mut parts);
    let g = exact_model_graph(&parts).unwrap();
    let split = RankKSplit::new(&g, parts).unwrap();
    for mask in 1u32..(1 << 9) {
        let s: Vec<usize> = (0..9).filter(|v| mask >> v & 1 == 1).collect();
        assert!(split_subset_deviation(&g, &split, &s).abs() < 1e-10 * g.volume());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Decomposing an exact two-part model recovers a split whose model is
    /// the graph itself.
    #[test]
    fn exact_rank_two_models_are_recovered(seed in any::<u64>(), n in 3usize..14) {
        let mut r = rng(seed);
        let mut parts = random_parts(&mut r, n, 2);
        ensure_cover(&mut parts);
        let g = exact_model_graph(&parts).unwrap();
        let s = spectrum(&g).unwrap();
        prop_assume!(s.rho[1] > 1e-3 && s.rho[1] < 1.0 - 1e-3);
        let (split, diag) = rank2_decompose(&g, &DecomposeOptions::default()).unwrap();
        prop_assert!(split.alpha <= 0.5 + 1e-12);
        let (v1, v2) = split.volumes();
        prop_assert!((v1 + v2 - g.volume()).abs() <= 1e-9 * g.volume());
        prop_assert!((diag.eta - diag.rho1).abs() <= diag.residual + 1e-9);
        prop_assert!(diag.frow_error < 1e-8);
    }

    #[test]
    fn eta_agrees_with_oracle(seed in any::<u64>(), n in 2usize..12) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.2..1.0);
        let frac: Vec<f64> = (0..n).map(|_| r.random_range(0.0..1.0)).collect();
        let d_prime: Vec<f64> = g.degrees().iter().zip(&frac).map(|(d, f)| d * f).collect();
        let split = DegreeSplit::new(&g, d_prime.clone()).unwrap();
        let (eta, _) = rank2_eta_xi(&g, &split).unwrap();
        let parts = vec![d_prime, split.d_doubleprime.clone()];
        let oracle = jacobi_eigen(&oracle_model(&parts)).0;
        prop_assert!((eta - oracle[1]).abs() <= 1e-10);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&eta));
        let swapped = rank2_eta_xi(&g, &split.swapped()).unwrap().0;
        prop_assert!((eta - swapped).abs() <= 1e-12);
    }

    #[test]
    fn chung_lu_unions_pass_the_check(seed in 0u64..1000) {
        let n = 120;
        let g1 = chung_lu(&vec![40.0; n], seed).unwrap();
        let w2: Vec<f64> = (0..n).map(|v| if v < n / 2 { 40.0 } else { 4.0 }).collect();
        let g2 = chung_lu(&w2, seed + 1).unwrap();
        let rep = union_spectrum_check(&g1, &g2).unwrap();
        prop_assert!(rep.rho0_is_one && rep.rho1_near_eta && rep.rest_small, "{:?}", rep);
    }
}
