mod common;

use common::*;
use graphlets::generators::{
    bipartite_quasirandom, blowup, chung_lu, complete, complete_bipartite, cycle, dense_universal_basis, matching,
    path, product_with_complete, union_quasirandom, RNG_NAME,
};
use graphlets::lift::lift_measure;
use graphlets::spectral::spectrum;
use graphlets::{Error, Graph, GraphOptions, LabelingMap};
use nalgebra::DMatrix;

#[test]
fn same_seed_same_graph() {
    let w: Vec<f64> = (0..80).map(|i| 4.0 + (i % 5) as f64).collect();
    let a = chung_lu(&w, 42).unwrap();
    assert_eq!(a, chung_lu(&w, 42).unwrap());
    assert_ne!(a, chung_lu(&w, 43).unwrap());
    let b = bipartite_quasirandom(&w[..30], &w[30..], 7).unwrap();
    assert_eq!(b, bipartite_quasirandom(&w[..30], &w[30..], 7).unwrap());
    assert_eq!(RNG_NAME, "chacha8-pairstream-v1");
}

/// Mean degree over many draws lands within three standard errors of the
/// expectation `Σ_{v≠u} w_u w_v / Σw`.
#[test]
fn expected_degrees_are_met() {
    let n = 50;
    let w = vec![8.0; n];
    let trials = 200;
    let means: Vec<f64> = (0..trials)
        .map(|s| chung_lu(&w, s).unwrap().volume() / n as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / trials as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let se = (var / trials as f64).sqrt();
    let expected = 8.0 * (n as f64 - 1.0) / n as f64;
    assert!((mean - expected).abs() <= 3.0 * se, "{mean} vs {expected} (se {se})");
}

/// Heavy and light vertices get degrees proportional to their weights.
#[test]
fn weight_classes_keep_their_degrees() {
    let n = 200;
    let w: Vec<f64> = (0..n).map(|v| if v < n / 4 { 40.0 } else { 10.0 }).collect();
    let total: f64 = w.iter().sum();
    let trials = 200;
    for (class, range) in [(40.0, 0..n / 4), (10.0, n / 4..n)] {
        let mut per_trial = Vec::new();
        for s in 0..trials {
            let g = chung_lu(&w, 1000 + s).unwrap();
            let d: f64 = range.clone().map(|v| g.degree(v)).sum::<f64>() / range.len() as f64;
            per_trial.push(d);
        }
        let mean = per_trial.iter().sum::<f64>() / trials as f64;
        let var = per_trial.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        let expected = class - class * class / total;
        assert!(
            (mean - expected).abs() <= 4.0 * se,
            "class {class}: {mean} vs {expected} (se {se})"
        );
    }
}

#[test]
fn rejects_bad_weights() {
    assert!(matches!(
        chung_lu(&[10.0, 1.0, 1.0], 0),
        Err(Error::ProbabilityOverflow { .. })
    ));
    assert!(matches!(chung_lu(&[], 0), Err(Error::EmptyGraph)));
    assert!(matches!(chung_lu(&[1.0, -1.0], 0), Err(Error::InvalidArgument(_))));
    assert!(matches!(
        bipartite_quasirandom(&[100.0], &[1.0, 1.0], 0),
        Err(Error::ProbabilityOverflow { .. })
    ));
    assert!(matches!(
        chung_lu(&[0.1; 40], 0),
        Err(Error::IsolationRetryExhausted { .. })
    ));
}

#[test]
fn union_of_one_part_is_chung_lu() {
    let w = vec![6.0; 40];
    let (g, split) = union_quasirandom(std::slice::from_ref(&w), 9).unwrap();
    assert_eq!(g, chung_lu(&w, 9).unwrap());
    assert_eq!(split.parts, vec![g.degrees().to_vec()]);
}

#[test]
fn disjoint_parts_give_a_second_unit_eigenvalue() {
    let n = 60;
    let a: Vec<f64> = (0..n).map(|v| if v < n / 2 { 12.0 } else { 0.0 }).collect();
    let b: Vec<f64> = (0..n).map(|v| if v < n / 2 { 0.0 } else { 12.0 }).collect();
    let (g, split) = union_quasirandom(&[a, b], 3).unwrap();
    assert_eq!(g.components().1, 2);
    assert!((spectrum(&g).unwrap().rho[1] - 1.0).abs() < 1e-9);
    let (va, vb) = (split.volumes()[0], split.volumes()[1]);
    assert!(va > 0.0 && vb > 0.0 && (va + vb - g.volume()).abs() < 1e-9);
}

#[test]
fn bipartite_generator_respects_sides() {
    let g = bipartite_quasirandom(&[5.0; 20], &[3.0; 30], 11).unwrap();
    assert!(g.edges().all(|(u, v, _)| (u < 20) != (v < 20)));
    // all probabilities equal one: the complete bipartite graph
    // weight c on all seven vertices gives S = 24c/7 and p = 7c/24
    let c = 24.0 / 7.0;
    let full = bipartite_quasirandom(&[c; 3], &[c; 4], 0).unwrap();
    assert_eq!(full, complete_bipartite(3, 4).unwrap());
}

#[test]
fn blowup_examples() {
    let g = cycle(5).unwrap();
    assert_eq!(blowup(&g, 1).unwrap(), g);
    assert_eq!(
        blowup(&complete(2).unwrap(), 2).unwrap(),
        complete_bipartite(2, 2).unwrap()
    );
    assert!(matches!(blowup(&g, 0), Err(Error::SizeTooSmall { .. })));
    let mut r = rng(2);
    for _ in 0..10 {
        let h = random_graph(&mut r, 6, 0.2..0.9);
        let b = blowup(&h, 3).unwrap();
        let (mh, mb) = (
            lift_measure(&h, &LabelingMap::degree_sorted(&h)),
            lift_measure(&b, &LabelingMap::degree_sorted(&b)),
        );
        for i in 0..18 {
            assert!((mh.densities()[i / 3] - mb.densities()[i]).abs() < 1e-12);
        }
        // blow-ups keep the nonzero normalized spectrum
        let rb: Vec<f64> = spectrum(&b)
            .unwrap()
            .rho
            .into_iter()
            .filter(|x| x.abs() > 1e-9)
            .collect();
        let rh: Vec<f64> = spectrum(&h)
            .unwrap()
            .rho
            .into_iter()
            .filter(|x| x.abs() > 1e-9)
            .collect();
        assert_eq!(rb.len(), rh.len());
        assert!(rb.iter().zip(&rh).all(|(a, b)| (a - b).abs() < 1e-10));
    }
}

#[test]
fn product_with_complete_adds_cliques() {
    let g = product_with_complete(&path(3).unwrap(), 3).unwrap();
    assert_eq!(g.n(), 9);
    assert_eq!(g.edge_count(), 3 * 3 + 2 * 9);
    assert!(matches!(
        product_with_complete(&path(3).unwrap(), 1),
        Err(Error::SizeTooSmall { .. })
    ));
}

fn block_constant(v: &[f64], m: usize) -> bool {
    v.chunks(m).all(|c| c.iter().all(|x| (x - c[0]).abs() < 1e-12))
}

#[test]
fn universal_basis_of_k2() {
    let k2 = complete(2).unwrap();
    let basis = dense_universal_basis(&k2, 2).unwrap();
    assert_eq!((basis.primary.len(), basis.complementary.len()), (2, 2));
    let b = blowup(&k2, 2).unwrap();
    let m = b.normalized_adjacency();
    let sd: Vec<f64> = b.degrees().iter().map(|d| d.sqrt()).collect();
    for (psi, want) in basis.primary.iter().zip([1.0, -1.0]) {
        let x = nalgebra::DVector::from_iterator(4, psi.iter().zip(&sd).map(|(p, s)| p * s));
        let y = &m * &x;
        assert!((0..4).all(|i| (y[i] - want * x[i]).abs() < 1e-12));
    }
}

#[test]
fn universal_basis_structure() {
    let mut r = rng(13);
    for m in [1, 2, 3, 4, 5] {
        let h = random_graph(&mut r, 5, 0.3..0.9);
        let basis = dense_universal_basis(&h, m).unwrap();
        let n = 5 * m;
        assert_eq!(basis.len(), n);
        assert!(basis.primary.iter().all(|v| block_constant(v, m)));
        let b = blowup(&h, m).unwrap();
        for c in &basis.complementary {
            for p in &basis.primary {
                assert!(b.mu_inner(c, p).abs() < 1e-12);
            }
            // zero mean on each block, so the blow-up's walk annihilates it
            assert!(b.walk_apply(c).iter().all(|x| x.abs() < 1e-12));
        }
        let mat = DMatrix::from_fn(n, n, |i, j| basis.vectors().nth(j).unwrap()[i]);
        let sv = mat.singular_values();
        assert!(sv.min() > 1e-8, "m={m}: basis is degenerate");
        if m == 1 {
            let s = spectrum(&h).unwrap();
            for (j, p) in basis.primary.iter().enumerate() {
                let want = s.combinatorial(j);
                assert!(p.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-12));
            }
        }
    }
    assert!(matches!(
        dense_universal_basis(&complete(3).unwrap(), 0),
        Err(Error::SizeTooSmall { .. })
    ));
}

#[test]
fn named_families() {
    assert_eq!(complete(5).unwrap().edge_count(), 10);
    assert_eq!(complete_bipartite(2, 3).unwrap().edge_count(), 6);
    assert_eq!(path(4).unwrap().edge_count(), 3);
    assert_eq!(cycle(4).unwrap().edge_count(), 4);
    assert_eq!(matching(3).unwrap().components().1, 3);
    for err in [complete(1), path(1), cycle(2), matching(0), complete_bipartite(0, 3)] {
        assert!(matches!(err, Err(Error::SizeTooSmall { .. })), "{err:?}");
    }
    let p = path(3).unwrap();
    assert_eq!(
        p,
        Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)], GraphOptions::default()).unwrap()
    );
}
