//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's numerical code: eigenvalues come from a cyclic Jacobi
//! sweep and discrepancies from plain subset enumeration over adjacency
//! matrices.

#![allow(dead_code, clippy::needless_range_loop)]

use graphlets::{Graph, GraphOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Eigenvalues (descending) and column eigenvectors of a symmetric matrix.
pub fn jacobi_eigen(a: &Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut m = a.clone();
    let mut v: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let values = idx.iter().map(|&i| m[i][i]).collect();
    let vectors = (0..n).map(|r| idx.iter().map(|&i| v[r][i]).collect()).collect();
    (values, vectors)
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn spectral_radius(a: &Dense) -> f64 {
    jacobi_eigen(a).0.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn adjacency(g: &Graph) -> Dense {
    let n = g.n();
    let mut a = vec![vec![0.0; n]; n];
    for (u, v, w) in g.edges() {
        a[u][v] = w;
        a[v][u] = w;
    }
    a
}

pub fn row_sums(a: &Dense) -> Vec<f64> {
    a.iter().map(|r| r.iter().sum()).collect()
}

/// `D^{-1/2} A D^{-1/2}` from a raw adjacency matrix.
pub fn normalized(a: &Dense) -> Dense {
    let d = row_sums(a);
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[i][j] / (d[i] * d[j]).sqrt()).collect())
        .collect()
}

/// Normalized eigenvalues computed from the adjacency matrix alone.
pub fn oracle_rho(g: &Graph) -> Vec<f64> {
    jacobi_eigen(&normalized(&adjacency(g))).0
}

/// `max_{S,T ≠ ∅} |E(S,T) − vol(S)vol(T)/vol| / sqrt(vol(S)vol(T))` by
/// enumerating every pair of vertex subsets.
pub fn brute_discrepancy(a: &Dense) -> f64 {
    let n = a.len();
    let d = row_sums(a);
    let vol: f64 = d.iter().sum();
    let mut best = 0.0_f64;
    for s in 1u32..(1 << n) {
        for t in 1u32..(1 << n) {
            let mut e = 0.0;
            let (mut vs, mut vt) = (0.0, 0.0);
            for i in 0..n {
                if s >> i & 1 == 1 {
                    vs += d[i];
                    for j in 0..n {
                        if t >> j & 1 == 1 {
                            e += a[i][j];
                        }
                    }
                }
                if t >> i & 1 == 1 {
                    vt += d[i];
                }
            }
            best = best.max((e - vs * vt / vol).abs() / (vs * vt).sqrt());
        }
    }
    best
}

/// All connected unit-weight graphs on `n` labeled vertices as edge lists.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, p)| *p)
            .collect();
        if is_connected(n, &edges) {
            out.push(edges);
        }
    }
    out
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            let other = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                stack.push(other);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices.
pub fn connected_graphs_up_to_iso(n: usize) -> Vec<Vec<(usize, usize)>> {
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for edges in connected_graphs(n) {
        let key = perms
            .iter()
            .map(|p| {
                let mut e: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
                e.sort();
                e
            })
            .min()
            .unwrap();
        if seen.insert(key) {
            out.push(edges);
        }
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn unit_graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    let e: Vec<(usize, usize, f64)> = edges.iter().map(|&(a, b)| (a, b, 1.0)).collect();
    Graph::from_edges(n, &e, GraphOptions::default()).unwrap()
}

/// Random connected weighted graph: a Hamiltonian cycle (or single edge)
/// plus each other pair with probability `p`, weights in `[0.5, 2.5)`.
pub fn random_weighted(r: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let on_cycle = j == i + 1 || (i == 0 && j == n - 1 && n > 2);
            if on_cycle || r.random::<f64>() < p {
                edges.push((i, j, 0.5 + 2.0 * r.random::<f64>()));
            }
        }
    }
    Graph::from_edges(n, &edges, GraphOptions::default()).unwrap()
}

pub fn random_subset(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let p: f64 = r.random_range(0.05..0.95);
    (0..n).filter(|_| r.random::<f64>() < p).collect()
}

pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = r.random::<f64>().max(1e-300);
    let u2: f64 = r.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// [`random_weighted`] with the edge probability drawn from `p`.
pub fn random_graph(r: &mut ChaCha8Rng, n: usize, p: std::ops::Range<f64>) -> Graph {
    let p = r.random_range(p);
    random_weighted(r, n, p)
}
