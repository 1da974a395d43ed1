//! Graph generators: random models with prescribed expected degrees, blow-ups,
//! the dense universal basis, and named unit-weight families.
//!
//! # Random source
//!
//! Random graphs use ChaCha8 (`rand_chacha`), seeded with
//! `seed_from_u64(seed)` and switched to stream `(attempt << 32) | part`,
//! where `attempt` counts isolation resamples and `part` indexes the parts of
//! a union. Each candidate pair consumes one `u64` in row-major order of
//! `u < v` (for bipartite graphs, `x ∈ X` then `y ∈ Y`), converted to a
//! uniform `(x >> 11) · 2⁻⁵³`; the pair is an edge when the uniform is below
//! its probability. Any implementation following these rules reproduces the
//! same graphs from the same seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::RankKSplit;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphOptions};
use crate::spectral::spectrum;

/// Name recorded in reports for the scheme above.
pub const RNG_NAME: &str = "chacha8-pairstream-v1";
/// Isolation resamples before giving up.
pub const MAX_RETRIES: usize = 100;

fn pair_stream(seed: u64, attempt: usize, part: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((attempt as u64) << 32) | part as u64);
    rng
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn check_weights(w: &[f64]) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if let Some(&x) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "weight {x} must be finite and nonnegative"
        )));
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("weights sum to zero".into()));
    }
    let max = w.iter().fold(0.0_f64, |a, b| a.max(*b));
    let p = max * max / total;
    if p > 1.0 {
        return Err(Error::ProbabilityOverflow { max_probability: p });
    }
    Ok(total)
}

/// Edges of one Chung–Lu draw: `{u, v}` with probability `w_u w_v / Σw`.
fn sample_part(w: &[f64], total: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let n = w.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if uniform(rng) < w[u] * w[v] / total {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn has_isolated(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    for &(u, v) in edges {
        seen[u] = true;
        seen[v] = true;
    }
    seen.iter().any(|s| !s)
}

/// Random graph with independent edges of probability `w_u w_v / Σw`.
///
/// Requires `max(w)² ≤ Σw`. Draws with an isolated vertex are discarded and
/// redrawn on the next stream, at most [`MAX_RETRIES`] times.
pub fn chung_lu(weights: &[f64], seed: u64) -> Result<Graph> {
    Ok(union_quasirandom(&[weights.to_vec()], seed)?.0)
}

/// Union of independent Chung–Lu draws on a shared vertex set. Parts may
/// leave vertices isolated; the union may not. Overlapping edges add up.
/// Returns the ground-truth split `d_j(v)` = degree of `v` in part `j`.
pub fn union_quasirandom(weight_lists: &[Vec<f64>], seed: u64) -> Result<(Graph, RankKSplit)> {
    let Some(first) = weight_lists.first() else {
        return Err(Error::InvalidArgument("need at least one weight list".into()));
    };
    let n = first.len();
    if weight_lists.iter().any(|w| w.len() != n) {
        return Err(Error::InvalidArgument("weight lists differ in length".into()));
    }
    let totals: Vec<f64> = weight_lists.iter().map(|w| check_weights(w)).collect::<Result<_>>()?;
    for attempt in 0..=MAX_RETRIES {
        let parts: Vec<Vec<(usize, usize)>> = weight_lists
            .iter()
            .zip(&totals)
            .enumerate()
            .map(|(j, (w, &t))| sample_part(w, t, &mut pair_stream(seed, attempt, j)))
            .collect();
        let all: Vec<(usize, usize)> = parts.iter().flatten().copied().collect();
        if has_isolated(n, &all) {
            continue;
        }
        let mut degree_parts = vec![vec![0.0; n]; parts.len()];
        for (j, edges) in parts.iter().enumerate() {
            for &(u, v) in edges {
                degree_parts[j][u] += 1.0;
                degree_parts[j][v] += 1.0;
            }
        }
        let mut summed = std::collections::BTreeMap::new();
        for &(u, v) in &all {
            *summed.entry((u, v)).or_insert(0.0) += 1.0;
        }
        let edges: Vec<(usize, usize, f64)> = summed.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        let g = Graph::from_edges(n, &edges, GraphOptions::default())?;
        let split = RankKSplit::new(&g, degree_parts)?;
        return Ok((g, split));
    }
    Err(Error::IsolationRetryExhausted { retries: MAX_RETRIES })
}

/// Random bipartite graph on `X = 0..a`, `Y = a..a+b` with cross edges only,
/// `p(x, y) = wX_x wY_y / S` and `S = 2 ΣwX ΣwY / (ΣwX + ΣwY)`, so the
/// expected volume is `ΣwX + ΣwY`.
pub fn bipartite_quasirandom(wx: &[f64], wy: &[f64], seed: u64) -> Result<Graph> {
    for w in [wx, wy] {
        if w.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if let Some(&x) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weight {x} must be finite and nonnegative"
            )));
        }
    }
    let (sx, sy): (f64, f64) = (wx.iter().sum(), wy.iter().sum());
    if sx <= 0.0 || sy <= 0.0 {
        return Err(Error::InvalidArgument("each side needs positive total weight".into()));
    }
    let s = 2.0 * sx * sy / (sx + sy);
    let mx = wx.iter().fold(0.0_f64, |a, b| a.max(*b));
    let my = wy.iter().fold(0.0_f64, |a, b| a.max(*b));
    if mx * my / s > 1.0 {
        return Err(Error::ProbabilityOverflow {
            max_probability: mx * my / s,
        });
    }
    let (a, b) = (wx.len(), wy.len());
    for attempt in 0..=MAX_RETRIES {
        let mut rng = pair_stream(seed, attempt, 0);
        let mut edges = Vec::new();
        for (x, wxx) in wx.iter().enumerate() {
            for (y, wyy) in wy.iter().enumerate() {
                if uniform(&mut rng) < wxx * wyy / s {
                    edges.push((x, a + y));
                }
            }
        }
        if has_isolated(a + b, &edges) {
            continue;
        }
        let edges: Vec<(usize, usize, f64)> = edges.into_iter().map(|(u, v)| (u, v, 1.0)).collect();
        return Graph::from_edges(a + b, &edges, GraphOptions::default());
    }
    Err(Error::IsolationRetryExhausted { retries: MAX_RETRIES })
}

/// Each vertex `u` becomes twins `uk..uk+k`, with `A'(uk+i, vk+j) = A(u, v)`.
pub fn blowup(g: &Graph, k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::SizeTooSmall {
            family: "blowup factor",
            min: 1,
            got: 0,
        });
    }
    let mut edges = Vec::new();
    for (u, v, w) in g.edges() {
        for i in 0..k {
            for j in 0..k {
                let (a, b) = (u * k + i, v * k + j);
                if u != v || a <= b {
                    edges.push((a, b, w));
                }
            }
        }
    }
    Graph::from_edges(
        g.n() * k,
        &edges,
        GraphOptions {
            allow_loops: g.allows_loops(),
        },
    )
}

/// Each vertex becomes a copy of `K_q` and each edge of weight `w` a
/// complete bipartite `K_{q,q}` of weight `w`.
pub fn product_with_complete(g: &Graph, q: usize) -> Result<Graph> {
    if q < 2 {
        return Err(Error::SizeTooSmall {
            family: "complete factor",
            min: 2,
            got: q,
        });
    }
    let b = blowup(g, q)?;
    let mut edges: Vec<(usize, usize, f64)> = b.edges().collect();
    for u in 0..g.n() {
        for i in 0..q {
            for j in i + 1..q {
                let (x, y) = (u * q + i, u * q + j);
                if b.weight(x, y) == 0.0 {
                    edges.push((x, y, 1.0));
                }
            }
        }
    }
    Graph::from_edges(
        b.n(),
        &edges,
        GraphOptions {
            allow_loops: g.allows_loops(),
        },
    )
}

/// Basis of functions on the `h·m` vertices of `blowup(H, m)`.
#[derive(Debug, Clone)]
pub struct UniversalBasis {
    /// `H`'s μ-orthonormal eigenfunctions of `Δ`, constant on each block.
    pub primary: Vec<Vec<f64>>,
    /// Per block, `cos(2π b i/m)` for `b = 1..=⌊m/2⌋` and `sin(2π b i/m)` for
    /// `b = 1..⌈m/2⌉`, zero outside the block.
    pub complementary: Vec<Vec<f64>>,
}

impl UniversalBasis {
    pub fn len(&self) -> usize {
        self.primary.len() + self.complementary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vectors(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.primary.iter().chain(&self.complementary)
    }
}

pub fn dense_universal_basis(h: &Graph, m: usize) -> Result<UniversalBasis> {
    if m == 0 {
        return Err(Error::SizeTooSmall {
            family: "block size",
            min: 1,
            got: 0,
        });
    }
    let spec = spectrum(h)?;
    let n = h.n() * m;
    let primary = (0..spec.len())
        .map(|j| {
            let psi = spec.combinatorial(j);
            (0..n).map(|v| psi[v / m]).collect()
        })
        .collect();
    let mut complementary = Vec::new();
    let tau = std::f64::consts::TAU;
    for u in 0..h.n() {
        let block = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
            let mut x = vec![0.0; n];
            for i in 0..m {
                x[u * m + i] = f(i);
            }
            x
        };
        for b in 1..=m / 2 {
            complementary.push(block(&|i| (tau * (b * i) as f64 / m as f64).cos()));
        }
        for b in 1..m.div_ceil(2) {
            complementary.push(block(&|i| (tau * (b * i) as f64 / m as f64).sin()));
        }
    }
    Ok(UniversalBasis { primary, complementary })
}

fn unit_graph(family: &'static str, n: usize, min: usize, edges: Vec<(usize, usize)>) -> Result<Graph> {
    if n < min {
        return Err(Error::SizeTooSmall { family, min, got: n });
    }
    let e: Vec<(usize, usize, f64)> = edges.into_iter().map(|(u, v)| (u, v, 1.0)).collect();
    Graph::from_edges(n, &e, GraphOptions::default())
}

pub fn complete(n: usize) -> Result<Graph> {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    unit_graph("complete", n, 2, edges)
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
    if a.min(b) < 1 {
        return Err(Error::SizeTooSmall {
            family: "complete_bipartite",
            min: 1,
            got: a.min(b),
        });
    }
    let edges = (0..a).flat_map(|x| (a..a + b).map(move |y| (x, y))).collect();
    unit_graph("complete_bipartite", a + b, 2, edges)
}

pub fn path(n: usize) -> Result<Graph> {
    unit_graph("path", n, 2, (1..n).map(|v| (v - 1, v)).collect())
}

pub fn cycle(n: usize) -> Result<Graph> {
    unit_graph("cycle", n, 3, (0..n).map(|v| (v, (v + 1) % n)).collect())
}

/// `m` disjoint edges on `2m` vertices.
pub fn matching(m: usize) -> Result<Graph> {
    if m < 1 {
        return Err(Error::SizeTooSmall {
            family: "matching",
            min: 1,
            got: m,
        });
    }
    unit_graph("matching", 2 * m, 2, (0..m).map(|i| (2 * i, 2 * i + 1)).collect())
}
