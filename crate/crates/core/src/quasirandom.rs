//! Certificates measuring how far a graph is from quasirandom.
//!
//! A quasirandom graph has normalized adjacency close to the rank-1 matrix
//! `D^{1/2} J D^{1/2} / vol`. The spectral certificate measures that distance
//! in operator norm, the discrepancy certificate measures edge-count
//! deviations `|E(S,T) − vol(S)vol(T)/vol|` over subsets, and the trace
//! certificate measures `|Σ ρ_i^k − 1|`. Bipartite variants compare against
//! the rank-2 model with edges only across a partition `(X, X̄)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{membership, Graph};
use crate::spectral::{residual, trace_power, Approximant};
use crate::subsets::{Form, Mode, Problem};

pub const DEFAULT_TRACE_POWER: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    SpectralIv,
    DiscrepancyV,
    TraceVi,
    BipartiteIv,
    BipartiteV,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub property: Property,
    pub epsilon: f64,
    /// False when a subset search was sampled; `epsilon` is then a lower bound.
    pub exact: bool,
    pub details: Value,
}

/// `‖D^{-1/2}(A − DJD/vol)D^{-1/2}‖`.
pub fn qr_epsilon_spectral(g: &Graph) -> Result<Certificate> {
    let r = residual(g, &Approximant::rank_one(g))?;
    Ok(Certificate {
        property: Property::SpectralIv,
        epsilon: r.norm,
        exact: true,
        details: json!({ "eigenvalue": r.eigenvalue, "eigenvector": r.vector }),
    })
}

fn adjacency_form(g: &Graph) -> Form {
    Form::symmetric_sparse((0..g.n()).map(|v| g.neighbors(v).to_vec()).collect())
}

/// `max |E(S,T) − vol(S)vol(T)/vol| / sqrt(vol(S)vol(T))` over nonempty `S, T`.
pub fn qr_epsilon_discrepancy(g: &Graph, mode: Mode) -> Result<Certificate> {
    let vol = g.volume();
    let d = g.degrees().to_vec();
    let r = Problem {
        size: g.n(),
        forms: vec![adjacency_form(g)],
        s_linear: vec![d.clone()],
        t_linear: vec![d],
        eval: Box::new(move |x, s, t| Some((x[0] - s[0] * t[0] / vol).abs() / (s[0] * t[0]).sqrt())),
    }
    .maximize(mode)?;
    Ok(Certificate {
        property: Property::DiscrepancyV,
        epsilon: r.value,
        exact: !r.lower_bound,
        details: json!({ "s": r.s, "t": r.t, "mode": mode }),
    })
}

/// `|Σ_i ρ_i^k − 1|` for even `k ≥ 2`.
pub fn qr_trace_defect(g: &Graph, k: u32) -> Result<Certificate> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "trace power must be even and at least 2, got {k}"
        )));
    }
    let trace = trace_power(g, k)?;
    Ok(Certificate {
        property: Property::TraceVi,
        epsilon: (trace - 1.0).abs(),
        exact: true,
        details: json!({ "k": k, "trace": trace }),
    })
}

/// Checks that `x` is a proper nonempty subset of the vertices.
pub fn validate_partition(g: &Graph, x: &[usize]) -> Result<Vec<bool>> {
    if let Some(&v) = x.iter().find(|&&v| v >= g.n()) {
        return Err(Error::InvalidPartition(format!("vertex {v} is out of range")));
    }
    let inside = membership(g.n(), x);
    let count = inside.iter().filter(|&&b| b).count();
    if count != x.len() {
        return Err(Error::InvalidPartition("repeated vertex".into()));
    }
    if count == 0 || count == g.n() {
        return Err(Error::InvalidPartition(
            "X must be nonempty and miss some vertex".into(),
        ));
    }
    Ok(inside)
}

/// Weight of the cross-pair expectation: 2 makes `K_{a,b}` exact, the
/// unit variant uses 1.
fn bipartite_factor(unit_factor: bool) -> f64 {
    if unit_factor {
        1.0
    } else {
        2.0
    }
}

/// `‖D^{-1/2}(A − B)D^{-1/2}‖` with `B(x, y) = c·d_x d_y / vol` on cross
/// pairs and 0 inside each side, `c = 2` (or 1 when `unit_factor`).
pub fn bipartite_epsilon_spectral(g: &Graph, x: &[usize], unit_factor: bool) -> Result<Certificate> {
    let inside = validate_partition(g, x)?;
    let c = bipartite_factor(unit_factor) / g.volume();
    let a = DVector::from_iterator(g.n(), (0..g.n()).map(|v| if inside[v] { g.degree(v) } else { 0.0 }));
    let b = DVector::from_iterator(g.n(), (0..g.n()).map(|v| if inside[v] { 0.0 } else { g.degree(v) }));
    let approx = Approximant::LowRank {
        vectors: vec![a, b],
        coefficients: DMatrix::from_row_slice(2, 2, &[0.0, c, c, 0.0]),
    };
    let r = residual(g, &approx)?;
    Ok(Certificate {
        property: Property::BipartiteIv,
        epsilon: r.norm,
        exact: true,
        details: json!({
            "eigenvalue": r.eigenvalue,
            "eigenvector": r.vector,
            "unit_factor": unit_factor,
        }),
    })
}

/// Largest normalized deviation of `E(S,T)` from
/// `c (vol(S∩X)vol(T∩X̄) + vol(S∩X̄)vol(T∩X)) / vol`.
pub fn bipartite_epsilon_discrepancy(g: &Graph, x: &[usize], mode: Mode, unit_factor: bool) -> Result<Certificate> {
    let inside = validate_partition(g, x)?;
    let c = bipartite_factor(unit_factor) / g.volume();
    let on_x: Vec<f64> = (0..g.n()).map(|v| if inside[v] { g.degree(v) } else { 0.0 }).collect();
    let off_x: Vec<f64> = (0..g.n()).map(|v| if inside[v] { 0.0 } else { g.degree(v) }).collect();
    let lin = vec![on_x, off_x];
    let r = Problem {
        size: g.n(),
        forms: vec![adjacency_form(g)],
        s_linear: lin.clone(),
        t_linear: lin,
        eval: Box::new(move |e, s, t| {
            let expected = c * (s[0] * t[1] + s[1] * t[0]);
            Some((e[0] - expected).abs() / ((s[0] + s[1]) * (t[0] + t[1])).sqrt())
        }),
    }
    .maximize(mode)?;
    Ok(Certificate {
        property: Property::BipartiteV,
        epsilon: r.value,
        exact: !r.lower_bound,
        details: json!({ "s": r.s, "t": r.t, "mode": mode, "unit_factor": unit_factor }),
    })
}
