//! Reports behind the command-line tool, and the convergence runner.
//!
//! Every report carries [`Metadata`]; reports contain no timestamps, so the
//! same inputs, seed and thread count give byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::decomp::{rank2_decompose, DecomposeOptions, DegreeSplit, Diagnostics};
use crate::distances::{
    average_measure, cut_distance, degree_distribution_distance, disc_distance_labeled, disc_mu, spectral_distance,
    spectral_distance_with, Labeling,
};
use crate::error::{Error, Result};
use crate::generators::{chung_lu, RNG_NAME};
use crate::graph::{degree_measure, Graph};
use crate::quasirandom::{
    bipartite_epsilon_discrepancy, bipartite_epsilon_spectral, qr_epsilon_discrepancy, qr_epsilon_spectral,
    qr_trace_defect, Certificate, DEFAULT_TRACE_POWER,
};
use crate::spectral::spectrum;
use crate::subsets::{Mode, DEFAULT_SAMPLES};
use crate::TOOL_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool_version: &'static str,
    pub seed: Value,
    pub rng_name: &'static str,
    pub thread_count: usize,
}

impl Metadata {
    pub fn new(seed: impl Serialize) -> Self {
        Metadata {
            tool_version: TOOL_VERSION,
            seed: serde_json::to_value(seed).unwrap_or(Value::Null),
            rng_name: RNG_NAME,
            thread_count: rayon::current_num_threads(),
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("metadata serializes")
    }

    /// `# key=value` lines for text outputs.
    pub fn comment_lines(&self) -> String {
        format!(
            "# tool_version={}\n# seed={}\n# rng_name={}\n# thread_count={}\n",
            self.tool_version, self.seed, self.rng_name, self.thread_count
        )
    }
}

/// Adds the metadata block to a JSON object.
pub fn with_metadata(mut report: Value, meta: &Metadata) -> Value {
    if let Value::Object(map) = &mut report {
        map.insert("metadata".into(), meta.to_json());
    }
    report
}

#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    pub seed: u64,
    pub samples: usize,
    pub trace_power: u32,
    pub gap_min: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            seed: 0,
            samples: DEFAULT_SAMPLES,
            trace_power: DEFAULT_TRACE_POWER,
            gap_min: crate::decomp::DEFAULT_GAP_MIN,
        }
    }
}

fn certificate_json(c: &Certificate) -> Value {
    serde_json::to_value(c).expect("certificate serializes")
}

/// Degree measure, extremal spectrum, the three certificates, volume and
/// connectivity, plus a hint on which decomposition applies.
pub fn analyze(g: &Graph, options: &AnalyzeOptions) -> Result<Value> {
    let (_, components) = g.components();
    let spec = spectrum(g)?;
    let k = spec.len();
    let top: Vec<f64> = spec.rho.iter().take(10).copied().collect();
    let bottom: Vec<f64> = spec
        .rho
        .iter()
        .skip(k.saturating_sub(10).max(top.len()))
        .copied()
        .collect();
    let eps_spectral = qr_epsilon_spectral(g)?;
    let disc = qr_epsilon_discrepancy(g, Mode::auto(g.n(), options.samples, options.seed))?;
    let trace = qr_trace_defect(g, options.trace_power)?;
    let rho1 = spec.rho.get(1).copied().unwrap_or(0.0);
    let rho_min = spec.rho[k - 1];
    let hint = if components > 1 {
        format!("disconnected into {components} components; analyze each component separately")
    } else if k < 2 || rho1 <= options.gap_min {
        if rho_min < -0.5 {
            "dominant negative eigenvalue; test a bipartite partition with certify --property bip-spectral".into()
        } else {
            "no positive second eigenvalue; compare eps_spectral against zero for quasirandomness".into()
        }
    } else if rho_min < -rho1 {
        "negative eigenvalue dominates rho1; a union of quasirandom parts does not apply".into()
    } else if rho1 >= 1.0 - options.gap_min {
        "rho1 is within gap_min of 1; the graph is nearly disconnected".into()
    } else {
        "rho1 separates from the rest; try decompose for a two-part split".into()
    };
    Ok(json!({
        "n": g.n(),
        "volume": g.volume(),
        "components": components,
        "connected": components == 1,
        "degree_measure": degree_measure(g).values(),
        "spectrum": {
            "partial": spec.partial,
            "top": top,
            "bottom": bottom,
            "residual": spec.residual,
        },
        "rho": top,
        "eps_spectral": eps_spectral.epsilon,
        "certificates": {
            "spectral": certificate_json(&eps_spectral),
            "discrepancy": certificate_json(&disc),
            "trace": certificate_json(&trace),
        },
        "decomposition_hint": hint,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifyProperty {
    Spectral,
    Disc,
    Trace,
    BipSpectral,
    BipDisc,
}

impl FromStr for CertifyProperty {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spectral" => CertifyProperty::Spectral,
            "disc" => CertifyProperty::Disc,
            "trace" => CertifyProperty::Trace,
            "bip-spectral" => CertifyProperty::BipSpectral,
            "bip-disc" => CertifyProperty::BipDisc,
            other => return Err(Error::InvalidArgument(format!("unknown property '{other}'"))),
        })
    }
}

pub struct CertifyRequest<'a> {
    pub property: CertifyProperty,
    pub partition: Option<&'a [usize]>,
    pub k: u32,
    pub unit_factor: bool,
    pub mode: Mode,
}

pub fn certify(g: &Graph, req: &CertifyRequest) -> Result<Certificate> {
    let need_x = || {
        req.partition
            .ok_or_else(|| Error::InvalidPartition("bipartite properties need a partition file".into()))
    };
    match req.property {
        CertifyProperty::Spectral => qr_epsilon_spectral(g),
        CertifyProperty::Disc => qr_epsilon_discrepancy(g, req.mode),
        CertifyProperty::Trace => qr_trace_defect(g, req.k),
        CertifyProperty::BipSpectral => bipartite_epsilon_spectral(g, need_x()?, req.unit_factor),
        CertifyProperty::BipDisc => bipartite_epsilon_discrepancy(g, need_x()?, req.mode, req.unit_factor),
    }
}

/// The split file: `alpha`, `d_prime`, `d_doubleprime`, `rho1`, `residual`,
/// `balance_gap` and the remaining diagnostics.
pub fn decompose_report(g: &Graph, gap_min: f64) -> Result<(DegreeSplit, Diagnostics, Value)> {
    let (split, diag) = rank2_decompose(g, &DecomposeOptions { gap_min })?;
    let report = json!({
        "alpha": split.alpha,
        "d_prime": split.d_prime,
        "d_doubleprime": split.d_doubleprime,
        "rho1": diag.rho1,
        "residual": diag.residual,
        "balance_gap": diag.balance_gap,
        "alpha_search": diag.alpha_search,
        "eta": diag.eta,
        "rho_min": diag.rho_min,
        "frow_error": diag.frow_error,
    });
    Ok((split, diag, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    Degree,
    Spectral,
    Disc,
    Cut,
    DiscMu,
}

impl FromStr for DistanceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "degree" => DistanceKind::Degree,
            "spectral" => DistanceKind::Spectral,
            "disc" => DistanceKind::Disc,
            "cut" => DistanceKind::Cut,
            "disc-mu" => DistanceKind::DiscMu,
            other => return Err(Error::InvalidArgument(format!("unknown distance kind '{other}'"))),
        })
    }
}

impl DistanceKind {
    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Degree => "degree",
            DistanceKind::Spectral => "spectral",
            DistanceKind::Disc => "disc",
            DistanceKind::Cut => "cut",
            DistanceKind::DiscMu => "disc-mu",
        }
    }
}

/// `{"kind", "value", "lower_bound", "labeling"}` plus kind-specific fields.
pub fn distance_report(g1: &Graph, g2: &Graph, kind: DistanceKind, mode: Mode, labeling: Labeling) -> Result<Value> {
    let mut report = json!({ "kind": kind.name(), "labeling": labeling.name() });
    let map = report.as_object_mut().expect("object");
    match kind {
        DistanceKind::Degree => {
            map.insert("value".into(), json!(degree_distribution_distance(g1, g2)));
            map.insert("lower_bound".into(), json!(false));
            map.insert("labeling".into(), json!(Labeling::DegreeSorted.name()));
        }
        DistanceKind::Spectral => {
            let d = match labeling {
                Labeling::DegreeSorted => spectral_distance(g1, g2)?,
                Labeling::Identity => spectral_distance_with(g1, &labeling.of(g1), g2, &labeling.of(g2))?,
            };
            map.insert("value".into(), json!(d.value));
            map.insert("lower_bound".into(), json!(false));
            map.insert("degree_gap".into(), json!(d.degree_gap));
            map.insert("equal_measures".into(), json!(d.equal_measures));
            map.insert("cells".into(), json!(d.cells));
        }
        DistanceKind::Disc | DistanceKind::Cut | DistanceKind::DiscMu => {
            let r = match kind {
                DistanceKind::Disc => disc_distance_labeled(g1, g2, labeling, mode)?,
                DistanceKind::Cut => {
                    map.insert("labeling".into(), json!(Labeling::Identity.name()));
                    cut_distance(g1, g2, mode)?
                }
                _ => {
                    map.insert("labeling".into(), json!(Labeling::DegreeSorted.name()));
                    disc_mu(g1, g2, &average_measure(g1, g2)?, mode)?
                }
            };
            map.insert("value".into(), json!(r.value));
            map.insert("lower_bound".into(), json!(r.lower_bound));
            map.insert("witness".into(), json!({ "s": r.s, "t": r.t }));
        }
    }
    Ok(report)
}

/// Fixed weight shape for Chung–Lu sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightShape {
    /// `w ≡ c`.
    Constant(f64),
    /// `w ≡ f·n`: the edge density, not the degree, stays fixed.
    Scaled(f64),
    /// `w_i` linear from `lo` to `hi` across the vertices.
    Linear(f64, f64),
}

impl WeightShape {
    pub fn weights(&self, n: usize) -> Vec<f64> {
        match *self {
            WeightShape::Constant(c) => vec![c; n],
            WeightShape::Scaled(f) => vec![f * n as f64; n],
            WeightShape::Linear(lo, hi) => (0..n)
                .map(|i| {
                    if n == 1 {
                        lo
                    } else {
                        lo + (hi - lo) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

impl FromStr for WeightShape {
    type Err = Error;
    /// `const:C`, `scaled:F` or `linear:LO:HI`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("weight shape '{s}' is not const:C, scaled:F or linear:LO:HI"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
        match parts.as_slice() {
            ["const", c] => Ok(WeightShape::Constant(num(c)?)),
            ["scaled", f] => Ok(WeightShape::Scaled(num(f)?)),
            ["linear", lo, hi] => Ok(WeightShape::Linear(num(lo)?, num(hi)?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergeRow {
    pub n1: usize,
    pub n2: usize,
    pub seed: u64,
    pub d_deg: f64,
    pub d_disc: f64,
    pub eps1: f64,
    pub eps2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergeResult {
    pub rows: Vec<ConvergeRow>,
    /// `(n, median ε over seeds)` in the order of the sizes.
    pub median_eps: Vec<(usize, f64)>,
    /// `decreasing`, `non-increasing` or `not-monotone`.
    pub verdict: &'static str,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

pub fn trend_verdict(medians: &[f64]) -> &'static str {
    if medians.windows(2).all(|w| w[1] < w[0]) {
        "decreasing"
    } else if medians.windows(2).all(|w| w[1] <= w[0]) {
        "non-increasing"
    } else {
        "not-monotone"
    }
}

/// For each consecutive pair of sizes and each seed: degree distance,
/// sampled `disc_μ` under the averaged measure, and both spectral
/// certificates. Rows are sorted by `(n1, n2, seed)`.
pub fn converge(shape: &WeightShape, sizes: &[usize], seeds: &[u64], samples: usize) -> Result<ConvergeResult> {
    if sizes.len() < 2 {
        return Err(Error::NeedTwoSizes);
    }
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("need at least one seed".into()));
    }
    let mut cells: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    cells.sort_unstable();
    cells.dedup();
    let graphs: BTreeMap<(usize, u64), (Graph, f64)> = cells
        .par_iter()
        .map(|&(n, seed)| {
            let g = chung_lu(&shape.weights(n), seed)?;
            let eps = qr_epsilon_spectral(&g)?.epsilon;
            Ok(((n, seed), (g, eps)))
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize, u64)> = sizes
        .windows(2)
        .flat_map(|w| seeds.iter().map(move |&s| (w[0], w[1], s)))
        .collect();
    let mut rows: Vec<ConvergeRow> = jobs
        .par_iter()
        .map(|&(n1, n2, seed)| {
            let (g1, eps1) = &graphs[&(n1, seed)];
            let (g2, eps2) = &graphs[&(n2, seed)];
            let mu = average_measure(g1, g2)?;
            let d_disc = disc_mu(g1, g2, &mu, Mode::Sampled { samples, seed })?.value;
            Ok(ConvergeRow {
                n1,
                n2,
                seed,
                d_deg: degree_distribution_distance(g1, g2),
                d_disc,
                eps1: *eps1,
                eps2: *eps2,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|a| (a.n1, a.n2, a.seed));
    let mut median_eps = Vec::new();
    for &n in sizes {
        let mut e: Vec<f64> = seeds.iter().map(|&s| graphs[&(n, s)].1).collect();
        median_eps.push((n, median(&mut e)));
    }
    let verdict = trend_verdict(&median_eps.iter().map(|p| p.1).collect::<Vec<_>>());
    Ok(ConvergeResult {
        rows,
        median_eps,
        verdict,
    })
}

/// CSV with metadata and trend as `#` comment lines around the table.
pub fn converge_csv(result: &ConvergeResult, meta: &Metadata) -> String {
    let mut out = meta.comment_lines();
    out.push_str("n1,n2,seed,d_deg,d_disc,eps1,eps2\n");
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n1, r.n2, r.seed, r.d_deg, r.d_disc, r.eps1, r.eps2
        );
    }
    for (n, m) in &result.median_eps {
        let _ = writeln!(out, "# median_eps n={n} {m}");
    }
    let _ = writeln!(out, "# trend={}", result.verdict);
    out
}

pub fn converge_json(result: &ConvergeResult, meta: &Metadata) -> Value {
    with_metadata(serde_json::to_value(result).expect("result serializes"), meta)
}
