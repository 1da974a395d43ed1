//! Degree splits and unions of quasirandom parts.
//!
//! A split `d = d₁ + … + d_k` with `d_j ≥ 0` defines the model adjacency
//! `Σ_j D_j J D_j / vol_j` and the normalized model
//! `X = D^{-1/2} (Σ_j D_j J D_j / vol_j) D^{-1/2}`. For `k = 2` the nonzero
//! spectrum of `X` is `{1, η}` in closed form. [`rank2_decompose`] goes the
//! other way: from a graph whose normalized adjacency has one large nontrivial
//! eigenvalue it builds a split whose model explains the graph.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lift::StepMeasure;
use crate::quasirandom::qr_epsilon_spectral;
use crate::spectral::{residual_norm, spectrum, symmetric_eigen, Approximant};

const SPLIT_TOL: f64 = 1e-10;
pub const DEFAULT_GAP_MIN: f64 = 1e-6;
const BISECTION_STEPS: usize = 200;
const BISECTION_TOL: f64 = 1e-12;

/// `d(v) = d'(v) + d''(v)` with `Σ d' = α vol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSplit {
    pub d_prime: Vec<f64>,
    pub d_doubleprime: Vec<f64>,
    pub alpha: f64,
}

impl DegreeSplit {
    /// Split with first part `d_prime`; the second part is `d − d'`.
    pub fn new(g: &Graph, d_prime: Vec<f64>) -> Result<Self> {
        if d_prime.len() != g.n() {
            return Err(Error::InvalidSplit(format!(
                "{} entries for {} vertices",
                d_prime.len(),
                g.n()
            )));
        }
        let mut d_doubleprime = Vec::with_capacity(g.n());
        for (v, &x) in d_prime.iter().enumerate() {
            let d = g.degree(v);
            let tol = SPLIT_TOL * d;
            if !x.is_finite() || x < -tol || x > d + tol {
                return Err(Error::InvalidSplit(format!("d'({v}) = {x} outside [0, {d}]")));
            }
            d_doubleprime.push((d - x).max(0.0));
        }
        let alpha = d_prime.iter().sum::<f64>() / g.volume();
        Ok(DegreeSplit {
            d_prime,
            d_doubleprime,
            alpha,
        })
    }

    pub fn volumes(&self) -> (f64, f64) {
        (self.d_prime.iter().sum(), self.d_doubleprime.iter().sum())
    }

    pub fn swapped(&self) -> Self {
        DegreeSplit {
            d_prime: self.d_doubleprime.clone(),
            d_doubleprime: self.d_prime.clone(),
            alpha: 1.0 - self.alpha,
        }
    }

    pub fn to_rank_k(&self) -> RankKSplit {
        RankKSplit {
            parts: vec![self.d_prime.clone(), self.d_doubleprime.clone()],
        }
    }
}

/// `d = Σ_j d_j` with every `d_j ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankKSplit {
    pub parts: Vec<Vec<f64>>,
}

impl RankKSplit {
    pub fn new(g: &Graph, parts: Vec<Vec<f64>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidSplit("a split needs at least one part".into()));
        }
        for (j, p) in parts.iter().enumerate() {
            if p.len() != g.n() {
                return Err(Error::InvalidSplit(format!(
                    "part {j} has {} entries for {} vertices",
                    p.len(),
                    g.n()
                )));
            }
            if let Some(v) = p.iter().position(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidSplit(format!("part {j} is negative at vertex {v}")));
            }
        }
        for v in 0..g.n() {
            let s: f64 = parts.iter().map(|p| p[v]).sum();
            if (s - g.degree(v)).abs() > SPLIT_TOL * g.degree(v).max(1.0) {
                return Err(Error::InvalidSplit(format!(
                    "parts sum to {s} at vertex {v}, degree is {}",
                    g.degree(v)
                )));
            }
        }
        Ok(RankKSplit { parts })
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn volumes(&self) -> Vec<f64> {
        self.parts.iter().map(|p| p.iter().sum()).collect()
    }

    /// `Σ_j d_j d_jᵀ / vol_j`.
    pub fn approximant(&self) -> Result<Approximant> {
        let vols = self.volumes();
        if let Some(j) = vols.iter().position(|v| *v <= 0.0) {
            return Err(Error::DegeneratePart(j));
        }
        Ok(Approximant::LowRank {
            vectors: self.parts.iter().map(|p| DVector::from_column_slice(p)).collect(),
            coefficients: DMatrix::from_diagonal(&DVector::from_iterator(vols.len(), vols.iter().map(|v| 1.0 / v))),
        })
    }
}

/// Dense `X = D^{-1/2}(Σ_j D_j J D_j / vol_j)D^{-1/2}`.
pub fn model_matrix(g: &Graph, split: &RankKSplit) -> Result<DMatrix<f64>> {
    let b = split.approximant()?.to_dense();
    let s: Vec<f64> = g.degrees().iter().map(|d| d.sqrt().recip()).collect();
    Ok(DMatrix::from_fn(g.n(), g.n(), |i, j| s[i] * b[(i, j)] * s[j]))
}

/// Second eigenpair of the rank-2 model: `η = 1 − (Σ d'd''/d)·vol/(vol' vol'')`
/// and `ξ = D^{-1/2}(d'/vol' − d''/vol'')`.
pub fn rank2_eta_xi(g: &Graph, split: &DegreeSplit) -> Result<(f64, Vec<f64>)> {
    let (v1, v2) = split.volumes();
    if v1 <= 0.0 {
        return Err(Error::DegeneratePart(0));
    }
    if v2 <= 0.0 {
        return Err(Error::DegeneratePart(1));
    }
    let d = g.degrees();
    let cross: f64 = (0..g.n())
        .map(|v| split.d_prime[v] * split.d_doubleprime[v] / d[v])
        .sum();
    let eta = 1.0 - cross * g.volume() / (v1 * v2);
    let xi: Vec<f64> = (0..g.n())
        .map(|v| (split.d_prime[v] / v1 - split.d_doubleprime[v] / v2) / d[v].sqrt())
        .collect();
    // X ξ through the two rank-1 terms.
    let c1: f64 = (0..g.n()).map(|v| split.d_prime[v] * xi[v] / d[v].sqrt()).sum::<f64>() / v1;
    let c2: f64 = (0..g.n())
        .map(|v| split.d_doubleprime[v] * xi[v] / d[v].sqrt())
        .sum::<f64>()
        / v2;
    let scale = xi.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let err = (0..g.n())
        .map(|v| ((c1 * split.d_prime[v] + c2 * split.d_doubleprime[v]) / d[v].sqrt() - eta * xi[v]).powi(2))
        .sum::<f64>()
        .sqrt();
    if err > 1e-9 * scale {
        return Err(Error::NumericalFailure(format!(
            "rank-2 eigenvector check failed by {err:e}"
        )));
    }
    Ok((eta, xi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionReport {
    pub eps_first: f64,
    pub eps_second: f64,
    /// `eps_first + eps_second`.
    pub eps: f64,
    pub eta: f64,
    pub rho0: f64,
    pub rho1: f64,
    /// `max_{i≥2} |ρ_i|`.
    pub rest: f64,
    /// `1 − |⟨φ₁, ξ/‖ξ‖⟩|`.
    pub alignment_defect: f64,
    /// `min ‖φ₁ ∓ ξ/‖ξ‖‖`.
    pub alignment_distance: f64,
    pub rho0_is_one: bool,
    pub rho1_near_eta: bool,
    pub rest_small: bool,
    pub aligned: bool,
}

impl UnionReport {
    pub fn all_pass(&self) -> bool {
        self.rho0_is_one && self.rho1_near_eta && self.rest_small && self.aligned
    }
}

/// Spectrum of `G₁ ∪ G₂` against the rank-2 model of the split
/// `d' = d_{G₁}`, with slack `ε = ε₁ + ε₂` from the two certificates.
pub fn union_spectrum_check(g1: &Graph, g2: &Graph) -> Result<UnionReport> {
    let union = g1.union(g2)?;
    let eps_first = qr_epsilon_spectral(g1)?.epsilon;
    let eps_second = qr_epsilon_spectral(g2)?.epsilon;
    let eps = eps_first + eps_second;
    let split = DegreeSplit::new(&union, g1.degrees().to_vec())?;
    let (eta, xi) = rank2_eta_xi(&union, &split)?;
    let spec = spectrum(&union)?;
    let rho0 = spec.rho[0];
    let rho1 = spec.rho.get(1).copied().unwrap_or(0.0);
    let rest = spec.rho.iter().skip(2).fold(0.0_f64, |m, r| m.max(r.abs()));
    let xi_norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (defect, distance) = if xi_norm > 0.0 && spec.len() > 1 {
        let phi1 = spec.vector(1);
        let ip: f64 = phi1.iter().zip(&xi).map(|(a, b)| a * b / xi_norm).sum();
        let defect = (1.0 - ip.abs()).max(0.0);
        // Measured directly: sqrt(2·defect) loses half the digits near zero.
        let sign = if ip < 0.0 { -1.0 } else { 1.0 };
        let distance = phi1
            .iter()
            .zip(&xi)
            .map(|(a, b)| (a - sign * b / xi_norm).powi(2))
            .sum::<f64>()
            .sqrt();
        (defect, distance)
    } else {
        (1.0, std::f64::consts::SQRT_2)
    };
    Ok(UnionReport {
        eps_first,
        eps_second,
        eps,
        eta,
        rho0,
        rho1,
        rest,
        alignment_defect: defect,
        alignment_distance: distance,
        rho0_is_one: (rho0 - 1.0).abs() <= 1e-9,
        rho1_near_eta: (rho1 - eta).abs() <= eps + 1e-9,
        rest_small: rest <= eps + 1e-9,
        aligned: distance <= eps + 1e-9,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    pub gap_min: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            gap_min: DEFAULT_GAP_MIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `Σ d' / vol` of the returned split.
    pub alpha: f64,
    /// The balance point found by bisection (after canonicalization).
    pub alpha_search: f64,
    pub rho1: f64,
    pub rho_min: f64,
    /// `η` of the returned split.
    pub eta: f64,
    /// `‖D^{-1/2}(A − D'JD'/vol' − D''JD''/vol'')D^{-1/2}‖`.
    pub residual: f64,
    /// `|1 − ρ₁ − Σ f₁f₂/d / (α(1−α)vol)|` at the balance point.
    pub frow_error: f64,
    /// `(Σ_X |f₁| − Σ_Y |f₂|) / vol` at the balance point.
    pub balance_gap: f64,
}

/// Splits a graph into two quasirandom parts using its second eigenpair.
///
/// With `ρ₁`, `φ₁` the second eigenpair of `M` and
/// `w = D^{1/2}φ₁ sqrt(ρ₁ vol)`, set `f₁ = αd − sqrt(α(1−α)) w` and
/// `f₂ = d − f₁`. The returned split is `d' = f₁` except `0` where `f₁ < 0`
/// and `d` where `f₂ < 0`, for the `α` balancing the two clipped masses.
/// The balance function is positive near 0 and negative near 1; `α` is the
/// midpoint of its sign change, which keeps the result symmetric under
/// `φ₁ → −φ₁`. Output is canonicalized to `α ≤ 1/2`.
pub fn rank2_decompose(g: &Graph, options: &DecomposeOptions) -> Result<(DegreeSplit, Diagnostics)> {
    let (_, count) = g.components();
    if count > 1 {
        return Err(Error::NotConnected { components: count });
    }
    let spec = spectrum(g)?;
    if spec.len() < 2 {
        return Err(Error::SpectralGapTooSmall {
            rho1: 0.0,
            gap_min: options.gap_min,
        });
    }
    let rho1 = spec.rho[1];
    let rho_min = spec.rho[spec.len() - 1];
    if rho1 <= options.gap_min {
        return Err(Error::SpectralGapTooSmall {
            rho1,
            gap_min: options.gap_min,
        });
    }
    if rho1 >= 1.0 - options.gap_min {
        return Err(Error::NearlyDisconnected {
            rho1,
            gap_min: options.gap_min,
        });
    }
    if rho_min < -rho1 {
        return Err(Error::NegativeSpectrum { rho1, rho_min });
    }
    let mut phi1 = spec.vector(1);
    let (mut imax, mut vmax) = (0, 0.0);
    for (i, x) in phi1.iter().enumerate() {
        if x.abs() > vmax {
            (imax, vmax) = (i, x.abs());
        }
    }
    if phi1[imax] < 0.0 {
        phi1.iter_mut().for_each(|x| *x = -*x);
    }
    let mut out = rank2_decompose_with_vector(g, rho1, &phi1)?;
    out.1.rho_min = rho_min;
    Ok(out)
}

/// [`rank2_decompose`] from a given unit eigenvector `phi1` of `M` with
/// eigenvalue `rho1`, used as is (no sign normalization).
pub fn rank2_decompose_with_vector(g: &Graph, rho1: f64, phi1: &[f64]) -> Result<(DegreeSplit, Diagnostics)> {
    let n = g.n();
    let d = g.degrees();
    let vol = g.volume();
    let c = (rho1 * vol).sqrt();
    let w: Vec<f64> = (0..n).map(|v| d[v].sqrt() * phi1[v] * c).collect();
    let f1 = |alpha: f64| -> Vec<f64> {
        let s = (alpha * (1.0 - alpha)).sqrt();
        (0..n).map(|v| alpha * d[v] - s * w[v]).collect()
    };
    let balance = |alpha: f64| -> f64 {
        let f = f1(alpha);
        let mut g = 0.0;
        for v in 0..n {
            let f2 = d[v] - f[v];
            if f[v] < 0.0 {
                g -= f[v];
            } else if f2 < 0.0 {
                g += f2;
            }
        }
        g
    };
    let (lo, hi) = (BISECTION_TOL, 1.0 - BISECTION_TOL);
    if !(balance(lo) > 0.0 && balance(hi) < 0.0) {
        return Err(Error::BalanceNotBracketed);
    }
    // Last point with g > 0 and first point with g < 0.
    let bisect = |positive_side: &dyn Fn(f64) -> bool| -> f64 {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..BISECTION_STEPS {
            if b - a <= BISECTION_TOL {
                break;
            }
            let m = 0.5 * (a + b);
            if positive_side(m) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let left = bisect(&|a| balance(a) > 0.0);
    let right = bisect(&|a| balance(a) >= 0.0);
    let alpha_star = 0.5 * (left + right);
    let f = f1(alpha_star);
    let d_prime: Vec<f64> = (0..n)
        .map(|v| {
            if f[v] < 0.0 {
                0.0
            } else if d[v] - f[v] < 0.0 {
                d[v]
            } else {
                f[v]
            }
        })
        .collect();
    let frow = {
        let s: f64 = (0..n).map(|v| f[v] * (d[v] - f[v]) / d[v]).sum();
        (1.0 - rho1 - s / (alpha_star * (1.0 - alpha_star) * vol)).abs()
    };
    let mut split = DegreeSplit::new(g, d_prime)?;
    let mut alpha_search = alpha_star;
    let balance_gap = balance(alpha_star) / vol;
    if should_swap(&split) {
        split = split.swapped();
        alpha_search = 1.0 - alpha_star;
    }
    let (eta, _) = rank2_eta_xi(g, &split)?;
    let residual = residual_norm(g, &split.to_rank_k().approximant()?)?;
    let diagnostics = Diagnostics {
        alpha: split.alpha,
        alpha_search,
        rho1,
        rho_min: f64::NAN,
        eta,
        residual,
        frow_error: frow,
        balance_gap,
    };
    Ok((split, diagnostics))
}

/// Canonical order: `α < 1/2`, or at `α = 1/2` the part that is larger at the
/// first vertex where they differ comes first.
fn should_swap(split: &DegreeSplit) -> bool {
    if (split.alpha - 0.5).abs() > 1e-12 {
        return split.alpha > 0.5;
    }
    for (a, b) in split.d_prime.iter().zip(&split.d_doubleprime) {
        if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1e-300) {
            return a < b;
        }
    }
    false
}

/// The two limiting measures of a rank-2 split:
/// `μ₁ = μ + sqrt((1−α)ρ/α) μ φ₁` and `μ₂ = μ − sqrt(αρ/(1−α)) μ φ₁`, where
/// `φ₁` is the second eigenfunction of `Δ` with `‖φ₁‖_μ = 1`, oriented toward
/// `d'/vol' − d''/vol''`. They satisfy `α μ₁ + (1−α) μ₂ = μ`. Both are lifted
/// with the identity labeling.
pub fn split_measures(g: &Graph, split: &DegreeSplit) -> Result<(StepMeasure, StepMeasure)> {
    let spec = spectrum(g)?;
    if spec.len() < 2 {
        return Err(Error::InvalidSplit(
            "a single vertex has no second eigenfunction".into(),
        ));
    }
    let rho = spec.rho[1];
    let alpha = split.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidSplit(format!("alpha = {alpha} is not in (0, 1)")));
    }
    if rho <= 0.0 {
        return Err(Error::InvalidSplit(format!("second eigenvalue {rho} is not positive")));
    }
    let mut phi = spec.combinatorial(1);
    let (v1, v2) = split.volumes();
    let toward: f64 = (0..g.n())
        .map(|v| phi[v] * (split.d_prime[v] / v1 - split.d_doubleprime[v] / v2))
        .sum();
    if toward < 0.0 {
        phi.iter_mut().for_each(|x| *x = -*x);
    }
    let n = g.n() as f64;
    let c1 = ((1.0 - alpha) * rho / alpha).sqrt();
    let c2 = (alpha * rho / (1.0 - alpha)).sqrt();
    let mut m1 = Vec::with_capacity(g.n());
    let mut m2 = Vec::with_capacity(g.n());
    for (v, p) in phi.iter().enumerate() {
        let mu = g.degree(v) / g.volume();
        m1.push(mu * (1.0 + c1 * p));
        m2.push(mu * (1.0 - c2 * p));
    }
    let finish = |m: Vec<f64>, which: usize| -> Result<StepMeasure> {
        if let Some(v) = m.iter().position(|x| *x < -1e-9) {
            return Err(Error::InvalidSplit(format!(
                "measure {which} is negative ({}) at vertex {v}",
                m[v]
            )));
        }
        let clamped: Vec<f64> = m.iter().map(|x| x.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        let densities = clamped.iter().map(|x| n * x / total).collect();
        StepMeasure::new(
            (0..=g.n())
                .map(|i| if i == g.n() { 1.0 } else { i as f64 / n })
                .collect(),
            densities,
        )
    };
    Ok((finish(m1, 1)?, finish(m2, 2)?))
}

/// `M(i, j) = Σ_v d_i(v) d_j(v) / d(v)`.
pub fn rank_k_matrix(g: &Graph, split: &RankKSplit) -> DMatrix<f64> {
    let k = split.k();
    let d = g.degrees();
    DMatrix::from_fn(k, k, |i, j| {
        (0..g.n()).map(|v| split.parts[i][v] * split.parts[j][v] / d[v]).sum()
    })
}

/// Eigenpairs `(η_i, ξ_i)` of the model `X`, one per part, sorted descending.
///
/// The nonzero spectrum of `X` is that of `V^{-1/2} M V^{-1/2}` with
/// `V = diag(vol_j)`. For its eigenvector `w` put `ψ = V^{1/2} w`; then
/// `ξ = Σ_j ψ_j d_j D^{-1/2} / vol_j` is an eigenvector of `X`, returned with
/// unit length (or zero when `η = 0`).
pub fn rank_k_eigs(g: &Graph, split: &RankKSplit) -> Result<Vec<(f64, Vec<f64>)>> {
    let vols = split.volumes();
    if let Some(j) = vols.iter().position(|v| *v <= 0.0) {
        return Err(Error::DegeneratePart(j));
    }
    let m = rank_k_matrix(g, split);
    let k = split.k();
    let sym = DMatrix::from_fn(k, k, |i, j| m[(i, j)] / (vols[i] * vols[j]).sqrt());
    let sym = 0.5 * (&sym + sym.transpose());
    let (eta, w) = symmetric_eigen(sym)?;
    let d = g.degrees();
    let mut out = Vec::with_capacity(k);
    for (i, &e) in eta.iter().enumerate() {
        let psi: Vec<f64> = (0..k).map(|j| w[(j, i)] * vols[j].sqrt()).collect();
        let mut xi: Vec<f64> = (0..g.n())
            .map(|v| (0..k).map(|j| psi[j] * split.parts[j][v] / vols[j]).sum::<f64>() / d[v].sqrt())
            .collect();
        let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            xi.iter_mut().for_each(|x| *x /= norm);
        }
        out.push((e, xi));
    }
    Ok(out)
}

/// `‖D^{-1/2}(A − Σ_j D_j J D_j / vol_j)D^{-1/2}‖`.
pub fn rank_k_residual(g: &Graph, split: &RankKSplit) -> Result<f64> {
    residual_norm(g, &split.approximant()?)
}

/// `E(S,S) − Σ_j vol_j(S)² / vol_j`, the deviation of a subset's internal
/// edge mass from the split model.
pub fn split_subset_deviation(g: &Graph, split: &RankKSplit, s: &[usize]) -> f64 {
    let vols = split.volumes();
    let model: f64 = split
        .parts
        .iter()
        .zip(&vols)
        .map(|(p, vol)| {
            let vs: f64 = s.iter().map(|&v| p[v]).sum();
            vs * vs / vol
        })
        .sum();
    g.incidence(s, s) - model
}

/// Graph whose adjacency is exactly `Σ_j d_j d_jᵀ / vol_j` (loops included).
pub fn exact_model_graph(parts: &[Vec<f64>]) -> Result<Graph> {
    let n = parts.first().map_or(0, |p| p.len());
    let mut a = DMatrix::zeros(n, n);
    for p in parts {
        let vol: f64 = p.iter().sum();
        if vol <= 0.0 {
            return Err(Error::InvalidSplit("part with zero volume".into()));
        }
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += p[i] * p[j] / vol;
            }
        }
    }
    let a = 0.5 * (&a + a.transpose());
    Graph::from_dense(&a, crate::graph::GraphOptions::with_loops())
}
