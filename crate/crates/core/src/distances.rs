//! Distances between graphs, possibly of different sizes.
//!
//! Both graphs are lifted to a common grid of equal cells (see [`crate::lift`]).
//! On that grid a lifted graph is a vector of cell masses `w` and a kernel
//! `B` with `⟨f, (I − Δ) g⟩_μ = fᵀ B g`, so each distance is a small dense
//! linear algebra or subset maximization problem.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lift::{common_cells, lift_measure, LabelingMap, LiftedOperator, StepMeasure};
use crate::spectral::symmetric_eigen;
use crate::subsets::{Form, MaxResult, Mode, Problem};

/// Tolerance for treating two lifted measures as equal, per cell mass.
const MEASURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Labeling {
    /// Vertices sorted by degree ascending, ties by id.
    #[default]
    DegreeSorted,
    /// Vertex `v` at position `v`; meaningful for graphs on a shared vertex set.
    Identity,
}

impl Labeling {
    pub fn of(self, g: &Graph) -> LabelingMap {
        match self {
            Labeling::DegreeSorted => LabelingMap::degree_sorted(g),
            Labeling::Identity => LabelingMap::identity(g.n()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Labeling::DegreeSorted => "degree-sorted",
            Labeling::Identity => "identity",
        }
    }
}

/// `∫₀¹ |μ₁ − μ₂|` for the degree-sorted lifts, which attain the infimum over
/// all labelings (sorted rearrangements minimize the L1 distance).
pub fn degree_distribution_distance(g1: &Graph, g2: &Graph) -> f64 {
    let a = lift_measure(g1, &LabelingMap::degree_sorted(g1));
    let b = lift_measure(g2, &LabelingMap::degree_sorted(g2));
    a.l1_distance(&b)
}

/// Both graphs lifted onto their common grid.
pub fn lift_pair(g1: &Graph, g2: &Graph, labeling: Labeling) -> Result<(LiftedOperator, LiftedOperator)> {
    lift_pair_with(g1, &labeling.of(g1), g2, &labeling.of(g2))
}

pub fn lift_pair_with(
    g1: &Graph,
    l1: &LabelingMap,
    g2: &Graph,
    l2: &LabelingMap,
) -> Result<(LiftedOperator, LiftedOperator)> {
    let cells = common_cells(g1.n(), g2.n())?;
    Ok((LiftedOperator::new(g1, l1, cells)?, LiftedOperator::new(g2, l2, cells)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDistance {
    /// Exact distance when `equal_measures`, otherwise the bound computed
    /// under the averaged measure.
    pub value: f64,
    /// `∫₀¹ |μ₁ − μ₂|` of the two lifts used.
    pub degree_gap: f64,
    pub equal_measures: bool,
    pub cells: usize,
}

/// Spectral distance for the degree-sorted labelings.
///
/// The difference of the two lifted operators is the integral operator with
/// kernel `B₂ − B₁`, constant on cell pairs. Averaging `f` and `g` over each
/// cell leaves `⟨f, (B₂ − B₁) g⟩` unchanged and does not increase their
/// norms, so the supremum over all test functions equals the supremum over
/// step functions on the grid. With a shared measure `w` this is the largest
/// singular value of `w^{-1/2}(B₁ − B₂)w^{-1/2}`. For different measures the
/// same quantity is evaluated under `(w₁ + w₂)/2` and returned together with
/// the degree gap.
pub fn spectral_distance(g1: &Graph, g2: &Graph) -> Result<SpectralDistance> {
    spectral_distance_with(g1, &LabelingMap::degree_sorted(g1), g2, &LabelingMap::degree_sorted(g2))
}

pub fn spectral_distance_with(g1: &Graph, l1: &LabelingMap, g2: &Graph, l2: &LabelingMap) -> Result<SpectralDistance> {
    let (a, b) = lift_pair_with(g1, l1, g2, l2)?;
    spectral_distance_cells(&a, &b)
}

pub fn spectral_distance_cells(a: &LiftedOperator, b: &LiftedOperator) -> Result<SpectralDistance> {
    let n = a.cells();
    let equal = a
        .masses
        .iter()
        .zip(&b.masses)
        .all(|(x, y)| (x - y).abs() <= MEASURE_TOL * x.max(*y).max(1.0 / n as f64));
    let degree_gap: f64 = a.masses.iter().zip(&b.masses).map(|(x, y)| (x - y).abs()).sum();
    let s: Vec<f64> = a
        .masses
        .iter()
        .zip(&b.masses)
        .map(|(x, y)| {
            if equal {
                x.sqrt().recip()
            } else {
                (0.5 * (x + y)).sqrt().recip()
            }
        })
        .collect();
    let diff = DMatrix::from_fn(n, n, |i, j| s[i] * (a.kernel[(i, j)] - b.kernel[(i, j)]) * s[j]);
    let value = if diff.iter().all(|x| *x == 0.0) {
        0.0
    } else {
        let (rho, _) = symmetric_eigen(diff)?;
        rho[0].abs().max(rho[n - 1].abs())
    };
    Ok(SpectralDistance {
        value,
        degree_gap,
        equal_measures: equal,
        cells: n,
    })
}

/// Smallest spectral distance over all labelings of `g2`, with `g1` kept
/// degree-sorted. Lossless for graphs of equal size; an upper bound otherwise.
pub fn spectral_distance_exhaustive(g1: &Graph, g2: &Graph) -> Result<SpectralDistance> {
    const LIMIT: usize = 7;
    if g1.n() > LIMIT || g2.n() > LIMIT {
        return Err(Error::InvalidArgument(format!(
            "exhaustive labeling search is limited to {LIMIT} vertices"
        )));
    }
    let l1 = LabelingMap::degree_sorted(g1);
    let mut order: Vec<usize> = (0..g2.n()).collect();
    let mut best: Option<SpectralDistance> = None;
    loop {
        let d = spectral_distance_with(g1, &l1, g2, &LabelingMap::from_order(&order)?)?;
        if best.as_ref().is_none_or(|b| d.value < b.value) {
            best = Some(d);
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(best.expect("at least one labeling"))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `max |E₁(S,T)/sqrt(vol₁(S) vol₁(T)) − E₂(S,T)/sqrt(vol₂(S) vol₂(T))|` over
/// nonempty cell sets of the common grid.
pub fn disc_distance(g1: &Graph, g2: &Graph, mode: Mode) -> Result<MaxResult> {
    disc_distance_labeled(g1, g2, Labeling::DegreeSorted, mode)
}

pub fn disc_distance_labeled(g1: &Graph, g2: &Graph, labeling: Labeling, mode: Mode) -> Result<MaxResult> {
    let (a, b) = lift_pair(g1, g2, labeling)?;
    disc_distance_cells(&a, &b, mode)
}

pub fn disc_distance_cells(a: &LiftedOperator, b: &LiftedOperator, mode: Mode) -> Result<MaxResult> {
    let lin = vec![a.masses.clone(), b.masses.clone()];
    Problem {
        size: a.cells(),
        forms: vec![Form::Dense(a.kernel.clone()), Form::Dense(b.kernel.clone())],
        s_linear: lin.clone(),
        t_linear: lin,
        eval: Box::new(|x, s, t| {
            let r1 = x[0] / (s[0] * t[0]).sqrt();
            let r2 = x[1] / (s[1] * t[1]).sqrt();
            Some((r1 - r2).abs())
        }),
    }
    .maximize(mode)
}

/// `max (1/sqrt(μ(S)μ(T))) |⟨χ_S, (Δ₁ − Δ₂) χ_T⟩_μ|` for a step measure `μ`.
pub fn disc_mu(g1: &Graph, g2: &Graph, mu: &StepMeasure, mode: Mode) -> Result<MaxResult> {
    let cells = common_cells(common_cells(g1.n(), g2.n())?, mu.cells())?;
    let a = LiftedOperator::new(g1, &LabelingMap::degree_sorted(g1), cells)?;
    let b = LiftedOperator::new(g2, &LabelingMap::degree_sorted(g2), cells)?;
    disc_mu_cells(&a, &b, &mu.refine(cells)?.masses(), mode)
}

/// Average of the two degree-sorted lifted measures on the common grid.
pub fn average_measure(g1: &Graph, g2: &Graph) -> Result<StepMeasure> {
    let (a, b) = lift_pair(g1, g2, Labeling::DegreeSorted)?;
    let masses: Vec<f64> = a.masses.iter().zip(&b.masses).map(|(x, y)| 0.5 * (x + y)).collect();
    let total: f64 = masses.iter().sum();
    StepMeasure::from_cell_masses(&masses.iter().map(|m| m / total).collect::<Vec<_>>())
}

/// `disc_mu` on lifted cell data with cell masses `mu`.
pub fn disc_mu_cells(a: &LiftedOperator, b: &LiftedOperator, mu: &[f64], mode: Mode) -> Result<MaxResult> {
    let n = a.cells();
    if mu.len() != n || mu.iter().any(|m| *m <= 0.0) {
        return Err(Error::InvalidArgument(
            "disc_mu needs a positive measure on the common grid".into(),
        ));
    }
    // ⟨χ_S, (Δ₁ − Δ₂) χ_T⟩_μ = χ_Sᵀ diag(μ)(w₂⁻¹B₂ − w₁⁻¹B₁) χ_T
    let k = DMatrix::from_fn(n, n, |i, j| {
        mu[i] * (b.kernel[(i, j)] / b.masses[i] - a.kernel[(i, j)] / a.masses[i])
    });
    Problem {
        size: n,
        forms: vec![Form::Dense(k)],
        s_linear: vec![mu.to_vec()],
        t_linear: vec![mu.to_vec()],
        eval: Box::new(|x, s, t| Some(x[0].abs() / (s[0] * t[0]).sqrt())),
    }
    .maximize(mode)
}

/// `(1/n²) max |E₁(S,T) − E₂(S,T)|` on a shared vertex set.
pub fn cut_distance(g1: &Graph, g2: &Graph, mode: Mode) -> Result<MaxResult> {
    let n = g1.n();
    if g2.n() != n {
        return Err(Error::VertexCountMismatch { left: n, right: g2.n() });
    }
    let diff = g1.adjacency_matrix() - g2.adjacency_matrix();
    let scale = 1.0 / (n * n) as f64;
    Problem {
        size: n,
        forms: vec![Form::Dense(diff)],
        s_linear: vec![],
        t_linear: vec![],
        eval: Box::new(move |x, _, _| Some(x[0].abs() * scale)),
    }
    .maximize(mode)
}

/// Rounds each entry down in magnitude to a power of 4/5:
/// `h = sign(f)·(4/5)^k` with `(4/5)^k ≤ |f| < (4/5)^{k−1}`, and `h = 0` where
/// `f = 0`. Then `|f − h| ≤ |f|/5`, so `‖f − h‖_μ ≤ ‖f‖_μ/5` and
/// `‖h‖_μ ≤ ‖f‖_μ`. Exact powers are fixed points.
pub fn quantize_four_fifths(f: &[f64], mu: &StepMeasure) -> Result<Vec<f64>> {
    if f.len() != mu.cells() {
        return Err(Error::InvalidArgument(format!(
            "vector has {} cells, measure has {}",
            f.len(),
            mu.cells()
        )));
    }
    Ok(f.iter().map(|&x| quantize_one(x)).collect())
}

fn quantize_one(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { 0.0 } else { x };
    }
    let a = x.abs();
    let q: f64 = 0.8;
    let mut k = (a.ln() / q.ln()).ceil() as i32;
    while q.powi(k) > a {
        k += 1;
    }
    while q.powi(k - 1) <= a {
        k -= 1;
    }
    x.signum() * q.powi(k)
}

/// `‖f‖_μ` for a cell vector against the cell masses of `mu`.
pub fn cell_mu_norm(f: &[f64], mu: &StepMeasure) -> f64 {
    f.iter().zip(mu.masses()).map(|(x, m)| x * x * m).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub eps_disc: f64,
    pub eps_spec: f64,
    pub degree_gap: f64,
    pub equal_measures: bool,
    pub cells: usize,
    /// `ε_disc ≤ ε_spec + 4·degree_gap`.
    pub forward_holds: bool,
    /// `ε_disc < 0.02`, where the reverse bound applies.
    pub reverse_applies: bool,
    /// `ε_spec ≤ 20 ε_disc ln(1/ε_disc)`; true when it does not apply.
    pub reverse_holds: bool,
    pub reverse_bound: f64,
}

/// Reverse bound `20 ε ln(1/ε)`, continuous at `ε = 0`.
pub fn reverse_bound(eps: f64) -> f64 {
    if eps <= 0.0 {
        0.0
    } else {
        20.0 * eps * (1.0 / eps).ln()
    }
}

/// Exact discrepancy distance against the spectral distance on the
/// degree-sorted lifts, with both comparison bounds evaluated.
pub fn equivalence_check(g1: &Graph, g2: &Graph) -> Result<EquivalenceReport> {
    equivalence_check_labeled(g1, g2, Labeling::DegreeSorted)
}

pub fn equivalence_check_labeled(g1: &Graph, g2: &Graph, labeling: Labeling) -> Result<EquivalenceReport> {
    let (a, b) = lift_pair(g1, g2, labeling)?;
    let disc = disc_distance_cells(&a, &b, Mode::Exact)?.value;
    let spec = spectral_distance_cells(&a, &b)?;
    let reverse_applies = disc < 0.02;
    let bound = reverse_bound(disc);
    Ok(EquivalenceReport {
        eps_disc: disc,
        eps_spec: spec.value,
        degree_gap: spec.degree_gap,
        equal_measures: spec.equal_measures,
        cells: spec.cells,
        forward_holds: disc <= spec.value + 4.0 * spec.degree_gap + 1e-9,
        reverse_applies,
        reverse_holds: !reverse_applies || spec.value <= bound + 1e-9,
        reverse_bound: bound,
    })
}
