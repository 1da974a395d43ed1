//! Eigenvalues of the normalized adjacency `M = D^{-1/2} A D^{-1/2}`.
//!
//! Graphs with at most [`DENSE_LIMIT`] vertices get a full dense symmetric
//! eigendecomposition. Larger graphs go through a Lanczos iteration with full
//! reorthogonalization that returns only extremal eigenpairs. A single Krylov
//! space sees each distinct eigenvalue once, so the iterative path does not
//! report multiplicities.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralOptions {
    /// Largest `n` handled by the dense solver.
    pub dense_limit: usize,
    /// Eigenpairs kept at each end of the spectrum on the iterative path.
    pub extremal: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            dense_limit: DENSE_LIMIT,
            extremal: 12,
        }
    }
}

/// Eigenvalues `ρ` (descending) and unit eigenvectors of `M`.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    pub rho: Vec<f64>,
    /// Column `i` is the eigenvector of `rho[i]`.
    pub phi: DMatrix<f64>,
    /// `max_i ‖M φ_i − ρ_i φ_i‖`.
    pub residual: f64,
    /// Only extremal eigenpairs were computed.
    pub partial: bool,
    sqrt_degrees: Vec<f64>,
    volume: f64,
}

impl SpectralSummary {
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.phi.column(i).iter().copied().collect()
    }

    /// Eigenfunction of `Δ` for `rho[i]`, normalized so `‖ψ‖_μ = 1`:
    /// `ψ = sqrt(vol) D^{-1/2} φ`.
    pub fn combinatorial(&self, i: usize) -> Vec<f64> {
        let s = self.volume.sqrt();
        self.phi
            .column(i)
            .iter()
            .zip(&self.sqrt_degrees)
            .map(|(x, d)| s * x / d)
            .collect()
    }

    /// Eigenvalues `1 − ρ` of `Δ`, ascending.
    pub fn laplace_eigenvalues(&self) -> Vec<f64> {
        self.rho.iter().map(|r| 1.0 - r).collect()
    }

    pub fn to_json(&self) -> Value {
        let phi: Vec<Vec<f64>> = (0..self.len()).map(|i| self.vector(i)).collect();
        json!({ "rho": self.rho, "phi": phi, "residual": self.residual })
    }
}

pub fn spectrum(g: &Graph) -> Result<SpectralSummary> {
    spectrum_with(g, &SpectralOptions::default())
}

pub fn spectrum_with(g: &Graph, options: &SpectralOptions) -> Result<SpectralSummary> {
    let n = g.n();
    let (rho, phi, partial) = if n <= options.dense_limit {
        let (rho, phi) = symmetric_eigen(g.normalized_adjacency())?;
        (rho, phi, false)
    } else {
        let (rho, phi) = lanczos_extremal(n, |x, y| g.normalized_matvec(x, y), options.extremal)?;
        (rho, phi, true)
    };
    let residual = (0..rho.len())
        .into_par_iter()
        .map(|i| {
            let x: Vec<f64> = phi.column(i).iter().copied().collect();
            let mut y = vec![0.0; n];
            g.normalized_matvec(&x, &mut y);
            y.iter()
                .zip(&x)
                .map(|(a, b)| (a - rho[i] * b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .reduce(|| 0.0, f64::max);
    Ok(SpectralSummary {
        rho,
        phi,
        residual,
        partial,
        sqrt_degrees: g.degrees().iter().map(|d| d.sqrt()).collect(),
        volume: g.volume(),
    })
}

/// Flips `x` so its first entry with `|x_i| > 1e-12` is positive.
pub(crate) fn orient(x: &mut [f64]) {
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-12) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Dense symmetric eigendecomposition sorted by descending eigenvalue, with
/// oriented eigenvectors. Ties are ordered by the eigenvectors, compared
/// lexicographically, so the output does not depend on the solver's order.
pub fn symmetric_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalFailure(format!("dense symmetric eigensolver on {n}×{n}")))?;
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            orient(&mut v);
            (eig.eigenvalues[i], v)
        })
        .collect();
    if pairs.iter().any(|(r, _)| !r.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    pairs.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| {
            for (x, y) in a.1.iter().zip(&b.1) {
                let c = y.total_cmp(x);
                if c.is_ne() {
                    return c;
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    let rho = pairs.iter().map(|p| p.0).collect();
    let phi = DMatrix::from_fn(n, n, |r, c| pairs[c].1[r]);
    Ok((rho, phi))
}

/// Extremal eigenpairs of a symmetric operator given by its action.
///
/// Returns up to `wanted` of the largest and `wanted` of the smallest
/// eigenvalues, all sorted descending, with unit eigenvectors as columns.
pub fn lanczos_extremal<F>(n: usize, op: F, wanted: usize) -> Result<(Vec<f64>, DMatrix<f64>)>
where
    F: Fn(&[f64], &mut [f64]),
{
    const TOL: f64 = 1e-11;
    let max_steps = n.min(600);
    let wanted = wanted.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_0505);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut q);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    loop {
        let j = basis.len() - 1;
        op(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = dot(&w, &w).sqrt();
        let steps = alpha.len();
        let exhausted = b < 1e-12 || steps >= max_steps;
        if exhausted || (steps >= 2 * wanted + 8 && steps.is_multiple_of(10)) {
            let (theta, s) = tridiagonal_eigen(&alpha, &beta)?;
            let m = theta.len();
            let picks: Vec<usize> = if m <= 2 * wanted {
                (0..m).collect()
            } else {
                (0..wanted).chain(m - wanted..m).collect()
            };
            let scale = theta.iter().fold(1.0_f64, |acc, t| acc.max(t.abs()));
            let converged = b < 1e-12 || picks.iter().all(|&i| (b * s[(m - 1, i)]).abs() <= TOL * scale);
            if converged {
                let mut cols = Vec::with_capacity(picks.len());
                for &i in &picks {
                    let mut v = vec![0.0; n];
                    for (k, bk) in basis.iter().enumerate() {
                        let c = s[(k, i)];
                        v.iter_mut().zip(bk).for_each(|(x, y)| *x += c * y);
                    }
                    normalize(&mut v);
                    orient(&mut v);
                    cols.push(v);
                }
                let rho: Vec<f64> = picks.iter().map(|&i| theta[i]).collect();
                let phi = DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r]);
                return Ok((rho, phi));
            }
            if exhausted {
                return Err(Error::NumericalFailure(format!(
                    "Lanczos did not converge after {steps} steps on n = {n}"
                )));
            }
        }
        beta.push(b);
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        basis.push(next);
    }
}

/// Eigenpairs of the tridiagonal matrix with diagonal `alpha` and
/// off-diagonal `beta`, sorted descending.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    symmetric_eigen(t)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let s = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= s);
}

/// `Σ_i ρ_i^k = Trace (I − Δ)^k`.
///
/// On the iterative path the trace is computed exactly as `Σ_v e_vᵀ M^k e_v`
/// with sparse products.
pub fn trace_power(g: &Graph, k: u32) -> Result<f64> {
    trace_power_with(g, k, &SpectralOptions::default())
}

pub fn trace_power_with(g: &Graph, k: u32, options: &SpectralOptions) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("trace power needs k ≥ 1".into()));
    }
    let n = g.n();
    if n <= options.dense_limit {
        let eig = SymmetricEigen::try_new(g.normalized_adjacency(), f64::EPSILON, 0)
            .ok_or_else(|| Error::NumericalFailure("dense symmetric eigensolver".into()))?;
        return Ok(eig.eigenvalues.iter().map(|r| r.powi(k as i32)).sum());
    }
    let total = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            x[v] = 1.0;
            for _ in 0..k {
                g.normalized_matvec(&x, &mut y);
                std::mem::swap(&mut x, &mut y);
            }
            x[v]
        })
        .sum();
    Ok(total)
}

/// Symmetric matrix `B` approximating the adjacency matrix.
#[derive(Debug, Clone)]
pub enum Approximant {
    Dense(DMatrix<f64>),
    /// `B = Σ_ij c_ij u_i u_jᵀ`.
    LowRank {
        vectors: Vec<DVector<f64>>,
        coefficients: DMatrix<f64>,
    },
}

impl Approximant {
    /// `D J D / vol`.
    pub fn rank_one(g: &Graph) -> Self {
        let d = DVector::from_column_slice(g.degrees());
        Approximant::LowRank {
            vectors: vec![d],
            coefficients: DMatrix::from_element(1, 1, 1.0 / g.volume()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Approximant::Dense(b) => b.nrows(),
            Approximant::LowRank { vectors, .. } => vectors.first().map_or(0, |v| v.len()),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Approximant::Dense(b) => b.clone(),
            Approximant::LowRank { vectors, coefficients } => {
                let n = self.dim();
                let mut b = DMatrix::zeros(n, n);
                for (i, u) in vectors.iter().enumerate() {
                    for (j, v) in vectors.iter().enumerate() {
                        let c = coefficients[(i, j)];
                        if c != 0.0 {
                            b.ger(c, u, v, 1.0);
                        }
                    }
                }
                b
            }
        }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        match self {
            Approximant::Dense(b) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = b.row(i).iter().zip(x).map(|(a, c)| a * c).sum();
                }
            }
            Approximant::LowRank { vectors, coefficients } => {
                let proj: Vec<f64> = vectors.iter().map(|u| dot(u.as_slice(), x)).collect();
                y.iter_mut().for_each(|v| *v = 0.0);
                for (i, u) in vectors.iter().enumerate() {
                    let c: f64 = (0..vectors.len()).map(|j| coefficients[(i, j)] * proj[j]).sum();
                    y.iter_mut().zip(u.iter()).for_each(|(a, b)| *a += c * b);
                }
            }
        }
    }
}

/// Extremal eigenpair of `R = D^{-1/2}(A − B)D^{-1/2}`.
#[derive(Debug, Clone)]
pub struct Residual {
    /// Spectral norm `‖R‖`.
    pub norm: f64,
    /// Signed eigenvalue of largest magnitude.
    pub eigenvalue: f64,
    pub vector: Vec<f64>,
}

pub fn residual(g: &Graph, b: &Approximant) -> Result<Residual> {
    residual_with(g, b, &SpectralOptions::default())
}

pub fn residual_with(g: &Graph, b: &Approximant, options: &SpectralOptions) -> Result<Residual> {
    let n = g.n();
    if b.dim() != n {
        return Err(Error::VertexCountMismatch {
            left: n,
            right: b.dim(),
        });
    }
    let s: Vec<f64> = g.degrees().iter().map(|d| d.sqrt().recip()).collect();
    let (rho, phi) = if n <= options.dense_limit {
        let mut r = g.normalized_adjacency();
        let bd = b.to_dense();
        for i in 0..n {
            for j in 0..n {
                r[(i, j)] -= s[i] * bd[(i, j)] * s[j];
            }
        }
        // Exact symmetry keeps the eigensolver on its symmetric path.
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (r[(i, j)] + r[(j, i)]);
                r[(i, j)] = avg;
                r[(j, i)] = avg;
            }
        }
        symmetric_eigen(r)?
    } else {
        let op = |x: &[f64], y: &mut [f64]| {
            g.normalized_matvec(x, y);
            let sx: Vec<f64> = x.iter().zip(&s).map(|(a, c)| a * c).collect();
            let mut bx = vec![0.0; n];
            b.apply(&sx, &mut bx);
            for i in 0..n {
                y[i] -= s[i] * bx[i];
            }
        };
        lanczos_extremal(n, op, 1)?
    };
    let last = rho.len() - 1;
    let pick = if rho[0].abs() >= rho[last].abs() { 0 } else { last };
    Ok(Residual {
        norm: rho[pick].abs(),
        eigenvalue: rho[pick],
        vector: phi.column(pick).iter().copied().collect(),
    })
}

/// Spectral norm of `D^{-1/2}(A − B)D^{-1/2}`.
pub fn residual_norm(g: &Graph, b: &Approximant) -> Result<f64> {
    Ok(residual(g, b)?.norm)
}

/// `⟨f, Δ g⟩_μ` through the edge sum
/// `Σ_{u<v} (f(u) − f(v))(g(u) − g(v)) A(u, v) / vol`. Loops contribute 0.
pub fn quadratic_form(g: &Graph, f: &[f64], h: &[f64]) -> f64 {
    g.edges()
        .map(|(u, v, w)| (f[u] - f[v]) * (h[u] - h[v]) * w)
        .sum::<f64>()
        / g.volume()
}

/// `⟨f, Δ g⟩_μ = ⟨f, g − D⁻¹A g⟩_μ`.
pub fn quadratic_form_matrix(g: &Graph, f: &[f64], h: &[f64]) -> f64 {
    let walk = g.walk_apply(h);
    let lap: Vec<f64> = h.iter().zip(&walk).map(|(a, b)| a - b).collect();
    g.mu_inner(f, &lap)
}
