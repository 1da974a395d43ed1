//! Lifting graphs to step functions on `[0, 1]`.
//!
//! A labeling places vertex `v` on the cell `I_v = [p/n, (p+1)/n)` where `p` is
//! its position. The degree measure becomes a step density equal to `n μ(v)`
//! on `I_v` and the adjacency matrix becomes a step kernel. Two graphs of
//! different sizes are compared on the common equal-cell refinement.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{degree_measure, Graph};

/// Largest number of cells a lifted kernel may use.
pub const REFINEMENT_CAP: usize = 4096;

/// A bijection from vertices to positions `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelingMap {
    position: Vec<usize>,
}

impl LabelingMap {
    pub fn identity(n: usize) -> Self {
        LabelingMap {
            position: (0..n).collect(),
        }
    }

    /// `positions[v]` is the position of vertex `v`.
    pub fn from_positions(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        let mut hit = vec![false; n];
        for &p in &positions {
            if p >= n || hit[p] {
                return Err(Error::InvalidArgument(format!(
                    "labeling is not a bijection onto 0..{n}"
                )));
            }
            hit[p] = true;
        }
        Ok(LabelingMap { position: positions })
    }

    /// `order[p]` is the vertex placed at position `p`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let mut positions = vec![usize::MAX; order.len()];
        for (p, &v) in order.iter().enumerate() {
            if v >= order.len() || positions[v] != usize::MAX {
                return Err(Error::InvalidArgument("order is not a permutation".into()));
            }
            positions[v] = p;
        }
        Ok(LabelingMap { position: positions })
    }

    /// Vertices sorted by degree ascending, ties broken by id. With this
    /// labeling the lifted degree density is non-decreasing on `[0, 1]`.
    pub fn degree_sorted(g: &Graph) -> Self {
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by(|&a, &b| g.degree(a).total_cmp(&g.degree(b)).then(a.cmp(&b)));
        Self::from_order(&order).expect("sorted order is a permutation")
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.position.len()];
        for (v, &p) in self.position.iter().enumerate() {
            order[p] = v;
        }
        order
    }
}

/// Piecewise-constant density on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMeasure {
    breakpoints: Vec<f64>,
    densities: Vec<f64>,
}

impl StepMeasure {
    pub fn new(breakpoints: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != densities.len() + 1 || densities.is_empty() {
            return Err(Error::InvalidArgument("need k+1 breakpoints for k cells".into()));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidArgument("breakpoints must run from 0 to 1".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("breakpoints must increase".into()));
        }
        if densities.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidArgument("densities must be nonnegative".into()));
        }
        let m = StepMeasure { breakpoints, densities };
        let total = m.total();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("density integrates to {total}, not 1")));
        }
        Ok(m)
    }

    /// Equal cells carrying the given masses (which must sum to 1).
    pub fn from_cell_masses(masses: &[f64]) -> Result<Self> {
        let k = masses.len();
        let breakpoints = equal_breakpoints(k);
        Self::new(breakpoints, masses.iter().map(|m| m * k as f64).collect())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn cells(&self) -> usize {
        self.densities.len()
    }

    pub fn mass(&self, cell: usize) -> f64 {
        self.densities[cell] * (self.breakpoints[cell + 1] - self.breakpoints[cell])
    }

    pub fn masses(&self) -> Vec<f64> {
        (0..self.cells()).map(|c| self.mass(c)).collect()
    }

    pub fn total(&self) -> f64 {
        (0..self.cells()).map(|c| self.mass(c)).sum()
    }

    pub fn is_equal_grid(&self) -> bool {
        let k = self.cells() as f64;
        self.breakpoints
            .iter()
            .enumerate()
            .all(|(i, &b)| (b - i as f64 / k).abs() < 1e-12)
    }

    /// Re-expresses an equal-grid measure on `cells` equal cells.
    pub fn refine(&self, cells: usize) -> Result<Self> {
        let k = self.cells();
        if !self.is_equal_grid() || !cells.is_multiple_of(k) {
            return Err(Error::InvalidArgument(format!(
                "cannot refine {k} cells to {cells} equal cells"
            )));
        }
        let r = cells / k;
        let densities = (0..cells).map(|c| self.densities[c / r]).collect();
        Ok(StepMeasure {
            breakpoints: equal_breakpoints(cells),
            densities,
        })
    }

    /// `∫₀¹ |self − other|`, exact over the merged breakpoints.
    pub fn l1_distance(&self, other: &StepMeasure) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut x = 0.0;
        let mut total = 0.0;
        while i < self.cells() && j < other.cells() {
            let end = self.breakpoints[i + 1].min(other.breakpoints[j + 1]);
            total += (self.densities[i] - other.densities[j]).abs() * (end - x);
            x = end;
            if self.breakpoints[i + 1] <= end {
                i += 1;
            }
            if other.breakpoints[j + 1] <= end {
                j += 1;
            }
        }
        total
    }

    /// Applies a permutation of equal cells: cell `c` of the result carries
    /// the density of cell `perm[c]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if !self.is_equal_grid() || perm.len() != self.cells() {
            return Err(Error::InvalidArgument(
                "permutation needs an equal grid of matching size".into(),
            ));
        }
        Ok(StepMeasure {
            breakpoints: self.breakpoints.clone(),
            densities: perm.iter().map(|&c| self.densities[c]).collect(),
        })
    }
}

fn equal_breakpoints(k: usize) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
    b[k] = 1.0;
    b
}

/// Symmetric kernel constant on each pair of equal cells.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel {
    cells: usize,
    values: Vec<f64>,
}

impl StepKernel {
    pub fn new(cells: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != cells * cells || cells == 0 {
            return Err(Error::InvalidArgument("kernel needs cells² values".into()));
        }
        for i in 0..cells {
            for j in 0..i {
                if values[i * cells + j] != values[j * cells + i] {
                    return Err(Error::InvalidArgument("kernel is not symmetric".into()));
                }
            }
        }
        Ok(StepKernel { cells, values })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cells + j]
    }

    /// Value at `(x, y)` in `[0, 1]²`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let cell = |t: f64| ((t * self.cells as f64) as usize).min(self.cells - 1);
        self.get(cell(x), cell(y))
    }

    pub fn refine(&self, cells: usize) -> Result<Self> {
        if !cells.is_multiple_of(self.cells) {
            return Err(Error::InvalidArgument(format!(
                "cannot refine {} cells to {cells}",
                self.cells
            )));
        }
        let r = cells / self.cells;
        let mut values = Vec::with_capacity(cells * cells);
        for i in 0..cells {
            for j in 0..cells {
                values.push(self.get(i / r, j / r));
            }
        }
        Ok(StepKernel { cells, values })
    }
}

/// Density `n μ(v)` on the cell of `v`.
pub fn lift_measure(g: &Graph, labeling: &LabelingMap) -> StepMeasure {
    let n = g.n();
    let mu = degree_measure(g);
    let mut densities = vec![0.0; n];
    for v in 0..n {
        densities[labeling.position(v)] = n as f64 * mu.get(v);
    }
    StepMeasure {
        breakpoints: equal_breakpoints(n),
        densities,
    }
}

/// `W(x, y) = A(η(x), η(y))`.
pub fn lift_kernel(g: &Graph, labeling: &LabelingMap) -> StepKernel {
    let n = g.n();
    let mut values = vec![0.0; n * n];
    for (u, v, w) in g.edges() {
        let (pu, pv) = (labeling.position(u), labeling.position(v));
        values[pu * n + pv] = w;
        values[pv * n + pu] = w;
    }
    StepKernel { cells: n, values }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Number of equal cells of the common refinement of an `m`- and an `n`-cell grid.
pub fn common_cells(m: usize, n: usize) -> Result<usize> {
    let lcm = m / gcd(m, n) * n;
    if lcm <= REFINEMENT_CAP {
        return Ok(lcm);
    }
    Err(Error::RefinementTooLarge {
        m,
        n,
        cells: lcm,
        cap: REFINEMENT_CAP,
    })
}

pub fn refine_common(a: &StepKernel, b: &StepKernel) -> Result<(StepKernel, StepKernel)> {
    let cells = common_cells(a.cells(), b.cells())?;
    Ok((a.refine(cells)?, b.refine(cells)?))
}

/// μ-weighted cell averages of `f` over the cells of an `n`-vertex grid:
/// `f̃(u) = ∫_{I_u} f μ / ∫_{I_u} μ`.
///
/// `f` and `mu` live on the same equal refinement whose cell count is a
/// multiple of `vertices`. The result is indexed by vertex position.
pub fn step_project(f: &[f64], mu: &StepMeasure, vertices: usize) -> Result<Vec<f64>> {
    let cells = f.len();
    if mu.cells() != cells || vertices == 0 || !cells.is_multiple_of(vertices) || !mu.is_equal_grid() {
        return Err(Error::InvalidArgument(format!(
            "cannot project {cells} cells onto {vertices} vertex cells"
        )));
    }
    let r = cells / vertices;
    let mut out = Vec::with_capacity(vertices);
    for u in 0..vertices {
        let (mut num, mut den) = (0.0, 0.0);
        for (c, fc) in f.iter().enumerate().skip(u * r).take(r) {
            let m = mu.mass(c);
            num += fc * m;
            den += m;
        }
        if den <= 0.0 {
            return Err(Error::InvalidArgument(format!("measure vanishes on vertex cell {u}")));
        }
        out.push(num / den);
    }
    Ok(out)
}

/// Cell-space form of a lifted graph on `cells` equal cells.
///
/// With masses `w(c)` of the lifted degree measure and kernel
/// `b(c, c') = A(v, v') / (r² vol)` (`r` cells per vertex), the lifted operator
/// satisfies `⟨f, (I − Δ) g⟩_μ = fᵀ B g` and `⟨f, g⟩_μ = Σ w f g` for step
/// functions on the refinement.
#[derive(Debug, Clone)]
pub struct LiftedOperator {
    pub masses: Vec<f64>,
    pub kernel: DMatrix<f64>,
}

impl LiftedOperator {
    pub fn new(g: &Graph, labeling: &LabelingMap, cells: usize) -> Result<Self> {
        let n = g.n();
        if !cells.is_multiple_of(n) || cells > REFINEMENT_CAP.max(n) {
            return Err(Error::InvalidArgument(format!(
                "cannot lift {n} vertices onto {cells} cells"
            )));
        }
        let r = cells / n;
        let scale = 1.0 / ((r * r) as f64 * g.volume());
        let order = labeling.order();
        let mut masses = vec![0.0; cells];
        for c in 0..cells {
            masses[c] = g.degree(order[c / r]) / (r as f64 * g.volume());
        }
        let mut kernel = DMatrix::zeros(cells, cells);
        for (u, v, w) in g.edges() {
            let (pu, pv) = (labeling.position(u), labeling.position(v));
            for i in pu * r..(pu + 1) * r {
                for j in pv * r..(pv + 1) * r {
                    kernel[(i, j)] = w * scale;
                    kernel[(j, i)] = w * scale;
                }
            }
        }
        Ok(LiftedOperator { masses, kernel })
    }

    pub fn cells(&self) -> usize {
        self.masses.len()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).zip(&self.masses).map(|((a, b), m)| a * b * m).sum()
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    /// `⟨f, (I − Δ) g⟩_μ`.
    pub fn walk_form(&self, f: &[f64], g: &[f64]) -> f64 {
        let n = self.cells();
        let mut total = 0.0;
        for (j, &gj) in g.iter().enumerate().take(n) {
            if gj == 0.0 {
                continue;
            }
            let col = self.kernel.column(j);
            let s: f64 = (0..n).map(|i| f[i] * col[i]).sum();
            total += s * gj;
        }
        total
    }

    /// `⟨f, Δ g⟩_μ`.
    pub fn laplace_form(&self, f: &[f64], g: &[f64]) -> f64 {
        self.inner(f, g) - self.walk_form(f, g)
    }

    /// Cell `c` of the result is cell `perm[c]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.cells();
        LiftedOperator {
            masses: perm.iter().map(|&c| self.masses[c]).collect(),
            kernel: DMatrix::from_fn(n, n, |i, j| self.kernel[(perm[i], perm[j])]),
        }
    }

    pub fn measure(&self) -> StepMeasure {
        StepMeasure {
            breakpoints: equal_breakpoints(self.cells()),
            densities: self.masses.iter().map(|m| m * self.cells() as f64).collect(),
        }
    }
}
