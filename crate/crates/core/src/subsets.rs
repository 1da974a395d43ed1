//! Maximization over pairs of nonempty subsets `(S, T)`.
//!
//! Every discrepancy-type quantity is a function of a few bilinear values
//! `χ_Sᵀ K χ_T` and a few linear values `a · χ_S`, `b · χ_T`. A [`Problem`]
//! lists those pieces together with the objective. Up to [`EXACT_LIMIT`]
//! elements all `(2^N − 1)²` pairs are enumerated; beyond that, random pairs
//! are sampled and the best ones improved by single-element toggles, which
//! only certifies a lower bound.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const EXACT_LIMIT: usize = 12;
pub const DEFAULT_SAMPLES: usize = 10_000;
const CLIMB_STARTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Mode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

impl Mode {
    pub fn sampled(seed: u64) -> Self {
        Mode::Sampled {
            samples: DEFAULT_SAMPLES,
            seed,
        }
    }

    /// Exact when `size` allows it, sampled otherwise.
    pub fn auto(size: usize, samples: usize, seed: u64) -> Self {
        if size <= EXACT_LIMIT {
            Mode::Exact
        } else {
            Mode::Sampled { samples, seed }
        }
    }
}

/// A matrix entering a bilinear value `χ_Sᵀ K χ_T`.
#[derive(Debug, Clone)]
pub enum Form {
    Dense(DMatrix<f64>),
    /// Row lists and column lists of the same matrix.
    Sparse {
        rows: Vec<Vec<(usize, f64)>>,
        cols: Vec<Vec<(usize, f64)>>,
    },
}

impl Form {
    /// Sparse form of a symmetric matrix given by its row lists.
    pub fn symmetric_sparse(rows: Vec<Vec<(usize, f64)>>) -> Self {
        Form::Sparse {
            cols: rows.clone(),
            rows,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Form::Dense(m) => m.nrows(),
            Form::Sparse { rows, .. } => rows.len(),
        }
    }

    /// `y += sign · K[:, c]`.
    fn add_column(&self, c: usize, sign: f64, y: &mut [f64]) {
        match self {
            Form::Dense(m) => y.iter_mut().zip(m.column(c).iter()).for_each(|(a, b)| *a += sign * b),
            Form::Sparse { cols, .. } => cols[c].iter().for_each(|&(r, w)| y[r] += sign * w),
        }
    }

    /// `z += sign · K[c, :]`.
    fn add_row(&self, c: usize, sign: f64, z: &mut [f64]) {
        match self {
            Form::Dense(m) => z.iter_mut().zip(m.row(c).iter()).for_each(|(a, b)| *a += sign * b),
            Form::Sparse { rows, .. } => rows[c].iter().for_each(|&(j, w)| z[j] += sign * w),
        }
    }

    fn times_indicator(&self, t: &[bool]) -> Vec<f64> {
        let mut y = vec![0.0; self.size()];
        for (c, &inside) in t.iter().enumerate() {
            if inside {
                self.add_column(c, 1.0, &mut y);
            }
        }
        y
    }

    fn indicator_times(&self, s: &[bool]) -> Vec<f64> {
        let mut z = vec![0.0; self.size()];
        for (c, &inside) in s.iter().enumerate() {
            if inside {
                self.add_row(c, 1.0, &mut z);
            }
        }
        z
    }
}

type Objective<'a> = dyn Fn(&[f64], &[f64], &[f64]) -> Option<f64> + Sync + 'a;

/// Objective `eval(bilinear, s_linear, t_linear)`; `None` skips a pair.
pub struct Problem<'a> {
    pub size: usize,
    pub forms: Vec<Form>,
    pub s_linear: Vec<Vec<f64>>,
    pub t_linear: Vec<Vec<f64>>,
    pub eval: Box<Objective<'a>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxResult {
    pub value: f64,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    /// Sampled search: the true maximum may be larger.
    pub lower_bound: bool,
}

impl<'a> Problem<'a> {
    pub fn maximize(&self, mode: Mode) -> Result<MaxResult> {
        if self.forms.iter().any(|f| f.size() != self.size)
            || self.s_linear.iter().chain(&self.t_linear).any(|a| a.len() != self.size)
        {
            return Err(Error::InvalidArgument("subset problem pieces differ in size".into()));
        }
        match mode {
            Mode::Exact => self.exact(),
            Mode::Sampled { samples, seed } => self.sampled(samples, seed),
        }
    }

    fn exact(&self) -> Result<MaxResult> {
        let n = self.size;
        if n > EXACT_LIMIT {
            return Err(Error::ExactModeTooLarge {
                size: n,
                limit: EXACT_LIMIT,
            });
        }
        let full = 1usize << n;
        let s_lin: Vec<Vec<f64>> = self.s_linear.iter().map(|a| subset_sums(a, n)).collect();
        let t_lin: Vec<Vec<f64>> = self.t_linear.iter().map(|b| subset_sums(b, n)).collect();
        let best = (1..full)
            .into_par_iter()
            .map(|t| {
                let in_t: Vec<bool> = (0..n).map(|c| t >> c & 1 == 1).collect();
                let cols: Vec<Vec<f64>> = self.forms.iter().map(|f| f.times_indicator(&in_t)).collect();
                // bil[r][s] = χ_Sᵀ K_r χ_T, built from the set without its lowest element.
                let bil: Vec<Vec<f64>> = cols.iter().map(|y| subset_sums(y, n)).collect();
                let tl: Vec<f64> = t_lin.iter().map(|v| v[t]).collect();
                let mut x = vec![0.0; bil.len()];
                let mut sl = vec![0.0; s_lin.len()];
                let mut best: Option<(f64, usize, usize)> = None;
                for s in 1..full {
                    x.iter_mut().zip(&bil).for_each(|(a, v)| *a = v[s]);
                    sl.iter_mut().zip(&s_lin).for_each(|(a, v)| *a = v[s]);
                    if let Some(val) = (self.eval)(&x, &sl, &tl) {
                        if best.is_none_or(|b| val > b.0) {
                            best = Some((val, s, t));
                        }
                    }
                }
                best
            })
            .reduce(|| None, pick_better);
        let (value, s, t) = best.ok_or_else(|| Error::InvalidArgument("objective undefined on every pair".into()))?;
        Ok(MaxResult {
            value,
            s: mask_to_set(s, n),
            t: mask_to_set(t, n),
            lower_bound: false,
        })
    }

    fn sampled(&self, samples: usize, seed: u64) -> Result<MaxResult> {
        let n = self.size;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || -> Vec<bool> {
            loop {
                let set: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
                if set.iter().any(|&b| b) {
                    return set;
                }
            }
        };
        let pairs: Vec<(Vec<bool>, Vec<bool>)> = (0..samples.max(1)).map(|_| (draw(), draw())).collect();
        let mut scored: Vec<(f64, usize)> = pairs
            .par_iter()
            .enumerate()
            .filter_map(|(i, (s, t))| self.value_of(s, t).map(|v| (v, i)))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let starts: Vec<usize> = scored.iter().take(CLIMB_STARTS).map(|p| p.1).collect();
        let climbed: Vec<(f64, Vec<bool>, Vec<bool>)> = starts
            .par_iter()
            .map(|&i| self.climb(pairs[i].0.clone(), pairs[i].1.clone()))
            .collect();
        let mut best: Option<(f64, Vec<bool>, Vec<bool>)> = None;
        for c in climbed {
            if best.as_ref().is_none_or(|b| c.0 > b.0) {
                best = Some(c);
            }
        }
        let (value, s, t) =
            best.ok_or_else(|| Error::InvalidArgument("objective undefined on every sampled pair".into()))?;
        Ok(MaxResult {
            value,
            s: bools_to_set(&s),
            t: bools_to_set(&t),
            lower_bound: true,
        })
    }

    fn value_of(&self, s: &[bool], t: &[bool]) -> Option<f64> {
        let x: Vec<f64> = self
            .forms
            .iter()
            .map(|f| {
                let y = f.times_indicator(t);
                s.iter().zip(&y).filter(|p| *p.0).map(|p| p.1).sum()
            })
            .collect();
        let sl: Vec<f64> = self.s_linear.iter().map(|a| masked_sum(a, s)).collect();
        let tl: Vec<f64> = self.t_linear.iter().map(|b| masked_sum(b, t)).collect();
        (self.eval)(&x, &sl, &tl)
    }

    /// Steepest-ascent single toggles until no toggle improves.
    fn climb(&self, mut s: Vec<bool>, mut t: Vec<bool>) -> (f64, Vec<bool>, Vec<bool>) {
        let n = self.size;
        let mut y: Vec<Vec<f64>> = self.forms.iter().map(|f| f.times_indicator(&t)).collect();
        let mut z: Vec<Vec<f64>> = self.forms.iter().map(|f| f.indicator_times(&s)).collect();
        let mut x: Vec<f64> = y.iter().map(|yr| masked_sum(yr, &s)).collect();
        let mut sl: Vec<f64> = self.s_linear.iter().map(|a| masked_sum(a, &s)).collect();
        let mut tl: Vec<f64> = self.t_linear.iter().map(|b| masked_sum(b, &t)).collect();
        let mut current = (self.eval)(&x, &sl, &tl).unwrap_or(f64::NEG_INFINITY);
        let (mut s_count, mut t_count) = (s.iter().filter(|&&b| b).count(), t.iter().filter(|&&b| b).count());
        let mut cx = vec![0.0; x.len()];
        let mut cl = vec![0.0; sl.len().max(tl.len())];
        for _ in 0..20 * n + 20 {
            let mut best: Option<(f64, bool, usize)> = None;
            for c in 0..n {
                // Toggle c in S.
                let sign = if s[c] { -1.0 } else { 1.0 };
                if !(s[c] && s_count == 1) {
                    for (r, v) in cx.iter_mut().enumerate() {
                        *v = x[r] + sign * y[r][c];
                    }
                    let cl = &mut cl[..sl.len()];
                    for (q, v) in cl.iter_mut().enumerate() {
                        *v = sl[q] + sign * self.s_linear[q][c];
                    }
                    if let Some(val) = (self.eval)(&cx, cl, &tl) {
                        if val > current && best.is_none_or(|b| val > b.0) {
                            best = Some((val, true, c));
                        }
                    }
                }
                // Toggle c in T; a diagonal entry is counted when c is in S.
                let sign = if t[c] { -1.0 } else { 1.0 };
                if !(t[c] && t_count == 1) {
                    for (r, v) in cx.iter_mut().enumerate() {
                        *v = x[r] + sign * z[r][c];
                    }
                    let cl = &mut cl[..tl.len()];
                    for (q, v) in cl.iter_mut().enumerate() {
                        *v = tl[q] + sign * self.t_linear[q][c];
                    }
                    if let Some(val) = (self.eval)(&cx, &sl, cl) {
                        if val > current && best.is_none_or(|b| val > b.0) {
                            best = Some((val, false, c));
                        }
                    }
                }
            }
            let Some((val, in_s, c)) = best else { break };
            if in_s {
                let sign = if s[c] { -1.0 } else { 1.0 };
                for (r, f) in self.forms.iter().enumerate() {
                    x[r] += sign * y[r][c];
                    f.add_row(c, sign, &mut z[r]);
                }
                for (q, a) in self.s_linear.iter().enumerate() {
                    sl[q] += sign * a[c];
                }
                s[c] = !s[c];
                s_count = if s[c] { s_count + 1 } else { s_count - 1 };
            } else {
                let sign = if t[c] { -1.0 } else { 1.0 };
                for (r, f) in self.forms.iter().enumerate() {
                    x[r] += sign * z[r][c];
                    f.add_column(c, sign, &mut y[r]);
                }
                for (q, b) in self.t_linear.iter().enumerate() {
                    tl[q] += sign * b[c];
                }
                t[c] = !t[c];
                t_count = if t[c] { t_count + 1 } else { t_count - 1 };
            }
            current = val;
        }
        // Recompute from scratch so accumulated rounding never inflates the bound.
        let exact = self.value_of(&s, &t).unwrap_or(current);
        (exact, s, t)
    }
}

fn pick_better(a: Option<(f64, usize, usize)>, b: Option<(f64, usize, usize)>) -> Option<(f64, usize, usize)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            // Larger value wins; equal values go to the smaller (t, s) masks.
            if y.0 > x.0 || (y.0 == x.0 && (y.2, y.1) < (x.2, x.1)) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// `out[mask] = Σ_{c ∈ mask} a[c]` for every mask.
fn subset_sums(a: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; 1 << n];
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        out[mask] = out[mask & (mask - 1)] + a[low];
    }
    out
}

fn masked_sum(a: &[f64], mask: &[bool]) -> f64 {
    a.iter().zip(mask).filter(|p| *p.1).map(|p| p.0).sum()
}

fn mask_to_set(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|c| mask >> c & 1 == 1).collect()
}

fn bools_to_set(b: &[bool]) -> Vec<usize> {
    b.iter().enumerate().filter(|p| *p.1).map(|p| p.0).collect()
}
