//! Weighted undirected graphs with strictly positive degrees.
//!
//! Every operation in the crate takes a [`Graph`]. The constructor enforces
//! symmetry, nonnegative weights and the absence of isolated vertices, so
//! `d(v) > 0` and `vol(G) > 0` hold for every value of this type.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Construction options.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraphOptions {
    /// Accept `A(v, v) > 0`. A loop of weight `w` adds `w` (once) to `d(v)`.
    pub allow_loops: bool,
}

impl GraphOptions {
    pub fn with_loops() -> Self {
        GraphOptions { allow_loops: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    /// Sorted neighbour lists; a loop appears once in its own list.
    adj: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
    volume: f64,
    allow_loops: bool,
    /// Original vertex ids, when the graph was loaded from a file.
    labels: Option<Vec<u64>>,
}

impl Graph {
    /// Builds a graph on `n` vertices from `(u, v, w)` triples.
    ///
    /// Repeated entries for the same unordered pair must agree on the weight;
    /// zero weights are accepted and stored as absent edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)], options: GraphOptions) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, w) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::VertexOutOfRange { id, n });
                }
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight {
                    u: u as u64,
                    v: v as u64,
                    weight: w,
                });
            }
            if u == v && !options.allow_loops && w > 0.0 {
                return Err(Error::SelfLoop(u as u64));
            }
            let key = (u.min(v), u.max(v));
            match weights.get(&key) {
                Some(&prev) if prev != w => {
                    return Err(Error::ConflictingEdge {
                        u: key.0 as u64,
                        v: key.1 as u64,
                        first: prev,
                        second: w,
                    })
                }
                _ => {
                    weights.insert(key, w);
                }
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (&(u, v), &w) in &weights {
            if w == 0.0 {
                continue;
            }
            adj[u].push((v, w));
            if u != v {
                adj[v].push((u, w));
            }
        }
        Self::from_adjacency_lists(adj, options.allow_loops)
    }

    /// Builds a graph from a dense symmetric matrix. Entries below `1e-300`
    /// in magnitude are treated as absent.
    pub fn from_dense(a: &DMatrix<f64>, options: GraphOptions) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "adjacency matrix is {}x{}",
                n,
                a.ncols()
            )));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u..n {
                let (x, y) = (a[(u, v)], a[(v, u)]);
                if x != y {
                    let tol = 1e-12 * x.abs().max(y.abs());
                    if (x - y).abs() > tol {
                        return Err(Error::ConflictingEdge {
                            u: u as u64,
                            v: v as u64,
                            first: x,
                            second: y,
                        });
                    }
                }
                let w = 0.5 * (x + y);
                if w.abs() > 1e-300 || w < 0.0 {
                    edges.push((u, v, w));
                }
            }
        }
        Self::from_edges(n, &edges, options)
    }

    fn from_adjacency_lists(mut adj: Vec<Vec<(usize, f64)>>, allow_loops: bool) -> Result<Self> {
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
        }
        let degrees: Vec<f64> = adj.iter().map(|l| l.iter().map(|&(_, w)| w).sum()).collect();
        if let Some(v) = degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::IsolatedVertex(v as u64));
        }
        let volume = degrees.iter().sum();
        Ok(Graph {
            adj,
            degrees,
            volume,
            allow_loops,
            labels: None,
        })
    }

    pub(crate) fn with_labels(mut self, labels: Vec<u64>) -> Self {
        debug_assert_eq!(labels.len(), self.n());
        self.labels = Some(labels);
        self
    }

    /// Original ids when loaded from a file, otherwise `0..n`.
    pub fn original_id(&self, v: usize) -> u64 {
        self.labels.as_ref().map_or(v as u64, |l| l[v])
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn allows_loops(&self) -> bool {
        self.allow_loops
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Sum of degrees over a vertex set.
    pub fn volume_of(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.degrees[v]).sum()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        match self.adj[u].binary_search_by_key(&v, |&(x, _)| x) {
            Ok(i) => self.adj[u][i].1,
            Err(_) => 0.0,
        }
    }

    /// Edges as `(u, v, w)` with `u <= v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&(v, _)| v >= u).map(move |&(v, w)| (u, v, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for (u, list) in self.adj.iter().enumerate() {
            for &(v, w) in list {
                a[(u, v)] = w;
            }
        }
        a
    }

    /// `M = D^{-1/2} A D^{-1/2}`.
    pub fn normalized_adjacency(&self) -> DMatrix<f64> {
        let n = self.n();
        let s: Vec<f64> = self.degrees.iter().map(|d| d.sqrt().recip()).collect();
        let mut m = DMatrix::zeros(n, n);
        for (u, list) in self.adj.iter().enumerate() {
            for &(v, w) in list {
                m[(u, v)] = w * s[u] * s[v];
            }
        }
        m
    }

    /// `y = M x` without forming `M`.
    pub fn normalized_matvec(&self, x: &[f64], y: &mut [f64]) {
        for (u, list) in self.adj.iter().enumerate() {
            let su = self.degrees[u].sqrt();
            let mut acc = 0.0;
            for &(v, w) in list {
                acc += w * x[v] / self.degrees[v].sqrt();
            }
            y[u] = acc / su;
        }
    }

    /// `D^{1/2} 1 / sqrt(vol)`, the unit Perron vector of `M`.
    pub fn perron_vector(&self) -> DVector<f64> {
        let s = self.volume.sqrt();
        DVector::from_iterator(self.n(), self.degrees.iter().map(|d| d.sqrt() / s))
    }

    /// Connected components as a vertex → component index map, plus the count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 == 1
    }

    /// Graph with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor {c} must be positive")));
        }
        let adj = self
            .adj
            .iter()
            .map(|l| l.iter().map(|&(v, w)| (v, w * c)).collect())
            .collect();
        let mut g = Self::from_adjacency_lists(adj, self.allow_loops)?;
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Union on a shared vertex set: `A = A₁ + A₂`.
    pub fn union(&self, other: &Graph) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::VertexCountMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        let mut dense: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); self.n()];
        for g in [self, other] {
            for (u, list) in g.adj.iter().enumerate() {
                for &(v, w) in list {
                    *dense[u].entry(v).or_insert(0.0) += w;
                }
            }
        }
        let adj = dense.into_iter().map(|m| m.into_iter().collect()).collect();
        Self::from_adjacency_lists(adj, self.allow_loops || other.allow_loops)
    }

    /// `E(S, T) = Σ_{s∈S, t∈T} A(s, t)`, counting ordered pairs.
    pub fn incidence(&self, s: &[usize], t: &[usize]) -> f64 {
        if s.is_empty() || t.is_empty() {
            return 0.0;
        }
        let in_t = membership(self.n(), t);
        let in_s = membership(self.n(), s);
        let mut total = 0.0;
        for (u, &member) in in_s.iter().enumerate() {
            if !member {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                if in_t[v] {
                    total += w;
                }
            }
        }
        total
    }

    /// `⟨f, g⟩_μ = Σ f(v) g(v) μ(v)`.
    pub fn mu_inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.degrees)
            .map(|((a, b), d)| a * b * d)
            .sum::<f64>()
            / self.volume
    }

    pub fn mu_norm(&self, f: &[f64]) -> f64 {
        self.mu_inner(f, f).sqrt()
    }

    /// `(I − Δ) g = D^{-1} A g`.
    pub fn walk_apply(&self, g: &[f64]) -> Vec<f64> {
        self.adj
            .iter()
            .zip(&self.degrees)
            .map(|(list, d)| list.iter().map(|&(v, w)| w * g[v]).sum::<f64>() / d)
            .collect()
    }
}

pub(crate) fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

/// Degree distribution measure `μ(v) = d(v) / vol(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexMeasure {
    values: Vec<f64>,
}

impl VertexMeasure {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn of_set(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.values[v]).sum()
    }
}

pub fn degree_measure(g: &Graph) -> VertexMeasure {
    VertexMeasure {
        values: g.degrees().iter().map(|d| d / g.volume()).collect(),
    }
}
