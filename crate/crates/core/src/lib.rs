//! Spectral analysis of graph sequences and their limits.
//!
//! A graph is viewed through its degree measure `μ(v) = d(v)/vol(G)` and its
//! Laplace operator `Δ = I − D⁻¹A`. Lifting both to step functions on `[0, 1]`
//! lets graphs of different sizes be compared, which gives the degree,
//! spectral, discrepancy and cut distances in [`distances`]. The
//! [`quasirandom`] module certifies how close a graph is to the rank-1 model
//! `DJD/vol`, and [`decomp`] splits graphs whose normalized adjacency has a
//! second large eigenvalue into two quasirandom parts.
//!
//! ```
//! use graphlets::{generators, quasirandom};
//!
//! let k5 = generators::complete(5).unwrap();
//! let cert = quasirandom::qr_epsilon_spectral(&k5).unwrap();
//! assert!((cert.epsilon - 0.25).abs() < 1e-12);
//! ```

pub mod decomp;
pub mod distances;
pub mod error;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod io;
pub mod lift;
pub mod quasirandom;
pub mod spectral;
pub mod subsets;

pub use error::{Error, Result};
pub use graph::{degree_measure, Graph, GraphOptions, VertexMeasure};
pub use lift::{LabelingMap, StepKernel, StepMeasure};
pub use spectral::SpectralSummary;

/// Version string recorded in every report.
pub const TOOL_VERSION: &str = concat!("graphlets ", env!("CARGO_PKG_VERSION"));
