//! Load a small weighted graph, look at its degree measure and spectrum.
//!
//! `cargo run --example quickstart`

use graphlets::io::parse_edge_list;
use graphlets::spectral::spectrum;
use graphlets::{degree_measure, GraphOptions};

fn main() -> graphlets::Result<()> {
    let g = parse_edge_list(
        "# a weighted 5-cycle with one chord\n0 1 1\n1 2 2\n2 3 1\n3 4 2\n4 0 1\n0 2 0.5\n",
        GraphOptions::default(),
    )?;
    println!("n = {}, vol = {}", g.n(), g.volume());
    println!("degree measure: {:?}", degree_measure(&g).values());

    let s = spectrum(&g)?;
    println!("normalized adjacency eigenvalues: {:?}", s.rho);
    println!("Laplace eigenvalues:              {:?}", s.laplace_eigenvalues());
    println!("eigen-residual: {:.2e}", s.residual);
    Ok(())
}
