//! Quasirandomness certificates of a random graph with given expected
//! degrees, next to a matching (the least quasirandom graph there is).

use graphlets::generators::{chung_lu, matching};
use graphlets::quasirandom::{qr_epsilon_discrepancy, qr_epsilon_spectral, qr_trace_defect};
use graphlets::subsets::Mode;

fn main() -> graphlets::Result<()> {
    let weights: Vec<f64> = (0..200).map(|i| 20.0 + 30.0 * (i % 4) as f64 / 3.0).collect();
    let g = chung_lu(&weights, 7)?;
    let spec = qr_epsilon_spectral(&g)?;
    let disc = qr_epsilon_discrepancy(&g, Mode::sampled(7))?;
    let trace = qr_trace_defect(&g, 4)?;
    println!("Chung-Lu, n = {}", g.n());
    println!("  spectral     eps = {:.4}", spec.epsilon);
    println!(
        "  discrepancy  eps >= {:.4} (sampled: exact = {})",
        disc.epsilon, disc.exact
    );
    println!("  trace defect k=4 = {:.4}", trace.epsilon);

    let m = matching(6)?;
    println!("matching on 12 vertices");
    println!("  spectral     eps = {:.4}", qr_epsilon_spectral(&m)?.epsilon);
    println!(
        "  discrepancy  eps = {:.4}",
        qr_epsilon_discrepancy(&m, Mode::Exact)?.epsilon
    );
    Ok(())
}
