//! A dense Chung-Lu sequence: certificates shrink and consecutive graphs get
//! closer in the degree and discrepancy distances.

use graphlets::harness::{converge, converge_csv, Metadata, WeightShape};

fn main() -> graphlets::Result<()> {
    let seeds = [1, 2, 3];
    let result = converge(&WeightShape::Scaled(0.25), &[32, 64, 128], &seeds, 500)?;
    print!("{}", converge_csv(&result, &Metadata::new(seeds)));
    println!("verdict: {}", result.verdict);
    Ok(())
}
