//! Three quasirandom communities: the rank-3 model from the ground-truth
//! split explains the top of the spectrum.

use graphlets::decomp::{rank_k_eigs, rank_k_residual, RankKSplit};
use graphlets::generators::union_quasirandom;
use graphlets::spectral::spectrum;

fn main() -> graphlets::Result<()> {
    let n = 240;
    let lists: Vec<Vec<f64>> = (0..3)
        .map(|j| (0..n).map(|v| if v % 3 == j { 50.0 } else { 5.0 }).collect())
        .collect();
    let (g, split) = union_quasirandom(&lists, 4)?;
    let eigs = rank_k_eigs(&g, &split)?;
    let rho = spectrum(&g)?.rho;
    for (i, (eta, _)) in eigs.iter().enumerate() {
        println!("model eta_{i} = {eta:.4}   graph rho_{i} = {:.4}", rho[i]);
    }
    println!("rank-3 residual: {:.4}", rank_k_residual(&g, &split)?);
    let one = RankKSplit::new(&g, vec![g.degrees().to_vec()])?;
    println!("rank-1 residual: {:.4}", rank_k_residual(&g, &one)?);
    Ok(())
}
