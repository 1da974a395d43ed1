//! Split the union of two quasirandom graphs back into its parts using the
//! second eigenpair, then compare with the ground truth.

use graphlets::decomp::{
    exact_model_graph, rank2_decompose, split_measures, union_spectrum_check, DecomposeOptions, DegreeSplit,
};
use graphlets::generators::{chung_lu, union_quasirandom};

fn main() -> graphlets::Result<()> {
    let n = 300;
    let heavy_left: Vec<f64> = (0..n).map(|v| if v < n / 2 { 40.0 } else { 8.0 }).collect();
    let heavy_right: Vec<f64> = heavy_left.iter().rev().copied().collect();
    let (g, truth) = union_quasirandom(&[heavy_left.clone(), heavy_right.clone()], 11)?;

    let (split, diag) = rank2_decompose(&g, &DecomposeOptions::default())?;
    println!(
        "rho1 = {:.4}, eta = {:.4}, alpha = {:.4}",
        diag.rho1, diag.eta, diag.alpha
    );
    println!("residual ||M - model|| = {:.4}", diag.residual);
    let err: f64 = (0..n)
        .map(|v| {
            (split.d_prime[v] - truth.parts[1][v])
                .abs()
                .min((split.d_prime[v] - truth.parts[0][v]).abs())
        })
        .sum::<f64>()
        / g.volume();
    println!("relative L1 error against the generating split: {err:.4}");

    // On an exact two-part model the limiting measures are the parts
    // themselves, normalized.
    let parts = vec![vec![3.0, 2.0, 1.0, 0.0], vec![0.0, 1.0, 2.0, 3.0]];
    let model = exact_model_graph(&parts)?;
    let (m1, m2) = split_measures(&model, &DegreeSplit::new(&model, parts[0].clone())?)?;
    println!(
        "limiting measures of the model: {:?} and {:?}",
        m1.masses(),
        m2.masses()
    );

    // The forward direction: a union of two quasirandom graphs has the
    // predicted spectrum.
    let rep = union_spectrum_check(&chung_lu(&heavy_left, 1)?, &chung_lu(&heavy_right, 2)?)?;
    println!(
        "union check: rho1 {:.4} vs eta {:.4}, rest {:.4} vs eps {:.4}, all pass: {}",
        rep.rho1,
        rep.eta,
        rep.rest,
        rep.eps,
        rep.all_pass()
    );
    Ok(())
}
