//! The dense universal basis on a blow-up: eigenfunctions of the base graph
//! made constant on blocks, plus Fourier modes inside each block.

use graphlets::generators::{blowup, dense_universal_basis, path};

fn main() -> graphlets::Result<()> {
    let h = path(3)?;
    let m = 4;
    let basis = dense_universal_basis(&h, m)?;
    let b = &blowup(&h, m)?;
    println!(
        "{} primary and {} complementary vectors on {} vertices",
        basis.primary.len(),
        basis.complementary.len(),
        b.n()
    );
    let worst = basis
        .complementary
        .iter()
        .flat_map(|c| basis.primary.iter().map(move |p| b.mu_inner(c, p).abs()))
        .fold(0.0_f64, f64::max);
    println!("max |<complementary, primary>_mu| = {worst:.2e}");
    for (i, p) in basis.primary.iter().enumerate() {
        let walked = b.walk_apply(p);
        let ratio = walked
            .iter()
            .zip(p)
            .find(|(_, x)| x.abs() > 1e-9)
            .map(|(w, x)| w / x)
            .unwrap_or(0.0);
        println!("primary {i}: walk eigenvalue {ratio:.4}");
    }
    Ok(())
}
