//! Bipartite certificates: expectation `2 d_x d_y / vol` across the sides,
//! nothing inside them.

use graphlets::generators::{bipartite_quasirandom, complete_bipartite};
use graphlets::quasirandom::{bipartite_epsilon_discrepancy, bipartite_epsilon_spectral};
use graphlets::spectral::spectrum;
use graphlets::subsets::Mode;

fn main() -> graphlets::Result<()> {
    let k = complete_bipartite(3, 5)?;
    let x = [0, 1, 2];
    println!(
        "K_3,5: spectral {:.2e}",
        bipartite_epsilon_spectral(&k, &x, false)?.epsilon
    );
    println!(
        "K_3,5 with unit factor: spectral {:.4}",
        bipartite_epsilon_spectral(&k, &x, true)?.epsilon
    );
    println!(
        "K_3,5: discrepancy {:.2e}",
        bipartite_epsilon_discrepancy(&k, &x, Mode::Exact, false)?.epsilon
    );

    let g = bipartite_quasirandom(&vec![30.0; 150], &vec![20.0; 225], 3)?;
    let side: Vec<usize> = (0..150).collect();
    let rho = spectrum(&g)?.rho;
    println!(
        "random bipartite: eps {:.4}, rho range [{:.4}, {:.4}]",
        bipartite_epsilon_spectral(&g, &side, false)?.epsilon,
        rho[rho.len() - 1],
        rho[0]
    );
    Ok(())
}
