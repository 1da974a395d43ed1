//! Degree, spectral, discrepancy and cut distances between graphs of
//! different sizes, compared through their lifts to `[0, 1]`.

use graphlets::distances::{
    cut_distance, degree_distribution_distance, disc_distance, equivalence_check, spectral_distance,
};
use graphlets::generators::{blowup, chung_lu, complete, cycle};
use graphlets::subsets::Mode;

fn main() -> graphlets::Result<()> {
    let k3 = complete(3)?;
    let k6 = complete(6)?;
    let c6 = cycle(6)?;
    for (name, a, b) in [("K3 vs K6", &k3, &k6), ("K6 vs C6", &k6, &c6), ("K3 vs C6", &k3, &c6)] {
        let spec = spectral_distance(a, b)?;
        let disc = disc_distance(a, b, Mode::Exact)?;
        println!(
            "{name}: degree {:.4}  spectral {:.4}  disc {:.4}",
            degree_distribution_distance(a, b),
            spec.value,
            disc.value
        );
    }
    // The cut distance compares labeled graphs on the same vertex set.
    println!("K6 vs C6: cut {:.4}", cut_distance(&k6, &c6, Mode::Exact)?.value);

    // A blow-up has the same lift as the original graph.
    let c5 = cycle(5)?;
    println!(
        "C5 vs blowup(C5, 2): spectral {:.2e}",
        spectral_distance(&c5, &blowup(&c5, 2)?)?.value
    );

    // The two directions of the equivalence between the distances.
    let (a, b) = (chung_lu(&[4.0; 10], 1)?, chung_lu(&[4.0; 10], 2)?);
    let rep = equivalence_check(&a, &b)?;
    println!(
        "random pair: eps_disc {:.4} <= eps_spec {:.4} + 4*gap {:.4}: {}",
        rep.eps_disc, rep.eps_spec, rep.degree_gap, rep.forward_holds
    );
    Ok(())
}
