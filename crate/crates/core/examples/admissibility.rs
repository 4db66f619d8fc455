//! Clustering objectives on the stacked grids Y_{n,k}: the ultrametric and
//! Φ̄ shatters stay flat while Φ_{p,p} and the covering radius track the
//! spacing.

use mmsketch::analysis::admissibility_report;

fn main() -> mmsketch::Result<()> {
    println!(
        "{:>4} {:>3} {:>10} {:>10} {:>10} {:>10} {:>6}",
        "n", "k", "ultra", "phi_bar", "phi_pp", "cov", "exact"
    );
    for row in admissibility_report(&[2, 4, 8, 16], &[2, 3], 2.0)? {
        println!(
            "{:>4} {:>3} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>6}",
            row.n, row.k, row.phi_u, row.phi_bar, row.phi_p, row.cov.value, row.cov.exact
        );
    }
    Ok(())
}
