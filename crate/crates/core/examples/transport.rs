//! Optimal transport on a finite metric space: W_p between two measures on a
//! grid, the transport plan, and the one-point Sturm problem.

use mmsketch::instances::gen_interval_grid;
use mmsketch::{sturm_one_point, wasserstein, Exponent};

fn main() -> mmsketch::Result<()> {
    let x = gen_interval_grid(8)?;
    let n = x.len();
    let left: Vec<f64> = (0..n)
        .map(|i| if i < 3 { 1.0 / 3.0 } else { 0.0 })
        .collect();
    let right: Vec<f64> = (0..n).map(|i| if i + 2 >= n { 0.5 } else { 0.0 }).collect();

    for p in [
        Exponent::ONE,
        Exponent::TWO,
        Exponent::Finite(4.0),
        Exponent::Infinite,
    ] {
        let (w, _) = wasserstein(x.space(), &left, &right, p)?;
        println!("W_{p} = {w:.6}");
    }
    let (_, plan) = wasserstein(x.space(), &left, &right, Exponent::ONE)?;
    println!("W_1 plan:");
    for (i, j, m) in plan.support() {
        println!("  {i} -> {j}  mass {m:.6}");
    }

    for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinite] {
        let (value, dist) = sturm_one_point(&x, p)?;
        let shown: Vec<String> = dist.iter().map(|d| format!("{d:.3}")).collect();
        println!(
            "one-point Sturm p={p}: {value:.6}, distances [{}]",
            shown.join(" ")
        );
    }
    Ok(())
}
