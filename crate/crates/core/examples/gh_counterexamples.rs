//! Spaces whose closest 3-point space in Gromov–Hausdorff distance is not one
//! of their own subsets.

use mmsketch::correspondence::DEFAULT_GH_BUDGET;
use mmsketch::instances::{gen_euclidean_counterexample, gen_tree_counterexample};
use mmsketch::sketching::subsets_of_size;
use mmsketch::{gh_oracle, FiniteMetricSpace};

fn report(name: &str, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> mmsketch::Result<()> {
    let xy = gh_oracle(x, y, DEFAULT_GH_BUDGET)?;
    println!(
        "{name}: d_GH(X, Y) = {:.6} with |Y| = {}",
        xy.value(),
        y.len()
    );
    let mut best = f64::INFINITY;
    for k in subsets_of_size(x.len(), y.len()) {
        let v = gh_oracle(x, &x.subspace(&k), DEFAULT_GH_BUDGET)?.value();
        let labels: Vec<usize> = k.iter().map(|i| i + 1).collect();
        println!("  K = {labels:?}: {v:.6}");
        best = best.min(v);
    }
    println!("  best subset {best:.6} > {:.6}", xy.value());
    Ok(())
}

fn main() -> mmsketch::Result<()> {
    let (tx, ty) = gen_tree_counterexample(1)?;
    report("tree", &tx, &ty)?;
    let (ex, ey) = gen_euclidean_counterexample(1)?;
    report("plane", &ex, &ey)
}
