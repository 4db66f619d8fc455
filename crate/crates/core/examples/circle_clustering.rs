//! Clustering 120 equally spaced points on a circle of circumference 2π:
//! the contiguous-arc solver is exact, Gonzalez and farthest point sampling
//! give certified brackets.

use mmsketch::clustering::{gonzalez_clustering, shatter_cyclic_arcs};
use mmsketch::instances::gen_circle;
use mmsketch::{fps_sketch_4approx, sketch_k_exact, ShatterSolver};
use std::f64::consts::PI;

fn main() -> mmsketch::Result<()> {
    let x = gen_circle(120)?;
    let s = x.space();
    println!(
        "{:>3} {:>10} {:>10} {:>10} {:>22}",
        "k", "arcs", "2π/k", "gonzalez", "fps sketch bracket"
    );
    for k in [1, 2, 3, 4, 6, 8, 12] {
        let arcs = shatter_cyclic_arcs(s, k)?;
        let g = gonzalez_clustering(s, k)?;
        let fps = fps_sketch_4approx(s, k, 0)?;
        println!(
            "{k:>3} {:>10.6} {:>10.6} {:>10.6} [{:>9.6}, {:>9.6}]",
            arcs.cost,
            (2.0 * PI / k as f64).min(PI),
            g.cost,
            fps.lower,
            fps.upper
        );
    }
    let sk = sketch_k_exact(s, 5, ShatterSolver::CyclicArcs)?;
    println!(
        "exact 5-point sketch of the circle: {:.6} ({})",
        sk.upper, sk.method
    );
    Ok(())
}
