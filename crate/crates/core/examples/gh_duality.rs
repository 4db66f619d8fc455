//! Sketching a random metric space with k points: the exact sketch equals half
//! of the optimal max-diameter partition, and the maps between partitions and
//! couplings carry one to the other.

use mmsketch::instances::random_metric;
use mmsketch::sketching::partition_correspondence;
use mmsketch::{
    canonical_coupling_dr, gh_oracle, hausdorff_map, sketch_k_2approx, sketch_k_exact, voronoi_map,
    ShatterSolver,
};

fn main() -> mmsketch::Result<()> {
    let x = random_metric(9, 42);
    println!(
        "random metric on {} points, diameter {:.4}",
        x.len(),
        x.diam()
    );

    for k in 1..=4 {
        let exact = sketch_k_exact(
            &x,
            k,
            ShatterSolver::Brute {
                max_partitions: 1_000_000,
            },
        )?;
        let approx = sketch_k_2approx(&x, k)?;
        let model = exact.model.space();
        let gh = gh_oracle(&x, model, mmsketch::correspondence::DEFAULT_GH_BUDGET)?;
        println!(
            "k={k}: exact sketch {:.6}  d_GH(X, model) {:.6}  gonzalez sketch in [{:.6}, {:.6}]",
            exact.upper,
            gh.value(),
            approx.lower,
            approx.upper
        );
    }

    let k = 3;
    let best = ShatterSolver::Brute {
        max_partitions: 1_000_000,
    }
    .solve(&x, k)?;
    let model = hausdorff_map(&x, &best.partition)?;
    let r = partition_correspondence(&best.partition);
    let coupling = canonical_coupling_dr(&r, &x, &model)?;
    let back = voronoi_map(&x, &model, &coupling)?;
    println!("partition      {:?}", best.partition.blocks());
    println!("voronoi image  {:?}", back.canonical().blocks());
    println!(
        "coupling hausdorff distance {:.6} = half the max diameter {:.6}",
        coupling.hausdorff(),
        best.cost / 2.0
    );
    Ok(())
}
