//! The graph built from a set-cover instance, and an exhaustive comparison of
//! "k subsets cover" with "k + 1 blocks of diameter at most 2".

use mmsketch::instances::{
    all_setcover_instances, reduction_equivalence_check, setcover_to_graph, SetCoverInstance,
};

fn main() -> mmsketch::Result<()> {
    let yes = SetCoverInstance::new(4, vec![vec![0, 1], vec![2, 3], vec![1, 2]], 2)?;
    let triangle = SetCoverInstance::new(3, vec![vec![0, 1], vec![0, 2], vec![1, 2]], 1)?;
    for inst in [&yes, &triangle] {
        let (g, layout) = setcover_to_graph(inst);
        let c = reduction_equivalence_check(inst)?;
        println!(
            "subsets {:?}, k={}: graph on {} vertices (r = {}, r' = {}), cover {}, partition {} (max diameter {})",
            inst.subsets(),
            inst.k(),
            g.len(),
            layout.r,
            layout.r_prime,
            c.has_cover,
            c.has_partition,
            c.shatter
        );
        println!("  best partition {:?}", c.partition.blocks());
    }

    let all = all_setcover_instances(3, 4, 2);
    let mut disagree = 0;
    for inst in &all {
        if !reduction_equivalence_check(inst)?.agree() {
            disagree += 1;
        }
    }
    println!(
        "{} instances with n <= 3, m <= 4, k <= 2: {disagree} where the two sides differ",
        all.len()
    );
    Ok(())
}
