//! Sketching a metric measure space: the local-search Sturm pipeline versus
//! the weak partition-coupling bound.

use mmsketch::instances::random_mm_space;
use mmsketch::sketching::sturm_pipeline_factor;
use mmsketch::{sketch_sturm_fp_approx, weak_sketch_upper, Exponent};

fn main() -> mmsketch::Result<()> {
    let x = random_mm_space(14, 7);
    println!("random metric measure space on {} points", x.len());
    for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinite] {
        for k in [2, 3, 5] {
            let sturm = sketch_sturm_fp_approx(&x, k, p, 1, 0.1)?;
            let weak = weak_sketch_upper(&x, k, p)?;
            let factor = sturm_pipeline_factor(p.value(), 1, 0.1)
                .map_or("-".to_string(), |f| format!("{f:.2}"));
            println!(
                "p={p:<3} k={k}: sturm [{:.5}, {:.5}] factor {factor:>6}  weak upper {:.5}  {}",
                sturm.lower, sturm.upper, weak.upper, sturm.method
            );
        }
    }
    Ok(())
}
