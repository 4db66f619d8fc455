//! Doubling constants, the small-ball profile f_δ / v_δ, and the bound that
//! turns a small weak sketch cost into a small Sturm sketch cost.

use mmsketch::analysis::{doubling_bound_check, doubling_constant, v_delta};
use mmsketch::instances::{gen_delta, gen_interval_grid};

fn main() -> mmsketch::Result<()> {
    for (name, x) in [
        ("grid 32", gen_interval_grid(32)?),
        ("grid 64", gen_interval_grid(64)?),
        ("delta 8", gen_delta(8)?),
    ] {
        let dc = doubling_constant(&x);
        let w = dc.argmax().map_or(String::new(), |w| {
            format!(" at center {} radius {:.4}", w.center, w.radius)
        });
        println!("{name}: doubling constant {:.3}{w}", dc.c);
        for delta in [0.01, 0.05, 0.2] {
            println!("  v_{delta} = {:.6}", v_delta(&x, delta)?);
        }
        let b = doubling_bound_check(&x, 4, 1.0)?;
        println!(
            "  k=4 p=1: weak delta {:.6}, sturm upper {:.6}, bound {:.6}, precondition {}, chain holds {}",
            b.delta,
            b.sturm_upper,
            b.rhs,
            b.precondition_met,
            b.chain_holds()
        );
    }
    Ok(())
}
