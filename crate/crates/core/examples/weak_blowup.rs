//! On the equidistant space Δ_m with k = m/2, the Sturm sketch cost exceeds the
//! weak sketch cost by a factor that grows linearly in m.

use mmsketch::analysis::blowup_certificate;

fn main() -> mmsketch::Result<()> {
    println!(
        "{:>5} {:>5} {:>14} {:>14} {:>10} {:>8}",
        "m", "k", "sturm lower", "weak upper", "ratio", "m/6"
    );
    for j in 1..=6 {
        let r = blowup_certificate(j)?;
        println!(
            "{:>5} {:>5} {:>14.8} {:>14.8} {:>10.3} {:>8.3}",
            r.m,
            r.k,
            r.sturm_lower,
            r.weak_upper,
            r.ratio(),
            r.m as f64 / 6.0
        );
    }
    Ok(())
}
