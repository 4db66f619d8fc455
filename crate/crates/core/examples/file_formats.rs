//! Writing and reading the plain-text formats: spaces, partitions, sketches
//! and set-cover instances, then running a small experiment manifest.

use mmsketch::experiments::{run_manifest, Budgets, ExperimentManifest};
use mmsketch::instances::{random_mm_space, SetCoverInstance};
use mmsketch::io::{
    parse_partition, parse_setcover, parse_space, write_mm_space, write_partition, write_setcover,
    write_sketch,
};
use mmsketch::{sketch_k_exact, ShatterSolver};

const MANIFEST: &str = r#"
name = "demo"

[[row]]
name = "delta8-phi"
instance = "delta m=8"
operation = "shatter"
k = 4
p = "1"
q = "inf"
expected = 0.5
tolerance = 1e-12
provenance = "equidistant space, four blocks"

[[row]]
name = "circle-diam"
instance = "circle n=60"
operation = "diam_p"
p = "inf"
expected = 3.141592653589793
tolerance = 1e-9
provenance = "antipodal samples"
"#;

fn main() -> mmsketch::Result<()> {
    let x = random_mm_space(5, 3);
    let text = write_mm_space(&x);
    println!("space file:\n{text}");
    let back = parse_space(&text)?.require_measure()?;
    assert_eq!(back.len(), 5);

    let sk = sketch_k_exact(
        x.space(),
        2,
        ShatterSolver::Brute {
            max_partitions: 10_000,
        },
    )?;
    let files = write_sketch(&sk);
    println!("sketch model:\n{}", files.model);
    println!("sketch relation:\n{}", files.relation);
    println!("{}", files.bounds);

    let part = ShatterSolver::Brute {
        max_partitions: 10_000,
    }
    .solve(x.space(), 2)?
    .partition;
    let ptext = write_partition(&part);
    println!("partition file:\n{ptext}");
    assert_eq!(parse_partition(&ptext, 5)?.canonical(), part.canonical());

    let sc = SetCoverInstance::new(3, vec![vec![0, 1], vec![2]], 2)?;
    let sctext = write_setcover(&sc);
    println!("set cover file:\n{sctext}");
    assert_eq!(parse_setcover(&sctext)?, sc);

    let manifest = ExperimentManifest::parse(MANIFEST)?;
    for o in run_manifest(&manifest, Budgets::default())? {
        println!(
            "{}: got {:.12}, expected {:.12}, {}",
            o.name,
            o.row.value,
            o.expected,
            if o.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
