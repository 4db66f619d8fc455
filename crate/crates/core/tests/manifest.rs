use mmsketch::experiments::{run_manifest, Budgets, ExperimentManifest};
use std::path::Path;

#[test]
fn reference_values_manifest_passes() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("manifests/reference_values.manifest");
    let manifest = ExperimentManifest::load(&path).unwrap();
    let outcomes = run_manifest(&manifest, Budgets::default()).unwrap();
    assert_eq!(outcomes.len(), manifest.rows.len());
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{}: got {} expected {}", o.name, o.row.value, o.expected))
        .collect();
    assert!(failed.is_empty(), "{failed:#?}");
}

#[test]
fn manifest_rejects_missing_provenance_and_bad_tolerance() {
    let base = r#"
name = "bad"
[[row]]
name = "r"
instance = "delta m=4"
operation = "diam_p"
p = "1"
expected = 0.75
"#;
    assert!(
        ExperimentManifest::parse(&format!("{base}tolerance = 1e-9\nprovenance = \"\"\n")).is_err()
    );
    assert!(ExperimentManifest::parse(&format!(
        "{base}tolerance = 0.0\nprovenance = \"four points\"\n"
    ))
    .is_err());
    assert!(ExperimentManifest::parse(&format!(
        "{base}tolerance = 1e-9\nprovenance = \"four points\"\n"
    ))
    .is_ok());
}
