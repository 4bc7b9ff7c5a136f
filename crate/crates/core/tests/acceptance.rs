//! End-to-end verification gate: runs every reference-scenario criterion
//! at the default operating point and prints one verdict line per item.
//! Run with `--nocapture` to see the lines for passing runs too.

use cvml_core::acceptance::{run_all, AcceptanceParams};

#[test]
fn all_reference_criteria_pass() {
    let params = AcceptanceParams::default();
    assert!(params.is_default_baseline());

    let outcomes = run_all(&params);
    assert_eq!(outcomes.len(), 14, "expected 14 criteria");

    for outcome in &outcomes {
        println!("{outcome}");
    }
    let failures: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
    assert!(
        failures.is_empty(),
        "{} criterion(s) failed:\n{}",
        failures.len(),
        failures
            .iter()
            .map(|o| o.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    );
}
