//! The reproduction gate: every headline criterion, one pass/fail line each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the table;
//! the same suite backs `qcar reproduce`.

use qca_renorm::acceptance;

#[test]
fn acceptance_suite() {
    let criteria = acceptance::run_all(None).expect("suite must run to completion");
    assert_eq!(criteria.len(), 10);
    let mut failed = Vec::new();
    for c in &criteria {
        println!(
            "criterion {:>2}: {:4}  {}",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.name
        );
        for line in &c.checks {
            println!(
                "    [{}] {} (measured {:.4e}, expected {:.4e}, tol {:.1e})",
                if line.passed { "ok" } else { "XX" },
                line.check,
                line.measured,
                line.expected,
                line.tolerance
            );
            if !line.passed {
                failed.push(format!("criterion {}: {}", c.id, line.check));
            }
        }
    }
    assert!(failed.is_empty(), "failed checks:\n{}", failed.join("\n"));
}

#[test]
fn tampered_tolerance_fails() {
    // forcing an absurd bound must flip the suite red (the failure path of
    // the reproduction harness is itself exercised)
    let bounds = acceptance::Bounds::forced(1e-30);
    let c1 = acceptance::criterion_1(&bounds).unwrap();
    assert!(!c1.passed, "1e-30 residual bounds cannot hold");
}
