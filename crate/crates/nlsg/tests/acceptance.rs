//! Acceptance gate: runs every verification suite and prints one pass/fail
//! line per criterion (`cargo test --test acceptance -- --nocapture` to see
//! the table on success; failures always show it).
//!
//! The criteria are the ten suites of `nlsg::suites`, in registry order;
//! all instance counts, seeds, and tolerances are pinned there.

use nlsg::suites::{run_suite, SUITE_NAMES};

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    for (i, name) in SUITE_NAMES.iter().enumerate() {
        let report = match run_suite(name) {
            Ok(r) => r,
            Err(e) => {
                println!("criterion {:2} {name:<24} ERROR  {e}", i + 1);
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        let verdict = if report.passed { "PASS" } else { "FAIL" };
        println!("criterion {:2} {name:<24} {verdict}  {}", i + 1, report.detail);
        if !report.passed {
            failures.push(format!("{name}: {}", report.detail));
        }
    }
    assert!(
        failures.is_empty(),
        "{} criterion(s) failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}
