//! Full acceptance grid: q in {5,7,9,11,13}, 2 <= n, m <= 10.

use std::io::Write;

use gfc_core::verify::{verify_suite, Report, VerifyConfig};

fn line(report: &Report, id: u32, title: &str, prefixes: &[&str]) -> bool {
    let by = report.by_suite();
    let (mut total, mut failed) = (0, 0);
    for p in prefixes {
        if let Some(s) = by.get(*p) {
            total += s.total;
            failed += s.failed;
        }
    }
    let ok = total > 0 && failed == 0;
    // direct write so the line shows up without --nocapture
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id} {title}: {} ({total} checks, {failed} failed)",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

#[test]
fn acceptance_grid() {
    let report = verify_suite(&VerifyConfig::acceptance()).expect("grid within guards");
    let results = [
        line(&report, 1, "genus agreement", &["genus"]),
        line(&report, 2, "orbit census", &["orbits", "rhp"]),
        line(&report, 3, "frobenius trichotomy", &["frobenius"]),
        line(&report, 4, "dickson audit", &["dickson"]),
        line(&report, 5, "quotient certificates", &["quotients"]),
        line(&report, 6, "group structure", &["groups"]),
        line(&report, 7, "interchange", &["interchange"]),
        line(&report, 8, "birational identities", &["equiv"]),
        line(&report, 9, "place-count oracle", &["places"]),
    ];
    let extra = line(&report, 0, "validator soundness", &["validator"]);
    for c in report.checks.iter().filter(|c| !c.pass) {
        let _ = writeln!(
            std::io::stderr(),
            "  failed: {} expected {} got {}",
            c.name, c.expected, c.actual
        );
    }
    assert!(report.grid_size > 400, "grid size {}", report.grid_size);
    assert!(results.iter().all(|&b| b) && extra);
}
