//! Frozen-seed runs of every verification suite. These are the same checks
//! the command line exposes; a failure here prints the offending check names
//! with their residuals and replay seeds.

use multilin::{run_all, run_suite, FamilyKind, SuiteReport, VerifyConfig};

fn failures(report: &SuiteReport) -> String {
    report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| {
            format!(
                "{} residual {:.3e} tol {:.1e} seed {}",
                c.name, c.residual, c.tol, c.seed
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn assert_suite_passes(suite: &str, cfg: &VerifyConfig) {
    let report = run_suite(suite, cfg).unwrap();
    assert!(report.passed, "{suite} failed: {}", failures(&report));
    assert!(!report.checks.is_empty());
}

#[test]
fn axioms_suite_passes_at_the_default_seed() {
    assert_suite_passes("axioms", &VerifyConfig::default());
}

#[test]
fn duality_suite_passes_at_the_default_seed() {
    assert_suite_passes("duality", &VerifyConfig::default());
}

#[test]
fn spectral_suite_passes_at_the_default_seed() {
    assert_suite_passes("spectral", &VerifyConfig::default());
}

#[test]
fn calculus_suite_passes_for_the_eigenbasis_product_family() {
    assert_suite_passes("calculus", &VerifyConfig::default());
}

#[test]
fn covariance_suite_passes_at_the_default_seed() {
    assert_suite_passes("covariance", &VerifyConfig::default());
}

#[test]
fn grid_suite_passes_at_the_default_seed() {
    assert_suite_passes("grid", &VerifyConfig::default());
}

#[test]
fn suites_hold_under_a_different_seed() {
    let cfg = VerifyConfig { seed: 20260819, ..VerifyConfig::default() };
    for suite in ["axioms", "duality", "spectral", "calculus", "covariance", "grid"] {
        assert_suite_passes(suite, &cfg);
    }
}

#[test]
fn calculus_suite_fails_for_the_pointwise_sum_family() {
    let cfg = VerifyConfig { family: FamilyKind::Add, ..VerifyConfig::default() };
    let report = run_suite("calculus", &cfg).unwrap();
    assert!(!report.passed);
    let compat = report
        .checks
        .iter()
        .find(|c| c.name == "compatibility")
        .expect("compatibility runs in the calculus suite");
    assert!(!compat.passed);
    assert!(compat.residual > 0.05, "residual {:.3e}", compat.residual);
    // Addition commutes with every polynomial only slot by slot; the checks
    // that never combine slots still pass.
    for name in ["univariate_agreement", "poly_category_laws", "locality"] {
        let check = report.checks.iter().find(|c| c.name == name).unwrap();
        assert!(check.passed, "{name} residual {:.3e}", check.residual);
    }
}

#[test]
fn suite_reports_replay_exactly() {
    let cfg = VerifyConfig { seed: 99, ..VerifyConfig::default() };
    let first = run_suite("spectral", &cfg).unwrap();
    let second = run_suite("spectral", &cfg).unwrap();
    assert_eq!(first, second);
}

#[test]
fn family_choice_leaves_family_free_suites_untouched() {
    let mult = run_suite("grid", &VerifyConfig::default()).unwrap();
    let add = run_suite(
        "grid",
        &VerifyConfig { family: FamilyKind::Add, ..VerifyConfig::default() },
    )
    .unwrap();
    assert_eq!(mult.checks, add.checks);
}

#[test]
fn run_all_covers_every_suite_once() {
    let reports = run_all(&VerifyConfig::default()).unwrap();
    let names: Vec<&str> = reports.iter().map(|r| r.suite.as_str()).collect();
    assert_eq!(names, ["axioms", "duality", "spectral", "calculus", "covariance", "grid"]);
}
