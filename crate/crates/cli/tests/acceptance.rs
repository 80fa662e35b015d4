//! One test per acceptance criterion, each printing its pass/fail line.

use std::process::Command;
use std::time::Instant;

use paneitz_cli::output::render_checks;
use paneitz_cli::verify::{self, summary_line, CriterionResult, Suite};

fn report(r: CriterionResult) {
    println!("{}", summary_line(&r));
    print!("{}", render_checks(&r.checks));
    assert!(r.pass(), "{}", summary_line(&r));
}

#[test]
fn criterion_1_sphere_q_curvature() {
    report(verify::criterion1(&Suite::default()));
}

#[test]
fn criterion_2_paneitz_sobolev_constant() {
    report(verify::criterion2(&Suite::default()));
}

#[test]
fn criterion_3_sigma_integral_regimes() {
    report(verify::criterion3(&Suite::default()));
}

#[test]
fn criterion_4_gap_certificate() {
    report(verify::criterion4(&Suite::default()));
}

#[test]
fn criterion_5_kazdan_warner() {
    report(verify::criterion5(&Suite::default()));
}

#[test]
fn criterion_6_flow_diagnostics() {
    report(verify::criterion6(&Suite::default()));
}

#[test]
fn criterion_7_conformal_covariance() {
    report(verify::criterion7(&Suite::default()));
}

#[test]
fn criterion_8_verify_all_binary() {
    let out = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let run = Command::new(env!("CARGO_BIN_EXE_paneitz"))
        .args(["verify-all", "--out"])
        .arg(out.path())
        .output()
        .expect("binary runs");
    let secs = start.elapsed().as_secs_f64();
    let code = run.status.code();
    let pass = code == Some(0) && secs < 300.0;
    println!(
        "criterion 8: {} (verify-all exit {:?}, {secs:.2} s of 300 s)",
        if pass { "PASS" } else { "FAIL" },
        code
    );
    print!("{}", String::from_utf8_lossy(&run.stdout));
    assert!(pass, "verify-all exit {code:?} after {secs:.2} s");
}
