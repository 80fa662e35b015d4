use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use paneitz_cli::output::Manifest;

fn paneitz(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paneitz")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn manifest(dir: &Path) -> Manifest {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    v.sort();
    v
}

#[test]
fn empty_alpha_grid_is_a_config_error_and_writes_nothing() {
    let out = tempfile::tempdir().unwrap();
    let r = paneitz(out.path(), &["gap", "--set", "alphas="]);
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(listing(out.path()).is_empty());
}

#[test]
fn unknown_key_and_corrupted_config_exit_2() {
    let out = tempfile::tempdir().unwrap();
    let r = paneitz(out.path(), &["lemma31", "--set", "colour=blue"]);
    assert_eq!(r.status.code(), Some(2));
    let cfg = out.path().join("bad.toml");
    fs::write(&cfg, "n = [1, \n epsilon = ").unwrap();
    let r = paneitz(out.path(), &["verify-all", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    fs::write(&cfg, "[nested]\nn = 8\n").unwrap();
    let r = paneitz(out.path(), &["gap", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn gap_example_writes_three_rows() {
    let out = tempfile::tempdir().unwrap();
    let cfg = out.path().join("gap.toml");
    fs::write(&cfg, "experiment = \"gap\"\nn = 10\nalphas = [1e-2, 3e-3, 1e-3]\nepsilon = 0.1\nw2 = 1\n").unwrap();
    let r = paneitz(out.path(), &["gap", "--config", cfg.to_str().unwrap()]);
    let code = r.status.code();
    assert!(code == Some(0) || code == Some(1), "{}", String::from_utf8_lossy(&r.stderr));
    let dir = out.path().join("gap");
    let text = fs::read_to_string(dir.join("gap.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().next().unwrap().contains("log_ratio"));
    let m = manifest(&dir);
    assert_eq!(m.checks.len(), 1);
    assert!(m.checks[0].name.starts_with("bound < q(S^10)"));
    assert_eq!(code == Some(0), m.all_pass());
}

#[test]
fn reruns_are_byte_identical_and_inventory_matches_disk() {
    let out = tempfile::tempdir().unwrap();
    for (exp, csv) in [
        ("curvature", "curvature.csv"),
        ("covariance", "covariance.csv"),
        ("lemma31", "lemma31.csv"),
        ("kazdan-warner", "kazdan_warner.csv"),
        ("flow", "trajectory.csv"),
    ] {
        let args = [exp, "--seed", "7", "--set", "n=6"];
        let args: &[&str] = if exp == "lemma31" { &[exp, "--seed", "7"] } else { &args };
        let r1 = paneitz(out.path(), args);
        assert!(matches!(r1.status.code(), Some(0 | 1)), "{exp}: {}", String::from_utf8_lossy(&r1.stderr));
        let dir = out.path().join(exp);
        let first = fs::read(dir.join(csv)).unwrap();
        paneitz(out.path(), args);
        assert_eq!(first, fs::read(dir.join(csv)).unwrap(), "{exp}");
        let m = manifest(&dir);
        assert_eq!(m.seed, 7);
        let mut listed: Vec<String> = m.files.iter().map(|f| f.name.clone()).collect();
        listed.push("manifest.json".into());
        listed.sort();
        assert_eq!(listed, listing(&dir), "{exp}");
        for f in &m.files {
            assert_eq!(fs::metadata(dir.join(&f.name)).unwrap().len(), f.bytes);
        }
    }
}

#[test]
fn flow_writes_checkpoints() {
    let out = tempfile::tempdir().unwrap();
    let r = paneitz(out.path(), &["flow", "--set", "t_max=5", "--set", "checkpoint_every=4"]);
    assert!(matches!(r.status.code(), Some(0 | 1)));
    let dir = out.path().join("flow");
    let lines = fs::read_to_string(dir.join("checkpoints.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["t"], 0.0);
    assert!(first["u"]["coeffs"].is_array());
    let traj = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().next().unwrap(), "t,mu,F2,volume,min_u,H");
}

#[test]
fn tightened_kw_tolerance_fails_only_that_check() {
    let out = tempfile::tempdir().unwrap();
    let loose = paneitz(out.path(), &["verify-all"]);
    let base: Vec<String> = manifest(&out.path().join("verify-all"))
        .checks
        .into_iter()
        .filter(|c| !c.pass)
        .map(|c| c.name)
        .collect();
    assert!(matches!(loose.status.code(), Some(0 | 1)));
    let r = paneitz(out.path(), &["verify-all", "--set", "kw_tol=1e-16"]);
    assert_eq!(r.status.code(), Some(1));
    let m = manifest(&out.path().join("verify-all"));
    let newly: Vec<String> =
        m.checks.iter().filter(|c| !c.pass && !base.contains(&c.name)).map(|c| c.name.clone()).collect();
    assert_eq!(newly, vec!["[5] |KW integral| / scale".to_string()]);
    assert_eq!(m.config.get("kw_tol").map(String::as_str), Some("0.0000000000000001"));
}

#[test]
fn numeric_failure_exits_3_with_error_manifest() {
    let out = tempfile::tempdir().unwrap();
    // the perturbation makes u0 negative somewhere
    let r = paneitz(out.path(), &["flow", "--set", "amplitude=-5", "--set", "n=6", "--set", "K=8"]);
    assert_eq!(r.status.code(), Some(3), "{}", String::from_utf8_lossy(&r.stderr));
    let m = manifest(&out.path().join("flow"));
    assert_eq!(m.status, "error");
    assert!(m.files.is_empty());
    assert_eq!(listing(&out.path().join("flow")), vec!["manifest.json".to_string()]);
}
