use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use paneitz_cli::config::Params;
use paneitz_cli::error::{CliError, CliResult};
use paneitz_cli::experiments::{clear_previous, commit_manifest, run_dir, run_experiment, Experiment};
use paneitz_cli::output::{render_checks, timestamp, write_atomic, Check, FileEntry, Manifest, OutFile};
use paneitz_cli::verify::{run_all, summary_line, table, Suite};

#[derive(Parser)]
#[command(name = "paneitz", version, about = "Numerical experiments on the Paneitz operator and Q-curvature")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat TOML file of parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root; each experiment writes to a subdirectory.
    #[arg(long, env = "PANEITZ_OUT", default_value = "paneitz-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Parameter override, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature of a chart at random points.
    Curvature(Common),
    /// Conformal covariance residuals on the flat chart.
    Covariance(Common),
    /// The sigma-integral of the Weyl coefficient over an alpha grid.
    Lemma31(Common),
    /// The quotient bound of the localised bubble.
    Gap(Common),
    /// Kazdan-Warner integrals and companion invariance.
    KazdanWarner(Common),
    /// The nonlocal flow from a perturbed constant.
    Flow(Common),
    /// The full acceptance suite.
    VerifyAll(Common),
}

fn experiment(exp: Experiment, c: &Common) -> CliResult<bool> {
    let params = Params::load(c.config.as_deref(), &c.sets)?;
    let m = run_experiment(exp, params, c.seed, &c.out)?;
    print!("{}", render_checks(&m.checks));
    println!("{}: {} -> {}", exp.name(), m.status, run_dir(&c.out, exp.name()).display());
    Ok(m.all_pass())
}

const VERIFY: &str = "verify-all";

fn verify_all(c: &Common) -> CliResult<bool> {
    let mut params = Params::load(c.config.as_deref(), &c.sets)?;
    params.expect_experiment(VERIFY)?;
    let mut suite = Suite::from_params(&mut params)?;
    params.finish()?;
    if let Some(s) = c.seed {
        suite.seed = s;
    }
    let mut config = params.echo().clone();
    config.insert("seed".into(), suite.seed.to_string());
    let started = timestamp();
    let results = run_all(&suite);

    let checks: Vec<Check> = results
        .iter()
        .flat_map(|r| r.checks.iter().map(move |ch| Check { name: format!("[{}] {}", r.id, ch.name), ..ch.clone() }))
        .collect();
    print!("{}", render_checks(&checks));
    for r in &results {
        println!("{}", summary_line(r));
    }
    let pass = checks.iter().all(|ch| ch.pass);
    write_verify(&c.out, config, suite.seed, started, &results, checks)?;
    Ok(pass)
}

fn write_verify(
    root: &Path,
    config: BTreeMap<String, String>,
    seed: u64,
    started: String,
    results: &[paneitz_cli::verify::CriterionResult],
    checks: Vec<Check>,
) -> CliResult<()> {
    let dir = run_dir(root, VERIFY);
    std::fs::create_dir_all(&dir)?;
    clear_previous(&dir)?;
    let f = OutFile::csv("verify_all.csv", &table(results));
    let path = write_atomic(&dir, &f.name, &f.contents)?;
    let mut res = BTreeMap::new();
    for r in results {
        res.insert(format!("criterion_{}_seconds", r.id), serde_json::json!(r.seconds));
    }
    let all = checks.iter().all(|ch| ch.pass);
    let m = Manifest {
        artifact: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: VERIFY.into(),
        config,
        seed,
        started,
        finished: timestamp(),
        files: vec![FileEntry { name: f.name, bytes: std::fs::metadata(path)?.len() }],
        checks,
        status: if all { "pass" } else { "fail" }.into(),
        error: None,
        results: res,
    };
    commit_manifest(&dir, &m)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Curvature(c) => experiment(Experiment::Curvature, c),
        Command::Covariance(c) => experiment(Experiment::Covariance, c),
        Command::Lemma31(c) => experiment(Experiment::Lemma31, c),
        Command::Gap(c) => experiment(Experiment::Gap, c),
        Command::KazdanWarner(c) => experiment(Experiment::KazdanWarner, c),
        Command::Flow(c) => experiment(Experiment::Flow, c),
        Command::VerifyAll(c) => verify_all(c),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let code: u8 = match e {
                CliError::Config(_) => 2,
                CliError::Numeric(_) => 3,
                CliError::Io(_) => 4,
            };
            ExitCode::from(code)
        }
    }
}
