//! The experiment pipelines behind each subcommand.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Params;
use crate::error::{CliError, CliResult};
use crate::output::{timestamp, write_atomic, Check, FileEntry, Manifest, OutFile, MANIFEST_NAME};

pub mod covariance;
pub mod curvature;
pub mod flow;
pub mod gap;
pub mod kazdan_warner;
pub mod lemma31;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Curvature,
    Covariance,
    Lemma31,
    Gap,
    KazdanWarner,
    Flow,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Curvature,
        Experiment::Covariance,
        Experiment::Lemma31,
        Experiment::Gap,
        Experiment::KazdanWarner,
        Experiment::Flow,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Curvature => "curvature",
            Experiment::Covariance => "covariance",
            Experiment::Lemma31 => "lemma31",
            Experiment::Gap => "gap",
            Experiment::KazdanWarner => "kazdan-warner",
            Experiment::Flow => "flow",
        }
    }
}

/// Where a produced file lives until the run is committed.
#[derive(Debug)]
pub enum Staged {
    Memory(OutFile),
    /// Already written to a temporary path in the run directory.
    Disk { name: String, tmp: PathBuf },
}

/// What an experiment hands back: files, checks and headline numbers.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<Staged>,
    pub checks: Vec<Check>,
    pub results: BTreeMap<String, serde_json::Value>,
}

impl Outcome {
    pub fn file(&mut self, f: OutFile) {
        self.files.push(Staged::Memory(f));
    }

    pub fn result(&mut self, key: &str, v: impl serde::Serialize) {
        self.results.insert(key.into(), serde_json::to_value(v).unwrap_or(serde_json::Value::Null));
    }
}

pub struct RunContext<'a> {
    pub seed: u64,
    pub dir: &'a Path,
}

enum Prepared {
    Curvature(curvature::Settings),
    Covariance(covariance::Settings),
    Lemma31(lemma31::Settings),
    Gap(gap::Settings),
    KazdanWarner(kazdan_warner::Settings),
    Flow(flow::Settings),
}

fn prepare(exp: Experiment, p: &mut Params) -> CliResult<Prepared> {
    Ok(match exp {
        Experiment::Curvature => Prepared::Curvature(curvature::settings(p)?),
        Experiment::Covariance => Prepared::Covariance(covariance::settings(p)?),
        Experiment::Lemma31 => Prepared::Lemma31(lemma31::settings(p)?),
        Experiment::Gap => Prepared::Gap(gap::settings(p)?),
        Experiment::KazdanWarner => Prepared::KazdanWarner(kazdan_warner::settings(p)?),
        Experiment::Flow => Prepared::Flow(flow::settings(p)?),
    })
}

fn execute(prepared: &Prepared, ctx: &RunContext) -> CliResult<Outcome> {
    match prepared {
        Prepared::Curvature(s) => curvature::run(s, ctx),
        Prepared::Covariance(s) => covariance::run(s, ctx),
        Prepared::Lemma31(s) => lemma31::run(s, ctx),
        Prepared::Gap(s) => gap::run(s, ctx),
        Prepared::KazdanWarner(s) => kazdan_warner::run(s, ctx),
        Prepared::Flow(s) => flow::run(s, ctx),
    }
}

/// Removes files a previous manifest in `dir` listed, so the directory holds
/// exactly the new inventory.
pub fn clear_previous(dir: &Path) -> CliResult<()> {
    let path = dir.join(MANIFEST_NAME);
    let Ok(text) = fs::read_to_string(&path) else { return Ok(()) };
    if let Ok(old) = serde_json::from_str::<Manifest>(&text) {
        for f in old.files {
            let p = dir.join(&f.name);
            if p.is_file() {
                fs::remove_file(p)?;
            }
        }
    }
    fs::remove_file(path)?;
    Ok(())
}

/// The output directory of `exp` under `root`.
pub fn run_dir(root: &Path, name: &str) -> PathBuf {
    root.join(name)
}

/// Validates `params`, runs `exp` and commits its files and manifest under
/// `root/<experiment>`. Nothing is written when validation fails. A numerical
/// failure still writes a manifest recording it.
pub fn run_experiment(exp: Experiment, mut params: Params, seed: Option<u64>, root: &Path) -> CliResult<Manifest> {
    params.expect_experiment(exp.name())?;
    let file_seed = params.get("seed", 0u64)?;
    let seed = seed.unwrap_or(file_seed);
    let prepared = prepare(exp, &mut params)?;
    params.finish()?;
    let mut config = params.echo().clone();
    config.insert("seed".into(), seed.to_string());

    let dir = run_dir(root, exp.name());
    fs::create_dir_all(&dir)?;
    clear_previous(&dir)?;
    let started = timestamp();
    let ctx = RunContext { seed, dir: &dir };
    let outcome = execute(&prepared, &ctx);
    let mut manifest = Manifest {
        artifact: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: exp.name().into(),
        config,
        seed,
        started,
        finished: String::new(),
        files: Vec::new(),
        checks: Vec::new(),
        status: String::new(),
        error: None,
        results: BTreeMap::new(),
    };
    match outcome {
        Ok(out) => {
            for f in out.files {
                let (name, path) = match f {
                    Staged::Memory(m) => (m.name.clone(), write_atomic(&dir, &m.name, &m.contents)?),
                    Staged::Disk { name, tmp } => {
                        let target = dir.join(&name);
                        fs::rename(&tmp, &target)?;
                        (name, target)
                    }
                };
                manifest.files.push(FileEntry { name, bytes: fs::metadata(path)?.len() });
            }
            manifest.checks = out.checks;
            manifest.results = out.results;
            manifest.status = if manifest.all_pass() { "pass" } else { "fail" }.into();
            manifest.finished = timestamp();
            commit_manifest(&dir, &manifest)?;
            Ok(manifest)
        }
        Err(e) => {
            manifest.checks = vec![Check::failed(format!("{} run", exp.name()), e.to_string())];
            manifest.status = "error".into();
            manifest.error = Some(e.to_string());
            manifest.finished = timestamp();
            commit_manifest(&dir, &manifest)?;
            Err(e)
        }
    }
}

pub fn commit_manifest(dir: &Path, m: &Manifest) -> CliResult<()> {
    let text = serde_json::to_vec_pretty(m).map_err(|e| CliError::Io(e.into()))?;
    write_atomic(dir, MANIFEST_NAME, &text)?;
    Ok(())
}
