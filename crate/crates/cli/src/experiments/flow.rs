//! The nonlocal flow from a perturbed fixed-point constant.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::mpsc;
use std::thread;

use paneitz_core::flow::{fixed_point_constant, mu_of, run as run_flow, FlowConfig, FlowState, MuNormalization, Trajectory};
use paneitz_core::spectral::{ZonalBasis, ZonalField};

use super::{Outcome, RunContext, Staged};
use crate::config::{require, Params};
use crate::error::{invalid, CliError, CliResult};
use crate::output::{Check, Table};

pub const CHECKPOINTS: &str = "checkpoints.jsonl";

#[derive(Clone, Debug)]
pub struct Settings {
    pub flow: FlowConfig,
    pub amplitude: f64,
    pub degree: usize,
    pub f2_target: f64,
    pub mu_tol: f64,
}

pub fn settings(p: &mut Params) -> CliResult<Settings> {
    let d = FlowConfig::default();
    let n: u32 = p.get("n", 8)?;
    let k: usize = p.get("K", 64)?;
    require(k >= 2, "K must be at least 2")?;
    let norm: String = p.get("normalization", d.normalization.name().to_string())?;
    let flow = FlowConfig {
        n,
        k,
        dt_init: p.get("dt_init", d.dt_init)?,
        dt_min: p.get("dt_min", d.dt_min)?,
        dt_max: p.get("dt_max", d.dt_max)?,
        tol: p.get("tol", d.tol)?,
        t_max: p.get("t_max", d.t_max)?,
        f2_stop: p.get("f2_stop", 0.0)?,
        checkpoint_every: p.get("checkpoint_every", d.checkpoint_every)?,
        max_steps: p.get("max_steps", d.max_steps)?,
        normalization: invalid(MuNormalization::parse(&norm))?,
    };
    invalid(flow.validate())?;
    let degree: usize = p.get("degree", 2)?;
    require(degree <= k, "degree must not exceed K")?;
    Ok(Settings {
        flow,
        amplitude: p.get("amplitude", 0.05)?,
        degree,
        f2_target: p.get("f2_target", 1e-8)?,
        mu_tol: p.get("mu_tol", 1e-8)?,
    })
}

pub fn initial_data(s: &Settings) -> ZonalField<f64> {
    let (n, k) = (s.flow.n, s.flow.k);
    ZonalField::constant(n, k, fixed_point_constant::<f64>(n)).axpy(s.amplitude, &ZonalField::harmonic(n, k, s.degree))
}

/// Runs the flow, handing checkpoints to a writer thread that streams them to `sink`.
/// Returns the trajectory and the Sobolev quotient at every checkpoint.
pub fn integrate(s: &Settings, sink: Option<PathBuf>) -> CliResult<(Trajectory<f64>, Vec<f64>)> {
    let b = ZonalBasis::with_oversampling(s.flow.n, s.flow.k)?;
    let u0 = initial_data(s);
    let (tx, rx) = mpsc::channel::<FlowState<f64>>();
    let writer = sink.map(|path| {
        thread::spawn(move || -> std::io::Result<()> {
            let mut w = BufWriter::new(fs::File::create(&path)?);
            for st in rx {
                serde_json::to_writer(&mut w, &st)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
            w.get_ref().sync_all()
        })
    });
    let mut quotients = Vec::new();
    let mut quotient_err = None;
    let traj = run_flow(&s.flow, &b, &u0, |st| {
        match mu_of(&b, &st.u) {
            Ok(q) => quotients.push(q),
            Err(e) => quotient_err = Some(e),
        }
        if writer.is_some() {
            let _ = tx.send(st.clone());
        }
    });
    drop(tx);
    if let Some(h) = writer {
        h.join().map_err(|_| CliError::Io(std::io::Error::other("checkpoint writer panicked")))??;
    }
    let traj = traj?;
    if let Some(e) = quotient_err {
        return Err(e.into());
    }
    Ok((traj, quotients))
}

pub struct Verdict {
    pub checks: Vec<Check>,
}

/// The flow checks on a finished trajectory.
pub fn verdict(s: &Settings, traj: &Trajectory<f64>) -> Verdict {
    let d = &traj.diagnostics;
    let min_u = traj.samples.iter().map(|x| x.min_u).fold(f64::INFINITY, f64::min);
    // worst violation of 1 − √F₂ ≤ H/F₂ ≤ 1 over samples with F₂ < 1e-2
    let mut h_violation = 0.0_f64;
    let mut h_count = 0usize;
    for x in traj.samples.iter().filter(|x| x.f2 > 0.0 && x.f2 < 1e-2) {
        let r = x.h / x.f2;
        h_violation = h_violation.max(r - 1.0).max(1.0 - x.f2.sqrt() - r);
        h_count += 1;
    }
    let checks = vec![
        Check::at_most("flow: max relative μ increase per step", d.max_mu_increase, s.mu_tol)
            .with_detail(format!("{} accepted, {} rejected steps", d.accepted, d.rejected)),
        Check::above("flow: min u over accepted steps", min_u, 0.0),
        Check::below(format!("flow: F2 at t = {:.3}", traj.last.t), traj.last.f2, s.f2_target)
            .with_detail(format!("stop: {:?}", d.stop)),
        Check::at_most("flow: H/F2 outside [1 - sqrt(F2), 1]", h_violation, 0.0)
            .with_detail(format!("{h_count} samples with F2 < 1e-2")),
    ];
    Verdict { checks }
}

pub fn run(s: &Settings, ctx: &RunContext) -> CliResult<Outcome> {
    let tmp = ctx.dir.join(format!(".{CHECKPOINTS}.{}.tmp", std::process::id()));
    let res = integrate(s, Some(tmp.clone()));
    let (traj, quotients) = match res {
        Ok(r) => r,
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            return Err(e);
        }
    };
    let mut t = Table::new(["t", "mu", "F2", "volume", "min_u", "H"]);
    for x in &traj.samples {
        t.push(vec![x.t.into(), x.mu.into(), x.f2.into(), x.volume.into(), x.min_u.into(), x.h.into()]);
    }
    let mut out = Outcome::default();
    out.file(crate::output::OutFile::csv("trajectory.csv", &t));
    out.files.push(Staged::Disk { name: CHECKPOINTS.into(), tmp });
    out.checks = verdict(s, &traj).checks;
    let d = &traj.diagnostics;
    out.result("diagnostics", d);
    out.result("normalization", s.flow.normalization.name());
    out.result("sobolev_quotient_final", quotients.last().copied());
    out.result(
        "sobolev_quotient_max_increase",
        quotients.windows(2).map(|w| (w[1] - w[0]) / w[0]).fold(f64::NEG_INFINITY, f64::max),
    );
    Ok(out)
}
