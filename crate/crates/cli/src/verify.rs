//! The acceptance suite behind `verify-all`.
//!
//! Every criterion returns its checks instead of failing early; a module
//! error becomes a failed check, never a panic.

use std::time::Instant;

use paneitz_core::bubble::{gap_certificate, q_sphere, radial_integrals, BubbleParams, CutoffProfile};
use paneitz_core::curvature::Chart;

use crate::config::Params;
use crate::error::CliResult;
use crate::experiments::{covariance, curvature, flow, gap, kazdan_warner, lemma31, RunContext};
use crate::output::{Check, Table};

/// Tolerances and budgets of the suite; each can be overridden by key.
#[derive(Clone, Debug)]
pub struct Suite {
    pub seed: u64,
    pub q_tol: f64,
    pub sobolev_tol: f64,
    pub alpha_invariance_tol: f64,
    pub route_tol: f64,
    pub spread_tol_10: f64,
    pub spread_tol_8: f64,
    pub exponent_tol: f64,
    pub residual_ratio: f64,
    pub kw_tol: f64,
    pub energy_tol: f64,
    pub mu_tol: f64,
    pub f2_target: f64,
    pub covariance_tol: f64,
    pub total_budget: f64,
}

impl Suite {
    pub fn from_params(p: &mut Params) -> CliResult<Self> {
        Ok(Self {
            seed: p.get("seed", 0)?,
            q_tol: p.get("q_tol", 1e-7)?,
            sobolev_tol: p.get("sobolev_tol", 1e-6)?,
            alpha_invariance_tol: p.get("alpha_invariance_tol", 1e-9)?,
            route_tol: p.get("route_tol", 1e-8)?,
            spread_tol_10: p.get("spread_tol_10", 0.01)?,
            spread_tol_8: p.get("spread_tol_8", 0.02)?,
            exponent_tol: p.get("exponent_tol", 0.05)?,
            residual_ratio: p.get("residual_ratio", 10.0)?,
            kw_tol: p.get("kw_tol", 1e-6)?,
            energy_tol: p.get("energy_tol", 1e-6)?,
            mu_tol: p.get("mu_tol", 1e-8)?,
            f2_target: p.get("f2_target", 1e-8)?,
            covariance_tol: p.get("covariance_tol", 1e-6)?,
            total_budget: p.get("total_budget", 300.0)?,
        })
    }
}

impl Default for Suite {
    fn default() -> Self {
        Self::from_params(&mut Params::default()).expect("defaults parse")
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

const TITLES: [&str; 8] = [
    "sphere Q-curvature",
    "Paneitz-Sobolev constant",
    "sigma-integral regimes",
    "gap certificate",
    "Kazdan-Warner and companions",
    "flow diagnostics",
    "conformal covariance",
    "full suite",
];

const BUDGETS: [f64; 7] = [10.0, 5.0, 5.0, 30.0, 60.0, 120.0, 10.0];

fn timed(id: u32, body: impl FnOnce(&mut Vec<Check>) -> CliResult<()>) -> CriterionResult {
    let start = Instant::now();
    let mut checks = Vec::new();
    if let Err(e) = body(&mut checks) {
        checks.push(Check::failed(format!("criterion {id} evaluation"), e.to_string()));
    }
    let seconds = start.elapsed().as_secs_f64();
    checks.push(Check::below(format!("criterion {id} runtime (s)"), seconds, BUDGETS[id as usize - 1]));
    CriterionResult { id, title: TITLES[id as usize - 1], checks, seconds }
}

fn scratch() -> std::path::PathBuf {
    std::env::temp_dir()
}

pub fn criterion1(s: &Suite) -> CriterionResult {
    timed(1, |checks| {
        for n in [5usize, 6, 8, 10] {
            let cfg = curvature::Settings {
                n,
                chart: Chart::sphere(n, 1.0),
                chart_id: "sphere".into(),
                mode: paneitz_core::curvature::DerivativeMode::Analytic,
                points: 20,
                sample_half_width: 0.9,
                symmetry_tol: f64::INFINITY,
                trace_tol: f64::INFINITY,
                q_tol: s.q_tol,
            };
            let dir = scratch();
            let out = curvature::run(&cfg, &RunContext { seed: s.seed, dir: &dir })?;
            let q = out.checks.into_iter().last().expect("Q check");
            checks.push(Check { name: format!("n = {n}: {}", q.name), ..q });
        }
        Ok(())
    })
}

pub fn criterion2(s: &Suite) -> CriterionResult {
    timed(2, |checks| {
        for n in [5u32, 8, 10] {
            let q = q_sphere::<f64>(n);
            let ratios = [1.0_f64, 1e-1, 1e-2]
                .iter()
                .map(|&a| {
                    let r = radial_integrals(&BubbleParams::new(n, a, 0.5, CutoffProfile::QuinticSmoothstep)?, 1e-12)?;
                    Ok(r.i_biharm / r.i_crit.powf((n as f64 - 4.0) / n as f64))
                })
                .collect::<CliResult<Vec<f64>>>()?;
            checks.push(Check::at_most(format!("n = {n}: quotient vs q(S^n)"), (ratios[0] - q).abs() / q, s.sobolev_tol));
            checks.push(Check::at_most(
                format!("n = {n}: quotient spread over alpha in [1e-2, 1]"),
                lemma31::relative_spread(&ratios),
                s.alpha_invariance_tol,
            ));
        }
        Ok(())
    })
}

pub fn criterion3(s: &Suite) -> CriterionResult {
    timed(3, |checks| {
        for (n, spread) in [(10u32, s.spread_tol_10), (8, s.spread_tol_8)] {
            let cfg = lemma31::Settings {
                n,
                epsilon: 1.0,
                alphas: vec![1e-2, 1e-3, 1e-4],
                tol: 1e-12,
                route_tol: s.route_tol,
                spread_tol: spread,
            };
            let sw = lemma31::sweep(&cfg)?;
            checks.push(Check::at_most(format!("n = {n}: closed form vs quadrature"), sw.route_gap, s.route_tol));
            checks.extend(lemma31::regime_checks(&cfg, &sw));
        }
        Ok(())
    })
}

pub fn criterion4(s: &Suite) -> CriterionResult {
    timed(4, |checks| {
        let cfg = gap::Settings {
            n: 10,
            alphas: vec![1e-2, 3e-3, 1e-3],
            epsilon: 0.1,
            w2: 1.0,
            cutoff: CutoffProfile::QuinticSmoothstep,
            tol: 1e-12,
        };
        let dir = scratch();
        let out = gap::run(&cfg, &RunContext { seed: s.seed, dir: &dir })?;
        checks.extend(out.checks);
        let rep = gap_certificate(10, &cfg.alphas, 0.1, 1.0, cfg.cutoff, cfg.tol)?;
        match rep.deficit_power_fit {
            Some(f) => checks.push(
                Check::at_most("n = 10: |deficit exponent - 4|", (f.exponent - 4.0).abs(), s.exponent_tol)
                    .with_detail(format!("exponent = {:.4}", f.exponent)),
            ),
            None => checks.push(Check::failed("n = 10: deficit exponent", "no fit")),
        }
        let rep8 = gap_certificate(8, &[1e-3, 1e-4, 1e-5, 1e-6], 1.0, 1.0, cfg.cutoff, cfg.tol)?;
        match (rep8.deficit_power_fit, rep8.deficit_log_fit) {
            (Some(pure), Some(log)) => checks.push(
                Check::at_least("n = 8: pure-power / power-log residual", pure.residual / log.residual, s.residual_ratio)
                    .with_detail(format!("{:.3e} vs {:.3e}", pure.residual, log.residual)),
            ),
            _ => checks.push(Check::failed("n = 8: residual ratio", "no fit")),
        }
        Ok(())
    })
}

pub fn criterion5(s: &Suite) -> CriterionResult {
    timed(5, |checks| {
        let cfg = kazdan_warner::Settings {
            n: 5,
            k: 64,
            fields: 10,
            rho: 0.5,
            lambdas: vec![0.5, 2.0],
            kw_tol: s.kw_tol,
            energy_tol: s.energy_tol,
        };
        let sum = kazdan_warner::evaluate(&cfg, s.seed)?;
        checks.push(Check::at_most("|KW integral| / scale", sum.worst_kw, s.kw_tol));
        checks.push(Check::at_most("companion energy drift", sum.worst_energy, s.energy_tol));
        Ok(())
    })
}

pub fn criterion6(s: &Suite) -> CriterionResult {
    timed(6, |checks| {
        let mut p = Params::default();
        let mut cfg = flow::settings(&mut p)?;
        cfg.mu_tol = s.mu_tol;
        cfg.f2_target = s.f2_target;
        let (traj, _) = flow::integrate(&cfg, None)?;
        checks.extend(flow::verdict(&cfg, &traj).checks);
        Ok(())
    })
}

pub fn criterion7(s: &Suite) -> CriterionResult {
    timed(7, |checks| {
        for n in [5usize, 8] {
            let cfg = covariance::Settings {
                n,
                families: vec![covariance::Family::Bubble, covariance::Family::Affine],
                alpha: 2.0,
                half_width: 0.5,
                sample_half_width: 0.3,
                points: 5,
                tol: s.covariance_tol,
            };
            let (worst, _) = covariance::residuals(&cfg, s.seed)?;
            for (f, m) in worst {
                checks.push(Check::at_most(format!("n = {n}: {} residual", f.name()), m, s.covariance_tol));
            }
        }
        Ok(())
    })
}

/// Criterion 8 summarises the others: all pass within the total budget.
pub fn criterion8(s: &Suite, earlier: &[CriterionResult]) -> CriterionResult {
    let total: f64 = earlier.iter().map(|r| r.seconds).sum();
    let failing: Vec<String> = earlier.iter().filter(|r| !r.pass()).map(|r| r.id.to_string()).collect();
    let checks = vec![
        Check::at_most("criteria 1-7 failing", failing.len() as f64, 0.0)
            .with_detail(if failing.is_empty() { String::new() } else { format!("failing: {}", failing.join(", ")) }),
        Check::below("suite runtime (s)", total, s.total_budget),
    ];
    CriterionResult { id: 8, title: TITLES[7], checks, seconds: total }
}

pub fn run_all(s: &Suite) -> Vec<CriterionResult> {
    let mut res = vec![
        criterion1(s),
        criterion2(s),
        criterion3(s),
        criterion4(s),
        criterion5(s),
        criterion6(s),
        criterion7(s),
    ];
    let last = criterion8(s, &res);
    res.push(last);
    res
}

/// One row per check, prefixed by its criterion.
pub fn table(results: &[CriterionResult]) -> Table {
    let mut t = Table::new(["criterion", "title", "check", "measured", "tolerance", "pass", "detail"]);
    for r in results {
        for c in &r.checks {
            t.push(vec![
                r.id.into(),
                r.title.into(),
                c.name.as_str().into(),
                c.measured.into(),
                c.tolerance.into(),
                c.pass.into(),
                c.detail.as_str().into(),
            ]);
        }
    }
    t
}

/// The one-line verdict of a criterion.
pub fn summary_line(r: &CriterionResult) -> String {
    let verdict = if r.pass() { "PASS" } else { "FAIL" };
    let failing: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let mut s = format!("criterion {}: {verdict} ({}, {:.2} s)", r.id, r.title, r.seconds);
    if !failing.is_empty() {
        s.push_str(&format!(" failing: {}", failing.join("; ")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_unknown_keys() {
        let mut p = Params::from_pairs([("kw_tol", "1e-16"), ("bogus", "1")]);
        let s = Suite::from_params(&mut p).unwrap();
        assert_eq!(s.kw_tol, 1e-16);
        assert!(p.finish().is_err());
    }

    #[test]
    fn summary_counts_failures() {
        let ok = CriterionResult { id: 1, title: "a", checks: vec![Check::at_most("x", 0.0, 1.0)], seconds: 1.0 };
        let bad = CriterionResult { id: 2, title: "b", checks: vec![Check::at_most("y", 2.0, 1.0)], seconds: 1.0 };
        let c8 = criterion8(&Suite::default(), &[ok.clone(), bad]);
        assert!(!c8.pass());
        assert!(criterion8(&Suite::default(), &[ok]).pass());
    }
}
