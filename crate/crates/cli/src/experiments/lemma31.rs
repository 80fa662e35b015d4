//! The σ-integral of the Weyl coefficient over an α grid.

use paneitz_core::bubble::{lemma31, lemma31_closed_form, successive_log_slopes, Lemma31Result, Regime};

use super::{Outcome, RunContext};
use crate::config::{require, Params};
use crate::error::CliResult;
use crate::output::{Check, OutFile, Table};

#[derive(Clone, Debug)]
pub struct Settings {
    pub n: u32,
    pub epsilon: f64,
    pub alphas: Vec<f64>,
    pub tol: f64,
    pub route_tol: f64,
    /// Allowed relative spread of the values (`n > 8`) or of `value/ln α` (`n = 8`).
    pub spread_tol: f64,
}

pub fn settings(p: &mut Params) -> CliResult<Settings> {
    let n: u32 = p.get("n", 8)?;
    require(n >= 8, "lemma31 needs n ≥ 8")?;
    let epsilon: f64 = p.get("epsilon", 1.0)?;
    require(epsilon > 0.0, "epsilon must be positive")?;
    let alphas = p.list("alphas", &[1e-2, 1e-3, 1e-4])?;
    require(!alphas.is_empty(), "empty alpha grid")?;
    require(alphas.iter().all(|&a| a > 0.0 && a < 1.0), "alphas must lie in (0, 1)")?;
    let tol: f64 = p.get("tol", 1e-12)?;
    require(tol > 0.0, "tol must be positive")?;
    let default_spread = if n == 8 { 0.02 } else { 0.01 };
    Ok(Settings {
        n,
        epsilon,
        alphas,
        tol,
        route_tol: p.get("route_tol", 1e-8)?,
        spread_tol: p.get("spread_tol", default_spread)?,
    })
}

/// Largest pairwise relative difference, `max/min − 1` on absolute values.
pub fn relative_spread(v: &[f64]) -> f64 {
    let hi = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lo = v.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    hi / lo - 1.0
}

pub struct Sweep {
    pub results: Vec<Lemma31Result<f64>>,
    pub closed_forms: Vec<f64>,
    pub route_gap: f64,
}

pub fn sweep(s: &Settings) -> CliResult<Sweep> {
    let mut results = Vec::new();
    let mut closed_forms = Vec::new();
    let mut route_gap = 0.0_f64;
    for &a in &s.alphas {
        let r = lemma31(s.n, s.epsilon, a, s.tol)?;
        let c = lemma31_closed_form(s.n, s.epsilon, a, s.tol)?;
        route_gap = route_gap.max((r.value - c).abs() / r.value.abs().max(1.0));
        results.push(r);
        closed_forms.push(c);
    }
    Ok(Sweep { results, closed_forms, route_gap })
}

/// The regime checks: negative values settling to a constant for `n > 8`,
/// a positive stable `value/ln α` for `n = 8`.
pub fn regime_checks(s: &Settings, sw: &Sweep) -> Vec<Check> {
    let mut checks = Vec::new();
    let vals: Vec<f64> = sw.results.iter().map(|r| r.value).collect();
    if s.n == 8 {
        let ratios: Vec<f64> = sw.results.iter().map(|r| r.fitted_constant).collect();
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        checks.push(Check::above("n = 8: smallest value/ln α positive", min, 0.0));
        let slopes = successive_log_slopes(&sw.results);
        checks.push(
            Check::at_most("n = 8: value/ln α stable across α grid", relative_spread(&ratios), s.spread_tol)
                .with_detail(format!("value/ln α = {ratios:.4?}; successive slopes = {slopes:.6?}")),
        );
    } else {
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::below(format!("n = {}: largest value negative", s.n), max, 0.0));
        checks.push(
            Check::below(format!("n = {}: values agree across α grid", s.n), relative_spread(&vals), s.spread_tol)
                .with_detail(format!("values = {vals:.6?}")),
        );
    }
    checks
}

pub fn run(s: &Settings, _ctx: &RunContext) -> CliResult<Outcome> {
    let sw = sweep(s)?;
    let mut t = Table::new(["n", "epsilon", "alpha", "value", "value_over_log_alpha", "closed_form", "route_gap"]);
    for (r, &c) in sw.results.iter().zip(&sw.closed_forms) {
        t.push(vec![
            s.n.into(),
            s.epsilon.into(),
            r.alpha.into(),
            r.value.into(),
            (r.value / r.alpha.ln()).into(),
            c.into(),
            ((r.value - c).abs() / r.value.abs().max(1.0)).into(),
        ]);
    }
    let mut out = Outcome::default();
    out.file(OutFile::csv("lemma31.csv", &t));
    out.checks.push(Check::at_most("closed form vs quadrature (relative)", sw.route_gap, s.route_tol));
    out.checks.extend(regime_checks(s, &sw));
    let last = sw.results.last().expect("non-empty grid");
    match last.regime {
        Regime::LogDivergent => {
            out.result("C2_estimate", last.fitted_constant);
            out.result("successive_log_slopes", successive_log_slopes(&sw.results));
        }
        Regime::ConstantLimit => out.result("C1_estimate", last.fitted_constant),
    }
    Ok(out)
}
