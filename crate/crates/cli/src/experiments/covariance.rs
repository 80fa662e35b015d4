//! Conformal covariance residuals on the flat chart.

use paneitz_core::curvature::field::{Affine, Bubble, Constant, Coordinate};
use paneitz_core::curvature::{conformal_covariance_residual, Chart, ChartMetric};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::curvature::random_points;
use super::{Outcome, RunContext};
use crate::config::{require, Params};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Check, OutFile, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `u = u_α`, `φ = 1`.
    Bubble,
    /// `u = 1 + 0.01 x₁`, `φ = x₂`.
    Affine,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Bubble => "bubble",
            Family::Affine => "affine",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub n: usize,
    pub families: Vec<Family>,
    pub alpha: f64,
    pub half_width: f64,
    pub sample_half_width: f64,
    pub points: usize,
    pub tol: f64,
}

pub fn settings(p: &mut Params) -> CliResult<Settings> {
    let n: usize = p.get("n", 5)?;
    require(n >= 5, "covariance needs n ≥ 5")?;
    let fam: String = p.get("family", "all".to_string())?;
    let families = match fam.as_str() {
        "all" => vec![Family::Bubble, Family::Affine],
        "bubble" => vec![Family::Bubble],
        "affine" => vec![Family::Affine],
        _ => return Err(CliError::Config(format!("unknown family {fam}"))),
    };
    let alpha: f64 = p.get("alpha", 2.0)?;
    require(alpha > 0.0, "alpha must be positive")?;
    let half_width: f64 = p.get("half_width", 0.5)?;
    let sample_half_width: f64 = p.get("sample_half_width", 0.3)?;
    // u = 1 + 0.01 x₁ must stay positive
    require(
        sample_half_width > 0.0 && sample_half_width < half_width && half_width < 100.0,
        "need 0 < sample_half_width < half_width < 100",
    )?;
    let points: usize = p.get("points", 5)?;
    require(points > 0, "points must be positive")?;
    Ok(Settings { n, families, alpha, half_width, sample_half_width, points, tol: p.get("tol", 1e-6)? })
}

/// Largest residual of each family over the seeded points, with one table row per evaluation.
pub fn residuals(s: &Settings, seed: u64) -> CliResult<(Vec<(Family, f64)>, Table)> {
    let n = s.n;
    let cm = ChartMetric::analytic(Chart::flat(n, s.half_width));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_points(n, s.sample_half_width, s.points, &mut rng);
    let bubble = Bubble { n: n as u32, alpha: s.alpha, center: vec![0.0; n] };
    let mut coeffs = vec![0.0; n];
    coeffs[0] = 0.01;
    let affine = Affine { c0: 1.0, coeffs };
    let mut header: Vec<String> = vec!["family".into(), "point".into()];
    header.extend((0..n).map(|i| format!("x{i}")));
    header.push("residual".into());
    let mut t = Table::new(header);
    let mut worst = Vec::new();
    for &f in &s.families {
        let mut m = 0.0_f64;
        for (i, x) in pts.iter().enumerate() {
            let r = match f {
                Family::Bubble => conformal_covariance_residual(&cm, &bubble, &Constant(1.0), x)?,
                Family::Affine => conformal_covariance_residual(&cm, &affine, &Coordinate(1), x)?,
            };
            m = m.max(r);
            let mut row: Vec<Cell> = vec![f.name().into(), i.into()];
            row.extend(x.iter().map(|&v| Cell::from(v)));
            row.push(r.into());
            t.push(row);
        }
        worst.push((f, m));
    }
    Ok((worst, t))
}

pub fn run(s: &Settings, ctx: &RunContext) -> CliResult<Outcome> {
    let (worst, t) = residuals(s, ctx.seed)?;
    let mut out = Outcome::default();
    out.file(OutFile::csv("covariance.csv", &t));
    for (f, m) in worst {
        out.checks.push(Check::at_most(format!("covariance residual, {} family, n = {}", f.name(), s.n), m, s.tol));
    }
    Ok(out)
}
