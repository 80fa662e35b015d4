//! Curvature of a registered chart at seeded random points.

use paneitz_core::curvature::tensors::{q_curvature, symmetry_residual, trace_residual};
use paneitz_core::curvature::{curvature_at, Chart, ChartMetric, DerivativeMode, MetricField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Outcome, RunContext};
use crate::config::{require, Params};
use crate::error::{invalid, CliResult};
use crate::output::{Cell, Check, OutFile, Table};

#[derive(Clone, Debug)]
pub struct Settings {
    pub n: usize,
    pub chart: Chart<f64>,
    pub chart_id: String,
    pub mode: DerivativeMode<f64>,
    pub points: usize,
    pub sample_half_width: f64,
    pub symmetry_tol: f64,
    pub trace_tol: f64,
    pub q_tol: f64,
}

pub fn settings(p: &mut Params) -> CliResult<Settings> {
    let n: usize = p.get("n", 8)?;
    require(n >= 5, "curvature needs n ≥ 5")?;
    let chart_id: String = p.get("chart", "sphere".to_string())?;
    let half_width: f64 = p.get("half_width", 1.0)?;
    require(half_width > 0.0, "half_width must be positive")?;
    let chart = invalid(Chart::by_id(&chart_id, n, half_width))?;
    let mode_name: String = p.get("mode", "analytic".to_string())?;
    let mode = match mode_name.as_str() {
        "analytic" => DerivativeMode::Analytic,
        "fd" => {
            let DerivativeMode::FiniteDifference { h: h0, h_high: hh0 } = DerivativeMode::default_fd(chart.domain())
            else {
                unreachable!()
            };
            let h: f64 = p.get("h", h0)?;
            let h_high: f64 = p.get("h_high", hh0)?;
            require(h > 0.0 && h_high > 0.0, "finite-difference steps must be positive")?;
            DerivativeMode::FiniteDifference { h, h_high }
        }
        _ => return Err(crate::error::CliError::Config(format!("unknown derivative mode {mode_name}"))),
    };
    let points: usize = p.get("points", 20)?;
    require(points > 0, "points must be positive")?;
    let sample: f64 = p.get("sample", 0.9)?;
    let sample_half_width = sample * half_width;
    require(
        sample > 0.0 && sample_half_width + mode.margin() < half_width,
        "sample region plus stencil margin must stay inside the chart",
    )?;
    Ok(Settings {
        n,
        chart,
        chart_id,
        mode,
        points,
        sample_half_width,
        symmetry_tol: p.get("symmetry_tol", 1e-8)?,
        trace_tol: p.get("trace_tol", 1e-8)?,
        q_tol: p.get("q_tol", 1e-7)?,
    })
}

/// `Q` of the chart's model geometry.
pub fn expected_q(chart: &Chart<f64>) -> f64 {
    match chart {
        Chart::Flat { .. } => 0.0,
        Chart::StereographicSphere { n, radius, .. } => (n * (n * n - 4)) as f64 / 8.0 / radius.powi(4),
        Chart::ProductSpheres { p, q, r1, r2, .. } => {
            // Ric = (k−1)/r² g on each factor
            let (a, b) = ((p - 1) as f64 / (r1 * r1), (q - 1) as f64 / (r2 * r2));
            let r = *p as f64 * a + *q as f64 * b;
            let ric2 = *p as f64 * a * a + *q as f64 * b * b;
            q_curvature(p + q, r, ric2, 0.0)
        }
    }
}

pub fn random_points(n: usize, half_width: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-half_width..half_width)).collect()).collect()
}

pub fn run(s: &Settings, ctx: &RunContext) -> CliResult<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let cm = ChartMetric { field: s.chart.clone(), mode: s.mode };
    let q_exp = expected_q(&s.chart);
    let mut header: Vec<String> = vec!["point".into()];
    header.extend((0..s.n).map(|i| format!("x{i}")));
    header.extend(
        ["R", "ric_norm2", "sigma1", "Q", "laplacian_R", "weyl_norm", "riem_symmetry", "weyl_trace"].map(String::from),
    );
    let mut t = Table::new(header);
    let (mut sym, mut tr, mut qdev, mut recompute) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for (i, x) in random_points(s.n, s.sample_half_width, s.points, &mut rng).into_iter().enumerate() {
        let p = curvature_at(&cm, &x)?;
        let scale = p.riem.max_abs().max(1.0);
        let wnorm = p.weyl.norm2(&p.ginv).max(0.0).sqrt();
        let rs = symmetry_residual(&p.riem) / scale;
        let wt = trace_residual(&p.weyl, &p.ginv) / (wnorm + 1.0);
        sym = sym.max(rs);
        tr = tr.max(wt);
        qdev = qdev.max((p.q - q_exp).abs() / q_exp.abs().max(1.0));
        recompute = recompute.max((p.q - p.q_from_parts()).abs());
        let mut row: Vec<Cell> = vec![i.into()];
        row.extend(x.iter().map(|&v| Cell::from(v)));
        row.extend([p.r, p.ric_norm2(), p.sigma1, p.q, p.laplacian_r, wnorm, rs, wt].map(Cell::from));
        t.push(row);
    }
    let mut out = Outcome::default();
    out.file(OutFile::csv("curvature.csv", &t));
    out.checks.push(Check::at_most("Riemann symmetries (relative)", sym, s.symmetry_tol));
    out.checks.push(Check::at_most("Weyl traces (relative to |W|+1)", tr, s.trace_tol));
    out.checks.push(Check::at_most("Q recomputed from R, Ric, ΔR", recompute, 0.0));
    out.checks.push(
        Check::at_most(format!("Q = {q_exp} on chart {}", s.chart_id), qdev, s.q_tol)
            .with_detail(format!("{} points", s.points)),
    );
    out.result("expected_Q", q_exp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_q_values() {
        assert_eq!(expected_q(&Chart::sphere(8, 1.0)), 60.0);
        assert_eq!(expected_q(&Chart::flat(5, 1.0)), 0.0);
        assert!((expected_q(&Chart::product(4, 4, 1.0, 1.0, 1.0)) - 540.0 / 49.0).abs() < 1e-12);
    }

    #[test]
    fn stencil_must_fit() {
        let mut p = Params::from_pairs([("mode", "fd"), ("h", "0.2"), ("n", "5")]);
        assert!(settings(&mut p).is_err());
        let mut p = Params::from_pairs([("chart", "torus")]);
        assert!(settings(&mut p).is_err());
    }
}
