//! Kazdan–Warner integrals and companion invariance for random zonal fields.

use paneitz_core::special::sphere_volume;
use paneitz_core::spectral::{
    companion, critical_integral, energy, kazdan_warner_integral, positive_nodal, MoebiusMap, ZonalBasis, ZonalField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Outcome, RunContext};
use crate::config::{require, Params};
use crate::error::{invalid, CliResult};
use crate::output::{Check, OutFile, Table};

#[derive(Clone, Debug)]
pub struct Settings {
    pub n: u32,
    pub k: usize,
    pub fields: usize,
    /// Coefficient decay rate of the random fields.
    pub rho: f64,
    pub lambdas: Vec<f64>,
    pub kw_tol: f64,
    pub energy_tol: f64,
}

pub fn settings(p: &mut Params) -> CliResult<Settings> {
    let n: u32 = p.get("n", 5)?;
    require(n >= 5, "kazdan-warner needs n ≥ 5")?;
    let k: usize = p.get("K", 64)?;
    require(k >= 2, "K must be at least 2")?;
    let fields: usize = p.get("fields", 10)?;
    require(fields > 0, "fields must be positive")?;
    let rho: f64 = p.get("rho", 0.5)?;
    require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)")?;
    let lambdas = p.list("lambdas", &[0.5, 2.0])?;
    for &l in &lambdas {
        invalid(MoebiusMap::new(n, l))?;
    }
    Ok(Settings { n, k, fields, rho, lambdas, kw_tol: p.get("kw_tol", 1e-6)?, energy_tol: p.get("energy_tol", 1e-6)? })
}

/// A positive zonal field with coefficients of size up to `rho^j` and a random
/// constant lift keeping its nodal minimum at least 0.2.
pub fn random_positive_field(b: &ZonalBasis<f64>, rng: &mut ChaCha8Rng, rho: f64) -> ZonalField<f64> {
    let n = b.n;
    let mut coeffs: Vec<f64> = (0..=b.k_max).map(|j| rng.gen_range(-1.0..1.0) * rho.powi(j as i32)).collect();
    coeffs[0] = 0.0;
    let mut u = ZonalField::new(n, coeffs).expect("matching length");
    let lo = b.nodal(&u).into_iter().fold(f64::INFINITY, f64::min);
    let lift = (0.2 - lo).max(0.0) + rng.gen_range(0.0..1.0);
    u.coeffs[0] = lift * sphere_volume::<f64>(n).sqrt();
    u
}

pub struct Summary {
    pub table: Table,
    pub worst_kw: f64,
    pub worst_energy: f64,
    pub worst_volume: f64,
}

pub fn evaluate(s: &Settings, seed: u64) -> CliResult<Summary> {
    let b = ZonalBasis::with_oversampling(s.n, s.k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new([
        "field",
        "lambda",
        "kw_integral",
        "kw_scale",
        "kw_relative",
        "energy",
        "volume",
        "energy_drift",
        "volume_drift",
        "relative_tail",
    ]);
    let (mut worst_kw, mut worst_energy, mut worst_volume) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..s.fields {
        let u = random_positive_field(&b, &mut rng, s.rho);
        positive_nodal(&b, &u)?;
        let kw = kazdan_warner_integral(&b, &u)?;
        worst_kw = worst_kw.max(kw.relative());
        let (e, vol) = (energy(&u), critical_integral(&b, &u)?);
        t.push(vec![
            i.into(),
            1.0.into(),
            kw.integral.into(),
            kw.scale.into(),
            kw.relative().into(),
            e.into(),
            vol.into(),
            0.0.into(),
            0.0.into(),
            0.0.into(),
        ]);
        for &l in &s.lambdas {
            let v = companion(&b, &u, &MoebiusMap::new(s.n, l)?);
            let ev = energy(&v.field);
            let cv = critical_integral(&b, &v.field)?;
            let (de, dv) = ((ev - e).abs() / e, (cv - vol).abs() / vol);
            worst_energy = worst_energy.max(de);
            worst_volume = worst_volume.max(dv);
            let kwv = kazdan_warner_integral(&b, &v.field)?;
            t.push(vec![
                i.into(),
                l.into(),
                kwv.integral.into(),
                kwv.scale.into(),
                kwv.relative().into(),
                ev.into(),
                cv.into(),
                de.into(),
                dv.into(),
                v.relative_tail().into(),
            ]);
        }
    }
    Ok(Summary { table: t, worst_kw, worst_energy, worst_volume })
}

pub fn run(s: &Settings, ctx: &RunContext) -> CliResult<Outcome> {
    let sum = evaluate(s, ctx.seed)?;
    let mut out = Outcome::default();
    out.file(OutFile::csv("kazdan_warner.csv", &sum.table));
    out.checks.push(
        Check::at_most("|KW integral| / scale", sum.worst_kw, s.kw_tol)
            .with_detail(format!("{} random fields, n = {}, K = {}", s.fields, s.n, s.k)),
    );
    out.checks.push(Check::at_most("companion energy drift", sum.worst_energy, s.energy_tol));
    out.checks.push(Check::at_most("companion critical-norm drift", sum.worst_volume, s.energy_tol));
    Ok(out)
}
