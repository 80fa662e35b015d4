//! Dormand–Prince 5(4) time stepping of the flow on coefficient vectors.

use serde::{Deserialize, Serialize};

use super::model::{cone_minimum, h_function, min_nodal, mu_and_volume, velocity_with, MuNormalization};
use crate::error::{Error, Result};
use crate::scalar::Base;
use crate::spectral::{energy, ZonalBasis, ZonalField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub n: u32,
    #[serde(rename = "K")]
    pub k: usize,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Relative tolerance of the embedded error estimate.
    pub tol: f64,
    pub t_max: f64,
    pub f2_stop: f64,
    /// A checkpoint is emitted every this many accepted steps (0 disables).
    pub checkpoint_every: usize,
    pub max_steps: usize,
    pub normalization: MuNormalization,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            n: 8,
            k: 128,
            dt_init: 1e-2,
            dt_min: 1e-10,
            dt_max: 1.0,
            tol: 1e-10,
            t_max: 50.0,
            f2_stop: 1e-10,
            checkpoint_every: 10,
            max_steps: 1_000_000,
            normalization: MuNormalization::VolumeRatio,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.n < 5 {
            return bad("flow needs n ≥ 5");
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return bad("need 0 < dt_min ≤ dt_init ≤ dt_max");
        }
        if !(self.t_max > 0.0) {
            return bad("T_max must be positive");
        }
        if !(self.tol > 0.0) || !(self.f2_stop >= 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Clone", deserialize = "T: Deserialize<'de>"))]
pub struct FlowState<T> {
    pub t: T,
    pub u: ZonalField<T>,
    pub mu: T,
    #[serde(rename = "F2")]
    pub f2: T,
    pub volume: T,
    pub min_u: T,
    /// `φ` at this state, reused as the first stage of the next step.
    #[serde(skip)]
    pub phi: Option<ZonalField<T>>,
}

/// One row of the trajectory log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSample<T> {
    pub t: T,
    pub mu: T,
    #[serde(rename = "F2")]
    pub f2: T,
    pub volume: T,
    pub min_u: T,
    #[serde(rename = "H")]
    pub h: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    ReachedTMax,
    F2BelowThreshold,
    StepBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowDiagnostics<T> {
    pub accepted: usize,
    pub rejected: usize,
    pub positivity_halvings: usize,
    /// Largest `(μ_{i+1} − μ_i)/|μ_i|` over accepted steps.
    pub max_mu_increase: T,
    /// Whether every step satisfied `μ_{i+1} ≤ μ_i + 1e-8|μ_i|`.
    pub mu_monotone: bool,
    /// `max_i ((F₂_{i+1} − F₂_i)/dt) / (F₂_i (1 + √F₂_i))`.
    pub c_hat: T,
    /// Trapezoidal `∫₀^T F₂ dt`.
    pub f2_integral: T,
    pub volume_min: T,
    pub volume_max: T,
    pub energy_initial: T,
    pub energy_final: T,
    /// `min P u₀` over the nodes; the cone condition asks for `≥ 0`.
    pub cone_minimum: T,
    pub stop: StopReason,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Clone", deserialize = "T: Deserialize<'de>"))]
pub struct Trajectory<T> {
    pub samples: Vec<FlowSample<T>>,
    pub last: FlowState<T>,
    pub diagnostics: FlowDiagnostics<T>,
}

// Dormand–Prince tableau; the flow is autonomous so the nodes c_i are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// The flow on a fixed basis, with its normalisation.
pub struct Flow<'a, T> {
    pub basis: &'a ZonalBasis<T>,
    pub normalization: MuNormalization,
}

struct Attempt<T> {
    u: ZonalField<T>,
    phi: ZonalField<T>,
    err: T,
}

impl<'a, T: Base> Flow<'a, T> {
    pub fn new(basis: &'a ZonalBasis<T>, normalization: MuNormalization) -> Self {
        Self { basis, normalization }
    }

    pub fn rhs(&self, u: &ZonalField<T>) -> Result<ZonalField<T>> {
        velocity_with(self.basis, u, self.normalization)
    }

    /// Full state at `(t, u)`, including `φ`.
    pub fn state(&self, t: T, u: ZonalField<T>) -> Result<FlowState<T>> {
        let (mu, volume) = mu_and_volume(self.basis, &u, self.normalization)?;
        let phi = self.rhs(&u)?;
        let min_u = min_nodal(self.basis, &u);
        Ok(FlowState { t, mu, f2: energy(&phi), volume, min_u, phi: Some(phi), u })
    }

    /// One Dormand–Prince step; `err` is the scaled embedded error (≤ 1 to accept).
    fn attempt(&self, u: &ZonalField<T>, k1: &ZonalField<T>, dt: T, tol: T) -> Result<Attempt<T>> {
        let mut ks: Vec<ZonalField<T>> = vec![k1.clone()];
        for s in 1..7 {
            let mut y = u.clone();
            for (j, kj) in ks.iter().enumerate() {
                let a = A[s][j];
                if a != 0.0 {
                    y = y.axpy(dt * T::lit(a), kj);
                }
            }
            if s == 6 {
                // stage 7 is evaluated at the new solution (FSAL)
                let phi = self.rhs(&y)?;
                ks.push(phi.clone());
                let mut err = T::zero();
                for i in 0..y.coeffs.len() {
                    let e = ks.iter().enumerate().fold(T::zero(), |acc, (j, k)| acc + T::lit(E[j]) * k.coeffs[i]) * dt;
                    let sc = tol * (T::one() + u.coeffs[i].abs().max(y.coeffs[i].abs()));
                    err = err.max((e / sc).abs());
                }
                return Ok(Attempt { u: y, phi, err });
            }
            ks.push(self.rhs(&y)?);
        }
        unreachable!()
    }

    /// Classical fixed-step integration with the fifth-order Dormand–Prince weights.
    pub fn fixed_steps(&self, u0: &ZonalField<T>, dt: T, steps: usize) -> Result<ZonalField<T>> {
        let mut u = u0.clone();
        let mut k1 = self.rhs(&u)?;
        for _ in 0..steps {
            let a = self.attempt(&u, &k1, dt, T::one())?;
            u = a.u;
            k1 = a.phi;
        }
        Ok(u)
    }
}

fn sample<T: Base>(s: &FlowState<T>) -> Result<FlowSample<T>> {
    Ok(FlowSample { t: s.t, mu: s.mu, f2: s.f2, volume: s.volume, min_u: s.min_u, h: h_function(s.f2.max(T::zero()))? })
}

/// Integrates from `u0` until `T_max`, `F₂ < F2_stop` or the step budget, calling
/// `checkpoint` with every `checkpoint_every`-th accepted state.
pub fn run<T: Base>(
    cfg: &FlowConfig,
    basis: &ZonalBasis<T>,
    u0: &ZonalField<T>,
    mut checkpoint: impl FnMut(&FlowState<T>),
) -> Result<Trajectory<T>> {
    cfg.validate()?;
    if u0.n != cfg.n || basis.n != cfg.n {
        return Err(Error::InvalidParameter("dimension of basis, data and config differ".into()));
    }
    let flow = Flow::new(basis, cfg.normalization);
    let u0 = u0.resized(basis.k_max);
    let min0 = min_nodal(basis, &u0);
    if !(min0 > T::zero()) {
        return Err(Error::NonPositiveField { point: vec![], value: min0.re_f64() });
    }
    let cone = cone_minimum(basis, &u0)?;
    let tol = T::lit(cfg.tol);
    let (dt_min, dt_max, t_max) = (T::lit(cfg.dt_min), T::lit(cfg.dt_max), T::lit(cfg.t_max));
    let mut state = flow.state(T::zero(), u0)?;
    let e0 = energy(&state.u);
    let mut diag = FlowDiagnostics {
        accepted: 0,
        rejected: 0,
        positivity_halvings: 0,
        max_mu_increase: T::neg_infinity(),
        mu_monotone: true,
        c_hat: T::zero(),
        f2_integral: T::zero(),
        volume_min: state.volume,
        volume_max: state.volume,
        energy_initial: e0,
        energy_final: e0,
        cone_minimum: cone,
        stop: StopReason::ReachedTMax,
    };
    let mut samples = vec![sample(&state)?];
    checkpoint(&state);
    let mut dt = T::lit(cfg.dt_init);
    let mut err_prev = T::one();
    loop {
        if state.f2 < T::lit(cfg.f2_stop) {
            diag.stop = StopReason::F2BelowThreshold;
            break;
        }
        if state.t >= t_max {
            diag.stop = StopReason::ReachedTMax;
            break;
        }
        if diag.accepted >= cfg.max_steps {
            diag.stop = StopReason::StepBudget;
            break;
        }
        let h = dt.min(t_max - state.t);
        let k1 = state.phi.clone().expect("state carries φ");
        let attempt = flow.attempt(&state.u, &k1, h, tol);
        let a = match attempt {
            Ok(a) => a,
            Err(Error::NonPositiveField { .. }) => {
                diag.positivity_halvings += 1;
                dt = h / T::int(2);
                if dt < dt_min {
                    return Err(Error::PositivityLoss { t: state.t.re_f64(), min_u: state.min_u.re_f64() });
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let min_u = min_nodal(basis, &a.u);
        if !(min_u > T::zero()) {
            diag.positivity_halvings += 1;
            dt = h / T::int(2);
            if dt < dt_min {
                return Err(Error::PositivityLoss { t: state.t.re_f64(), min_u: min_u.re_f64() });
            }
            continue;
        }
        if !a.err.is_finite() {
            return Err(Error::NonFinite("flow step"));
        }
        if a.err > T::one() {
            diag.rejected += 1;
            let fac = (T::lit(0.9) * a.err.powf(T::lit(-0.2))).max(T::lit(0.2));
            dt = h * fac;
            if dt < dt_min {
                return Err(Error::DtUnderflow { t: state.t.re_f64(), dt: dt.re_f64() });
            }
            continue;
        }
        // accepted
        let (mu, volume) = mu_and_volume(basis, &a.u, cfg.normalization)?;
        let f2 = energy(&a.phi);
        let next = FlowState { t: state.t + h, u: a.u, mu, f2, volume, min_u, phi: Some(a.phi) };
        let inc = (next.mu - state.mu) / state.mu.abs();
        diag.max_mu_increase = diag.max_mu_increase.max(inc);
        if inc > T::lit(1e-8) {
            diag.mu_monotone = false;
        }
        if state.f2 > T::zero() {
            let rate = (next.f2 - state.f2) / h / (state.f2 * (T::one() + state.f2.sqrt()));
            diag.c_hat = diag.c_hat.max(rate);
        }
        diag.f2_integral = diag.f2_integral + (state.f2 + next.f2) * h / T::int(2);
        diag.volume_min = diag.volume_min.min(volume);
        diag.volume_max = diag.volume_max.max(volume);
        diag.accepted += 1;
        state = next;
        samples.push(sample(&state)?);
        if cfg.checkpoint_every > 0 && diag.accepted % cfg.checkpoint_every == 0 {
            checkpoint(&state);
        }
        // PI controller
        let e = a.err.max(T::lit(1e-10));
        let fac = T::lit(0.9) * e.powf(T::lit(-0.7 / 5.0)) * err_prev.powf(T::lit(0.4 / 5.0));
        dt = (h * fac.min(T::lit(5.0)).max(T::lit(0.2))).min(dt_max);
        err_prev = e;
    }
    diag.energy_final = energy(&state.u);
    if diag.accepted == 0 {
        diag.max_mu_increase = T::zero();
    }
    Ok(Trajectory { samples, last: state, diagnostics: diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::model::fixed_point_constant;

    fn perturbed(n: u32, k: usize, eps: f64) -> ZonalField<f64> {
        ZonalField::constant(n, k, fixed_point_constant::<f64>(n)).axpy(eps, &ZonalField::harmonic(n, k, 2))
    }

    #[test]
    fn config_validation() {
        assert!(FlowConfig::default().validate().is_ok());
        let bad = FlowConfig { dt_min: 1.0, dt_init: 0.1, ..FlowConfig::default() };
        assert!(bad.validate().is_err());
        let bad = FlowConfig { t_max: 0.0, ..FlowConfig::default() };
        assert!(bad.validate().is_err());
        let c: FlowConfig = serde_json::from_str(r#"{"n": 6, "K": 16}"#).unwrap();
        assert_eq!((c.n, c.k, c.t_max), (6, 16, 50.0));
    }

    #[test]
    fn equilibrium_stays_put() {
        let n = 6;
        let b = ZonalBasis::with_oversampling(n, 16).unwrap();
        let cfg = FlowConfig { n, k: 16, t_max: 5.0, f2_stop: 0.0, ..FlowConfig::default() };
        let u0 = ZonalField::constant(n, 16, fixed_point_constant::<f64>(n));
        let tr = run(&cfg, &b, &u0, |_| {}).unwrap();
        assert!(tr.samples.iter().all(|s| s.f2 <= 1e-12));
        let drift = tr.last.u.axpy(-1.0, &u0).l2_norm2().sqrt();
        assert!(drift < 1e-12);
        assert!((tr.last.t - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_data() {
        let n = 6;
        let b = ZonalBasis::with_oversampling(n, 8).unwrap();
        let cfg = FlowConfig { n, k: 8, ..FlowConfig::default() };
        let u0 = ZonalField::constant(n, 8, -1.0);
        assert!(matches!(run(&cfg, &b, &u0, |_| {}), Err(Error::NonPositiveField { .. })));
    }

    #[test]
    fn perturbation_decays() {
        let (n, k) = (6, 24);
        let b = ZonalBasis::with_oversampling(n, k).unwrap();
        let cfg = FlowConfig { n, k, t_max: 40.0, f2_stop: 1e-12, ..FlowConfig::default() };
        let mut seen = 0;
        let tr = run(&cfg, &b, &perturbed(n, k, 0.05), |_| seen += 1).unwrap();
        assert!(seen >= 2);
        assert_eq!(tr.diagnostics.stop, StopReason::F2BelowThreshold);
        assert!(tr.diagnostics.mu_monotone);
        assert!(tr.samples.iter().all(|s| s.min_u > 0.0));
        let e = &tr.diagnostics;
        assert!((e.energy_final - e.energy_initial).abs() < 1e-8 * e.energy_initial);
        assert!(e.cone_minimum > 0.0);
    }

    #[test]
    fn fixed_step_order() {
        let (n, k) = (6, 16);
        let b = ZonalBasis::with_oversampling(n, k).unwrap();
        let f = Flow::new(&b, MuNormalization::VolumeRatio);
        let u0 = perturbed(n, k, 0.3);
        let u = |m: usize| f.fixed_steps(&u0, 2.0 / m as f64, m).unwrap();
        let (a, c, d) = (u(4), u(8), u(16));
        let e1 = a.axpy(-1.0, &c).l2_norm2().sqrt();
        let e2 = c.axpy(-1.0, &d).l2_norm2().sqrt();
        let order = (e1 / e2).log2();
        assert!(order > 3.5, "order {order} ({e1:e}, {e2:e})");
    }
}
