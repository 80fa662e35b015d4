//! Assembled upper bound for the Sobolev quotient of the localised bubble.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{scaling_fit, FitModel, ScalingFit};
use super::integrals::{q_sphere, radial_integrals, weyl_coefficient};
use super::profile::{BubbleParams, CutoffProfile};
use crate::error::{Error, Result};
use crate::scalar::Base;

/// Remainder integrals, each entering the numerator with implied constant 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Remainders<T> {
    pub biharm_tail: T,
    pub biharm_annulus: T,
    pub r_mass: T,
    pub r3grad: T,
    pub annulus_mass: T,
    pub annulus_grad: T,
}

impl<T: Base> Remainders<T> {
    pub fn total(&self) -> T {
        self.biharm_tail + self.biharm_annulus + self.r_mass + self.r3grad + self.annulus_mass + self.annulus_grad
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow<T> {
    pub alpha: T,
    /// `∫_{ℝⁿ}|Δ₀u_α|²`.
    pub biharmonic: T,
    pub weyl_coefficient: T,
    /// `W2 · weyl_coefficient`, the deficit.
    pub weyl_term: T,
    pub remainders: Remainders<T>,
    pub remainder_total: T,
    pub i_crit: T,
    pub crit_tail: T,
    /// `(I_crit − crit_tail)^{(n−4)/n}`.
    pub denominator: T,
    pub numerator: T,
    /// `numerator / denominator`.
    pub bound: T,
    /// `ln(bound/q(Sⁿ))` with the exact identity `I_biharm = q(Sⁿ) I_crit^{(n−4)/n}`
    /// factored out, so the sign is not swamped by quadrature noise.
    pub log_ratio: T,
    /// `I_biharm/(q(Sⁿ) I_crit^{(n−4)/n}) − 1`, which is zero in exact arithmetic.
    pub identity_residual: T,
    pub below_q: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport<T> {
    pub n: u32,
    pub alphas: Vec<T>,
    pub epsilon: T,
    pub w2: T,
    pub cutoff: CutoffProfile,
    pub q_sphere: T,
    pub rows: Vec<GapRow<T>>,
    /// Fits of the deficit `W2·weyl_coefficient` against `α`.
    pub deficit_power_fit: Option<ScalingFit<T>>,
    pub deficit_log_fit: Option<ScalingFit<T>>,
    /// Pure-power fit of the remainder total.
    pub remainder_fit: Option<ScalingFit<T>>,
}

impl<T: Base> GapReport<T> {
    pub fn quotient_upper_bounds(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.bound).collect()
    }
}

fn row<T: Base>(n: u32, alpha: T, epsilon: T, w2: T, cutoff: CutoffProfile, q: T, tol: f64) -> Result<GapRow<T>> {
    let p = BubbleParams::new(n, alpha, epsilon, cutoff)?;
    let ri = radial_integrals(&p, tol)?;
    let wc = weyl_coefficient(&p, tol)?.direct;
    let remainders = Remainders {
        biharm_tail: ri.biharm_tail,
        biharm_annulus: ri.biharm_annulus,
        r_mass: ri.r_mass,
        r3grad: ri.r3grad,
        annulus_mass: ri.annulus_mass,
        annulus_grad: ri.annulus_grad,
    };
    let remainder_total = remainders.total();
    let weyl_term = w2 * wc;
    let expo = T::int(n as i64 - 4) / T::int(n as i64);
    let numerator = ri.i_biharm + weyl_term + remainder_total;
    let denominator = (ri.i_crit - ri.crit_tail).powf(expo);
    let log_ratio = ((weyl_term + remainder_total) / ri.i_biharm).ln_1p() - expo * (-ri.crit_tail / ri.i_crit).ln_1p();
    let identity_residual = ri.i_biharm / (q * ri.i_crit.powf(expo)) - T::one();
    Ok(GapRow {
        alpha,
        biharmonic: ri.i_biharm,
        weyl_coefficient: wc,
        weyl_term,
        remainders,
        remainder_total,
        i_crit: ri.i_crit,
        crit_tail: ri.crit_tail,
        denominator,
        numerator,
        bound: numerator / denominator,
        log_ratio,
        identity_residual,
        below_q: log_ratio < T::zero(),
    })
}

/// Assembles one [`GapRow`] per `α` and fits the deficit and remainder scalings
/// when the grid has at least three points.
pub fn gap_certificate<T: Base>(
    n: u32,
    alphas: &[T],
    epsilon: T,
    w2: T,
    cutoff: CutoffProfile,
    tol: f64,
) -> Result<GapReport<T>> {
    if alphas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if n < 8 {
        return Err(Error::InvalidParameter(format!("gap certificate needs n ≥ 8, got {n}")));
    }
    if !(w2 >= T::zero()) {
        return Err(Error::InvalidParameter("W2 must be non-negative".into()));
    }
    let q = q_sphere::<T>(n);
    let rows = alphas
        .par_iter()
        .map(|&a| row(n, a, epsilon, w2, cutoff, q, tol))
        .collect::<Result<Vec<_>>>()?;
    let fit = |f: fn(&GapRow<T>) -> T, m| {
        let pairs: Vec<(T, T)> = rows.iter().map(|r| (r.alpha, f(r))).collect();
        scaling_fit(&pairs, m).ok()
    };
    Ok(GapReport {
        n,
        alphas: alphas.to_vec(),
        epsilon,
        w2,
        cutoff,
        q_sphere: q,
        deficit_power_fit: fit(|r| r.weyl_term, FitModel::PurePower),
        deficit_log_fit: fit(|r| r.weyl_term, FitModel::PowerLog),
        remainder_fit: fit(|r| r.remainder_total, FitModel::PurePower),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_weyl_term_stays_above_sphere() {
        let r = gap_certificate(10, &[1e-2_f64, 1e-3], 0.1, 0.0, CutoffProfile::default(), 1e-11).unwrap();
        for row in &r.rows {
            assert!(!row.below_q);
            assert!(row.log_ratio > 0.0);
            assert!(row.identity_residual.abs() < 1e-9);
        }
        // the excess shrinks with α
        assert!(r.rows[1].log_ratio < r.rows[0].log_ratio);
        assert!(r.deficit_power_fit.is_none());
    }

    #[test]
    fn breakdown_is_consistent() {
        let r = gap_certificate(9, &[1e-2_f64], 0.2, 1.0, CutoffProfile::default(), 1e-11).unwrap();
        let row = &r.rows[0];
        assert!((row.numerator - (row.biharmonic + row.weyl_term + row.remainder_total)).abs() < 1e-12 * row.numerator);
        let direct = (row.bound / r.q_sphere).ln();
        assert!((direct - row.log_ratio).abs() < 1e-8);
        assert!(row.weyl_term < 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            gap_certificate::<f64>(10, &[], 0.1, 1.0, CutoffProfile::default(), 1e-10),
            Err(Error::EmptyGrid)
        ));
        assert!(gap_certificate(7, &[1e-2_f64], 0.1, 1.0, CutoffProfile::default(), 1e-10).is_err());
        assert!(gap_certificate(10, &[1e-2_f64], 0.1, -1.0, CutoffProfile::default(), 1e-10).is_err());
    }
}
