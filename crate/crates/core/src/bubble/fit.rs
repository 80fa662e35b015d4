//! Least-squares scaling fits in logarithmic coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    /// `value ≈ C α^k`.
    PurePower,
    /// `value ≈ C α^k ln(1/α)`; needs every `α < 1`.
    PowerLog,
}

impl FitModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::PurePower => "power",
            Self::PowerLog => "power-log",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit<T> {
    pub model: FitModel,
    pub exponent: T,
    /// Signed prefactor `C`.
    pub constant: T,
    /// Sum of squared residuals of the log-linear fit.
    pub residual: T,
}

/// Fits `ln|value| (− ln ln(1/α))` against `ln α` by ordinary least squares.
pub fn scaling_fit<T: Real>(pairs: &[(T, T)], model: FitModel) -> Result<ScalingFit<T>> {
    if pairs.len() < 3 {
        return Err(Error::DegenerateFit);
    }
    let sign = pairs[0].1.signum();
    let mut pts = Vec::with_capacity(pairs.len());
    for &(a, v) in pairs {
        if !(a > T::zero()) || v == T::zero() || v.signum() != sign || !v.is_finite() {
            return Err(Error::DegenerateFit);
        }
        let mut y = v.abs().ln();
        if model == FitModel::PowerLog {
            if !(a < T::one()) {
                return Err(Error::DegenerateFit);
            }
            y = y - (-a.ln()).ln();
        }
        pts.push((a.ln(), y));
    }
    let m = T::int(pts.len() as i64);
    let mx = pts.iter().fold(T::zero(), |s, p| s + p.0) / m;
    let my = pts.iter().fold(T::zero(), |s, p| s + p.1) / m;
    let sxx = pts.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.0 - mx));
    let sxy = pts.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.1 - my));
    if !(sxx > T::zero()) {
        return Err(Error::DegenerateFit);
    }
    let k = sxy / sxx;
    let c = my - k * mx;
    let residual = pts.iter().fold(T::zero(), |s, p| {
        let d = p.1 - (c + k * p.0);
        s + d * d
    });
    Ok(ScalingFit { model, exponent: k, constant: sign * c.exp(), residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recovers_power_log() {
        let pairs: Vec<(f64, f64)> =
            [1e-2, 1e-3, 1e-4].iter().map(|&a: &f64| (a, 3.0 * a.powi(4) * (1.0 / a).ln())).collect();
        let f = scaling_fit(&pairs, FitModel::PowerLog).unwrap();
        assert!((f.exponent - 4.0).abs() < 1e-10);
        assert!((f.constant - 3.0).abs() < 1e-9);
        assert!(f.residual < 1e-20);
        let p = scaling_fit(&pairs, FitModel::PurePower).unwrap();
        assert!(p.residual > 1e-4);
    }

    #[test]
    fn rejects_mixed_signs_and_single_points() {
        assert!(scaling_fit(&[(0.1, 1.0), (0.01, -1.0), (1e-3, 1.0)], FitModel::PurePower).is_err());
        assert!(scaling_fit(&[(0.1_f64, 1.0), (0.01, 2.0)], FitModel::PurePower).is_err());
        assert!(scaling_fit(&[(0.1_f64, 1.0), (0.1, 2.0), (0.1, 3.0)], FitModel::PurePower).is_err());
        assert!(scaling_fit(&[(2.0, 1.0), (0.5_f64, 1.0), (0.1, 1.0)], FitModel::PowerLog).is_err());
    }

    proptest! {
        #[test]
        fn exact_power_laws(k in -6.0_f64..6.0, c in -50.0_f64..50.0) {
            prop_assume!(c.abs() > 1e-3);
            let pairs: Vec<(f64, f64)> = [0.3, 0.05, 0.01, 2e-3].iter().map(|&a: &f64| (a, c * a.powf(k))).collect();
            let f = scaling_fit(&pairs, FitModel::PurePower).unwrap();
            prop_assert!((f.exponent - k).abs() < 1e-9);
            prop_assert!((f.constant - c).abs() < 1e-8 * c.abs());
        }
    }
}
