//! The σ-integral controlling the sign of the Weyl coefficient.
//!
//! `L(n, ε, α) = ∫₀^{ε/α} [1 − c σ⁴/(1+σ²)²] (1+σ²)^{4−n} σ^{n−1} dσ`,
//! `c = (n−4)(n²−4n+8)/(n(n−2))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{radial, AdaptiveOpts};
use crate::scalar::Real;

/// `c = (n−4)(n²−4n+8)/(n(n−2))`.
pub fn lemma31_c<T: Real>(n: u32) -> T {
    let n = n as i64;
    T::int((n - 4) * (n * n - 4 * n + 8)) / T::int(n * (n - 2))
}

/// `(n−8)(n²+2n+36) + 280`, the coefficient of the remaining integral.
pub fn lemma31_bracket(n: u32) -> i64 {
    let n = n as i64;
    (n - 8) * (n * n + 2 * n + 36) + 280
}

fn check(n: u32) -> Result<()> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("the σ-integral needs n ≥ 8, got {n}")));
    }
    Ok(())
}

fn upper<T: Real>(epsilon: T, alpha: T) -> Result<T> {
    if !(epsilon > T::zero()) || !(alpha > T::zero()) {
        return Err(Error::InvalidParameter("ε and α must be positive".into()));
    }
    Ok(epsilon / alpha)
}

/// Integrand of `L` at `σ`.
pub fn lemma31_integrand<T: Real>(n: u32, sigma: T) -> T {
    if sigma == T::zero() {
        return T::zero();
    }
    let s2 = sigma * sigma;
    let q = s2 / (T::one() + s2);
    // (1+σ²)^{4−n} σ^{n−1} = q^{n−4} σ^{7−n}, overflow free for large σ
    let w = q.powi(n as i32 - 4) * sigma.powi(7 - n as i32);
    (T::one() - lemma31_c::<T>(n) * q * q) * w
}

/// Adaptive quadrature of `L(n, ε, α)` to relative tolerance `tol`.
pub fn lemma31_quadrature<T: Real>(n: u32, epsilon: T, alpha: T, tol: f64) -> Result<T> {
    check(n)?;
    let s = upper(epsilon, alpha)?;
    let breaks = [T::one(), T::int(10), T::int(100), T::int(1000), T::int(10000)];
    let e = radial(|x| lemma31_integrand(n, x), T::zero(), Some(s), T::one(), &breaks, AdaptiveOpts::rel(tol))?;
    Ok(e.value)
}

/// `∫₀^S σ^{n+3}(1+σ²)^{2−n} dσ`, the integral left over after integrating by parts twice.
pub fn lemma31_remainder_integral<T: Real>(n: u32, s: T, tol: f64) -> Result<T> {
    let breaks = [T::one(), T::int(10), T::int(100), T::int(1000), T::int(10000)];
    let f = |x: T| {
        if x == T::zero() {
            return T::zero();
        }
        let x2 = x * x;
        let q = x2 / (T::one() + x2);
        // σ^{n+3}(1+σ²)^{2−n} = q^{n−2} σ^{7−n}
        q.powi(n as i32 - 2) * x.powi(7 - n as i32)
    };
    Ok(radial(f, T::zero(), Some(s), T::one(), &breaks, AdaptiveOpts::rel(tol))?.value)
}

/// `L` through its exact decomposition: boundary terms at `S = ε/α` minus a
/// multiple of the remaining positive integral.
pub fn lemma31_closed_form<T: Real>(n: u32, epsilon: T, alpha: T, tol: f64) -> Result<T> {
    check(n)?;
    let s = upper(epsilon, alpha)?;
    let ni = n as i64;
    let nn = T::int(ni);
    let s2 = s * s;
    let q = s2 / (T::one() + s2);
    // S^n(1+S²)^{4−n} = q^{n−4} S^{8−n};  S^{n+2}(1+S²)^{3−n} = q^{n−3} S^{8−n}
    let s8 = s.powi(8 - n as i32);
    let b1 = q.powi(n as i32 - 4) * s8 / nn;
    let b2 = T::int(2 * (ni - 4)) / T::int(ni * (ni + 2)) * q.powi(n as i32 - 3) * s8;
    let k = T::int(ni - 4) / T::int(ni * (ni + 2) * (ni - 2)) * T::int(lemma31_bracket(n));
    Ok(b1 + b2 - k * lemma31_remainder_integral(n, s, tol)?)
}

/// Root `σ* > 0` of `(n−4)(n²−4n+8)σ⁴ = n(n−2)(1+σ²)²`, found by bisection.
/// The integrand is positive on `[0, σ*)` and negative beyond.
pub fn sign_change_root<T: Real>(n: u32) -> Result<T> {
    let c = lemma31_c::<T>(n);
    if !(c > T::one()) {
        return Err(Error::InvalidParameter(format!("integrand has no sign change for n = {n}")));
    }
    let h = |s: T| {
        let s2 = s * s;
        T::one() - c * s2 * s2 / ((T::one() + s2) * (T::one() + s2))
    };
    let (mut lo, mut hi) = (T::zero(), T::one());
    while h(hi) > T::zero() {
        hi = hi * T::int(2);
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::int(2);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::int(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `n > 8`: `L → −C₁(n, ε)`.
    ConstantLimit,
    /// `n = 8`: `L/ln α → C₂(n, ε)`.
    LogDivergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Result<T> {
    pub n: u32,
    pub epsilon: T,
    pub alpha: T,
    pub value: T,
    pub regime: Regime,
    /// `C₁ ≈ −L` for `n > 8`, `C₂ ≈ L/ln α` for `n = 8`.
    pub fitted_constant: T,
}

/// Evaluates `L` and the regime constant estimate at one `α`.
pub fn lemma31<T: Real>(n: u32, epsilon: T, alpha: T, tol: f64) -> Result<Lemma31Result<T>> {
    let value = lemma31_quadrature(n, epsilon, alpha, tol)?;
    let (regime, fitted_constant) = if n == 8 {
        (Regime::LogDivergent, value / alpha.ln())
    } else {
        (Regime::ConstantLimit, -value)
    };
    Ok(Lemma31Result { n, epsilon, alpha, value, regime, fitted_constant })
}

/// `(L(α_i) − L(α_{i+1}))/(ln α_i − ln α_{i+1})` for consecutive grid points:
/// the local slope in `ln α`, which tends to `C₂` for `n = 8` and to 0 for `n > 8`.
pub fn successive_log_slopes<T: Real>(results: &[Lemma31Result<T>]) -> Vec<T> {
    results
        .windows(2)
        .map(|w| (w[0].value - w[1].value) / (w[0].alpha.ln() - w[1].alpha.ln()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_values() {
        assert_eq!(lemma31_bracket(8), 280);
        assert_eq!(lemma31_bracket(10), 592);
        assert_eq!(lemma31_bracket(8), 8 * 8 * 8 - 6 * 64 + 20 * 8 - 8);
        for n in 8..20 {
            let m = n as i64;
            assert_eq!(lemma31_bracket(n), m * m * m - 6 * m * m + 20 * m - 8);
            assert!(lemma31_bracket(n) > 0);
        }
    }

    #[test]
    fn vanishing_range() {
        let v = lemma31_quadrature(10, 1e-3_f64, 1e3, 1e-12).unwrap();
        assert!(v.abs() < 1e-50);
        assert!(v > 0.0);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for n in [8u32, 9, 10, 12] {
            let a = lemma31_quadrature(n, 0.5_f64, 1e-3, 1e-13).unwrap();
            let b = lemma31_closed_form(n, 0.5_f64, 1e-3, 1e-13).unwrap();
            assert!((a - b).abs() <= 1e-8 * a.abs(), "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn sign_change_root_matches_closed_form() {
        for n in 8..15u32 {
            let c = lemma31_c::<f64>(n);
            let expect = (1.0 / (c.sqrt() - 1.0)).sqrt();
            let got = sign_change_root::<f64>(n).unwrap();
            assert!((got - expect).abs() < 1e-13 * expect, "n={n}");
            assert!(lemma31_integrand(n, 0.99 * got) > 0.0);
            assert!(lemma31_integrand(n, 1.01 * got) < 0.0);
        }
        assert!(sign_change_root::<f64>(5).is_err());
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(lemma31_quadrature(7, 1.0_f64, 1e-2, 1e-10).is_err());
    }
}
