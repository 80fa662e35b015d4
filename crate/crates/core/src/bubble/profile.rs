//! The bubble family and the cutoff profiles used to localise it.

use serde::{Deserialize, Serialize};

use crate::dual::{second_derivative, Dual};
use crate::error::{Error, Result};
use crate::scalar::{Lift, Real};

/// Transition shape of `η_ε` on `[ε, 2ε]`, as a function of `t = (r − ε)/ε`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffProfile {
    /// `1 − (10t³ − 15t⁴ + 6t⁵)`, a C² junction.
    #[default]
    QuinticSmoothstep,
    /// `1 − (126t⁵ − 420t⁶ + 540t⁷ − 315t⁸ + 70t⁹)`, a C⁴ junction.
    NonicSmoothstep,
    /// `1 − f(t)/(f(t) + f(1 − t))` with `f(t) = e^{−1/t}`, C^∞.
    Exponential,
}

impl CutoffProfile {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quintic" => Ok(Self::QuinticSmoothstep),
            "nonic" => Ok(Self::NonicSmoothstep),
            "exponential" => Ok(Self::Exponential),
            _ => Err(Error::InvalidParameter(format!("unknown cutoff profile {s}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::QuinticSmoothstep => "quintic",
            Self::NonicSmoothstep => "nonic",
            Self::Exponential => "exponential",
        }
    }

    /// `η` as a function of `t`: 1 for `t ≤ 0`, 0 for `t ≥ 1`.
    pub fn eta<S: Real>(&self, t: S) -> S {
        if t <= S::zero() {
            return S::one();
        }
        if t >= S::one() {
            return S::zero();
        }
        let c = |v: i64| S::int(v);
        let s = match self {
            Self::QuinticSmoothstep => t * t * t * (c(10) + t * (c(-15) + t * c(6))),
            Self::NonicSmoothstep => {
                let t5 = t.powi(5);
                t5 * (c(126) + t * (c(-420) + t * (c(540) + t * (c(-315) + t * c(70)))))
            }
            Self::Exponential => {
                let f = |s: S| (-s.recip()).exp();
                let a = f(t);
                a / (a + f(S::one() - t))
            }
        };
        S::one() - s
    }

    /// `η_ε(r)` given `r²`; the inner branch avoids the square root at the origin.
    pub fn cutoff_r2<S: Real>(&self, r2: S, epsilon: S) -> S {
        if r2 <= epsilon * epsilon {
            return S::one();
        }
        self.eta((r2.sqrt() - epsilon) / epsilon)
    }
}

/// `u_α` as a function of `r²`: `(2α/(α² + r²))^{(n−4)/2}`.
pub fn bubble_r2<S: Real>(n: u32, alpha: S, r2: S) -> S {
    let base = (alpha + alpha) / (alpha * alpha + r2);
    if n.is_multiple_of(2) {
        base.powi((n as i32 - 4) / 2)
    } else {
        base.powi((n as i32 - 5) / 2) * base.sqrt()
    }
}

/// Values of the bubble and its radial derivatives at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BubbleValues<T> {
    pub u: T,
    pub du: T,
    pub d2u: T,
    pub lap: T,
}

/// `(u, u′, u″, Δ₀u)` of the bubble at radius `r`.
pub fn bubble<T: Real>(n: u32, alpha: T, r: T) -> Result<BubbleValues<T>> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!("dimension {n} < 5")));
    }
    if !(alpha > T::zero()) || r < T::zero() {
        return Err(Error::InvalidParameter("bubble needs α > 0 and r ≥ 0".into()));
    }
    let nm4 = T::int(n as i64 - 4);
    let s = alpha * alpha + r * r;
    let u = bubble_r2(n, alpha, r * r);
    let du = -nm4 * r / s * u;
    let d2u = nm4 * (T::int(n as i64 - 3) * r * r - alpha * alpha) / (s * s) * u;
    let lap = -nm4 * u * (T::int(2) * r * r + T::int(n as i64) * alpha * alpha) / (s * s);
    Ok(BubbleValues { u, du, d2u, lap })
}

/// Parameters of the localised bubble `φ_α = η_ε u_α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleParams<T> {
    pub n: u32,
    pub alpha: T,
    pub epsilon: T,
    pub cutoff: CutoffProfile,
}

impl<T: Real> BubbleParams<T> {
    pub fn new(n: u32, alpha: T, epsilon: T, cutoff: CutoffProfile) -> Result<Self> {
        if n < 5 {
            return Err(Error::InvalidParameter(format!("dimension {n} < 5")));
        }
        if !(alpha > T::zero()) || !(epsilon > T::zero()) {
            return Err(Error::InvalidParameter("α and ε must be positive".into()));
        }
        Ok(Self { n, alpha, epsilon, cutoff })
    }

    /// `φ_α` as a function of `r²`.
    pub fn phi_r2<S: Lift<T>>(&self, r2: S) -> S {
        let eta = self.cutoff.cutoff_r2(r2, S::lift(self.epsilon));
        if eta == S::zero() && eta.is_zero() {
            return eta;
        }
        eta * bubble_r2(self.n, S::lift(self.alpha), r2)
    }

    /// `(φ, φ′, Δ₀φ)` at radius `r > 0`, by exact differentiation of the profile.
    pub fn phi_radial(&self, r: T) -> (T, T, T)
    where
        T: Lift<T>,
    {
        let (v, d1, d2) = second_derivative(r, |s: Dual<Dual<T>>| self.phi_r2(s * s));
        let lap = d2 + T::int(self.n as i64 - 1) * d1 / r;
        (v, d1, lap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bubble_at_origin() {
        let b = bubble(8, 1.0_f64, 0.0).unwrap();
        // u(0) = 2² and Δ₀u(0) = −(n−4)·n·α⁻²·u(0)
        assert!((b.u - 4.0).abs() < 1e-14);
        assert_eq!(b.du, 0.0);
        assert!((b.lap + 128.0).abs() < 1e-12);
    }

    #[test]
    fn radial_laplacian_identity() {
        for n in 5..13u32 {
            for &a in &[0.3_f64, 1.0, 2.5] {
                let b = bubble(n, a, 1.0).unwrap();
                let lap = b.d2u + (n as f64 - 1.0) * b.du;
                assert!((lap - b.lap).abs() <= 1e-12 * b.lap.abs().max(1.0), "n={n} a={a}");
            }
        }
    }

    #[test]
    fn second_derivative_matches_difference_of_first() {
        let (n, a, r, h) = (8, 0.1_f64, 0.5, 1e-5);
        let c = bubble(n, a, r).unwrap();
        let fd = (bubble(n, a, r + h).unwrap().du - bubble(n, a, r - h).unwrap().du) / (2.0 * h);
        assert!((fd - c.d2u).abs() <= 1e-8 * c.d2u.abs());
    }

    #[test]
    fn odd_dimension_power() {
        let b = bubble(5, 0.5_f64, 0.3).unwrap();
        let expect = (1.0 / (0.25 + 0.09_f64)).powf(0.5);
        assert!((b.u - expect).abs() < 1e-14);
    }

    #[test]
    fn profiles_are_monotone_with_flat_ends() {
        for p in [CutoffProfile::QuinticSmoothstep, CutoffProfile::NonicSmoothstep, CutoffProfile::Exponential] {
            assert_eq!(p.eta(0.0_f64), 1.0);
            assert_eq!(p.eta(1.0_f64), 0.0);
            assert!((p.eta(0.5_f64) - 0.5).abs() < 1e-14);
            let mut prev = 1.0;
            for i in 1..100 {
                let v = p.eta(i as f64 / 100.0);
                assert!(v <= prev);
                prev = v;
            }
            // derivative vanishes at both junctions
            for t in [1e-6_f64, 1.0 - 1e-6] {
                let (_, d1, _) = second_derivative(t, |s| p.eta(s));
                assert!(d1.abs() < 1e-9, "{} at {t}", p.name());
            }
        }
    }

    #[test]
    fn phi_equals_bubble_inside_ball() {
        let p = BubbleParams::new(8, 0.1_f64, 0.5, CutoffProfile::default()).unwrap();
        let (v, d1, lap) = p.phi_radial(0.3);
        let b = bubble(8, 0.1, 0.3).unwrap();
        assert!((v - b.u).abs() < 1e-13 * b.u);
        assert!((d1 - b.du).abs() < 1e-12 * b.du.abs());
        assert!((lap - b.lap).abs() < 1e-11 * b.lap.abs());
        assert_eq!(p.phi_radial(1.1).0, 0.0);
    }
}
