//! Radial integrals of the bubble over balls, annuli and complements.

use serde::{Deserialize, Serialize};

use super::lemma31::lemma31_quadrature;
use super::profile::{bubble, BubbleParams};
use crate::dual::{second_derivative, Dual};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, radial, AdaptiveOpts};
use crate::scalar::{Base, Real};
use crate::special::{pow2, sphere_volume};

/// `q(Sⁿ) = (n−4)/2 · n(n²−4)/8 · ω_n^{4/n}`, the sharp constant of the round sphere.
pub fn q_sphere<T: Real>(n: u32) -> T {
    let ni = n as i64;
    let q = T::int(ni * (ni * ni - 4)) / T::int(8);
    T::int(ni - 4) / T::int(2) * q * sphere_volume::<T>(n).powf(T::int(4) / T::int(ni))
}

/// `Δ₀²u_α` at radius `r`, by exact differentiation of the closed-form Laplacian.
pub fn radial_bilaplacian<T: Base>(n: u32, alpha: T, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::InvalidParameter("radial bilaplacian needs r > 0".into()));
    }
    bubble(n, alpha, r)?;
    let (_, d1, d2) = second_derivative(r, |s: Dual<Dual<T>>| {
        let a = Dual::cst(Dual::cst(alpha));
        bubble(n, a, s).map(|b| b.lap).unwrap_or_else(|_| Dual::cst(Dual::cst(T::nan())))
    });
    Ok(d2 + T::int(n as i64 - 1) * d1 / r)
}

/// `ω_{n−1} ∫ f(r) r^{n−1} dr` over `[a, b]`.
fn shell<T: Real>(
    n: u32,
    mut f: impl FnMut(T) -> T,
    a: T,
    b: Option<T>,
    scale: T,
    tol: f64,
) -> Result<T> {
    let w = sphere_volume::<T>(n - 1);
    let e = radial(
        |r| {
            let v = f(r);
            if v == T::zero() {
                v
            } else {
                v * r.powi(n as i32 - 1)
            }
        },
        a,
        b,
        scale,
        &[],
        AdaptiveOpts::rel(tol),
    )?;
    Ok(w * e.value)
}

/// `ω_{n−1} ∫_ε^{2ε} f(r) r^{n−1} dr`.
fn annulus<T: Real>(n: u32, mut f: impl FnMut(T) -> T, epsilon: T, tol: f64) -> Result<T> {
    let w = sphere_volume::<T>(n - 1);
    let opts = AdaptiveOpts { abs_tol: 0.0, ..AdaptiveOpts::rel(tol) };
    let e = adaptive(|r| f(r) * r.powi(n as i32 - 1), epsilon, epsilon * T::int(2), &[], opts)?;
    Ok(w * e.value)
}

/// The radial integrals entering the energy comparison for one `(n, α, ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialIntegrals<T> {
    pub n: u32,
    pub alpha: T,
    pub epsilon: T,
    /// `∫_{ℝⁿ} |Δ₀u_α|²`.
    pub i_biharm: T,
    /// `∫_{ℝⁿ} u_α^{2n/(n−4)}`.
    pub i_crit: T,
    /// `∫_{B_ε} u_α²`.
    pub i_mass: T,
    /// `∫_{B_ε} r²|u_α′|²`.
    pub i_r2grad: T,
    /// `∫_{ℝⁿ∖B_ε} |Δ₀u_α|²`.
    pub biharm_tail: T,
    /// `∫_{ℝⁿ∖B_ε} u_α^{2n/(n−4)}`.
    pub crit_tail: T,
    /// `∫_{B_2ε∖B_ε} |Δ₀φ_α|²`.
    pub biharm_annulus: T,
    /// `∫_{B_ε} r u_α²`.
    pub r_mass: T,
    /// `∫_{B_ε} r³|u_α′|²`.
    pub r3grad: T,
    /// `∫_{B_2ε∖B_ε} φ_α²`.
    pub annulus_mass: T,
    /// `∫_{B_2ε∖B_ε} (|u_α′|² + u_α²)`.
    pub annulus_grad: T,
}

fn crit_power<T: Real>(n: u32, alpha: T, r: T) -> T {
    // u^{2n/(n−4)} = (2α/(α² + r²))^n
    ((alpha + alpha) / (alpha * alpha + r * r)).powi(n as i32)
}

/// Computes every [`RadialIntegrals`] field to relative tolerance `tol`.
pub fn radial_integrals<T: Base>(p: &BubbleParams<T>, tol: f64) -> Result<RadialIntegrals<T>> {
    let (n, a, e) = (p.n, p.alpha, p.epsilon);
    let b = |r: T| bubble(n, a, r).expect("validated parameters");
    let lap2 = |r: T| {
        let l = b(r).lap;
        l * l
    };
    let i_biharm = shell(n, lap2, T::zero(), None, a, tol)?;
    let i_crit = shell(n, |r| crit_power(n, a, r), T::zero(), None, a, tol)?;
    let i_mass = shell(n, |r| b(r).u.powi(2), T::zero(), Some(e), a, tol)?;
    let i_r2grad = shell(n, |r| (r * b(r).du).powi(2), T::zero(), Some(e), a, tol)?;
    let biharm_tail = shell(n, lap2, e, None, e, tol)?;
    let crit_tail = shell(n, |r| crit_power(n, a, r), e, None, e, tol)?;
    let r_mass = shell(n, |r| r * b(r).u.powi(2), T::zero(), Some(e), a, tol)?;
    let r3grad = shell(n, |r| r.powi(3) * b(r).du.powi(2), T::zero(), Some(e), a, tol)?;
    let biharm_annulus = annulus(n, |r| p.phi_radial(r).2.powi(2), e, tol)?;
    let annulus_mass = annulus(n, |r| p.phi_radial(r).0.powi(2), e, tol)?;
    let annulus_grad = annulus(
        n,
        |r| {
            let v = b(r);
            v.du * v.du + v.u * v.u
        },
        e,
        tol,
    )?;
    Ok(RadialIntegrals {
        n,
        alpha: a,
        epsilon: e,
        i_biharm,
        i_crit,
        i_mass,
        i_r2grad,
        biharm_tail,
        crit_tail,
        biharm_annulus,
        r_mass,
        r3grad,
        annulus_mass,
        annulus_grad,
    })
}

/// The coefficient of `|W(p)|²` in the energy expansion, computed two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylCoefficient<T> {
    /// `(n−4)/(24(n−1)) ∫_{B_ε}u² − (n²−4n+8)/(24n(n−1)(n−2)) ∫_{B_ε}r²|u′|²`.
    pub direct: T,
    /// `(n−4) 2^{n−4} ω_{n−1} α⁴ L(n, ε, α) / (24(n−1))`.
    pub via_sigma: T,
    /// The σ-integral `L(n, ε, α)`.
    pub sigma_integral: T,
}

impl<T: Real> WeylCoefficient<T> {
    pub fn relative_gap(&self) -> T {
        (self.direct - self.via_sigma).abs() / self.direct.abs()
    }
}

/// Both evaluations of the Weyl coefficient; requires `n ≥ 8`. The cutoff
/// profile plays no role since only `B_ε` enters.
pub fn weyl_coefficient<T: Base>(p: &BubbleParams<T>, tol: f64) -> Result<WeylCoefficient<T>> {
    let (n, alpha, epsilon) = (p.n, p.alpha, p.epsilon);
    if n < 8 {
        return Err(Error::InvalidParameter(format!("Weyl coefficient needs n ≥ 8, got {n}")));
    }
    let ni = n as i64;
    let b = |r: T| bubble(n, alpha, r).expect("validated parameters");
    let mass = shell(n, |r| b(r).u.powi(2), T::zero(), Some(epsilon), alpha, tol)?;
    let r2g = shell(n, |r| (r * b(r).du).powi(2), T::zero(), Some(epsilon), alpha, tol)?;
    let direct = T::int(ni - 4) / T::int(24 * (ni - 1)) * mass
        - T::int(ni * ni - 4 * ni + 8) / T::int(24 * ni * (ni - 1) * (ni - 2)) * r2g;
    let sigma_integral = lemma31_quadrature(n, epsilon, alpha, tol)?;
    let via_sigma = T::int(ni - 4) * pow2::<T>(n as i32 - 4) * sphere_volume::<T>(n - 1) / T::int(24 * (ni - 1))
        * alpha.powi(4)
        * sigma_integral;
    Ok(WeylCoefficient { direct, via_sigma, sigma_integral })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::CutoffProfile;

    #[test]
    fn q_sphere_low_dimensions() {
        // n = 6: 1·6·32/8·ω₆^{2/3}, ω₆ = 16π³/15
        let w6 = 16.0 * std::f64::consts::PI.powi(3) / 15.0;
        assert!((q_sphere::<f64>(6) - 24.0 * w6.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((q_sphere::<f64>(8) - 653.824711826446959259166350487).abs() < 1e-10);
    }

    #[test]
    fn sharp_ratio_equals_sphere_constant() {
        for n in [5u32, 8, 10] {
            for &a in &[1.0_f64, 1e-2] {
                let p = BubbleParams::new(n, a, 0.5, CutoffProfile::default()).unwrap();
                let ri = radial_integrals(&p, 1e-12).unwrap();
                let q = ri.i_biharm / ri.i_crit.powf((n as f64 - 4.0) / n as f64);
                let qs = q_sphere::<f64>(n);
                assert!((q - qs).abs() < 1e-9 * qs, "n={n} α={a}: {q} vs {qs}");
            }
        }
    }

    #[test]
    fn bilaplacian_is_critical_power() {
        for n in [5u32, 8, 10] {
            let k = (n as f64 - 4.0) * n as f64 * (n as f64 * n as f64 - 4.0) / 16.0;
            for &r in &[0.05_f64, 0.7, 3.0] {
                let a = 0.4;
                let u = bubble(n, a, r).unwrap().u;
                let rhs = k * u.powf((n as f64 + 4.0) / (n as f64 - 4.0));
                let lhs = radial_bilaplacian(n, a, r).unwrap();
                assert!((lhs - rhs).abs() < 1e-10 * rhs, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn two_routes_agree() {
        for n in [8u32, 9, 10] {
            let p = BubbleParams::new(n, 1e-3_f64, 0.5, CutoffProfile::default()).unwrap();
            let w = weyl_coefficient(&p, 1e-12).unwrap();
            assert!(w.relative_gap() < 1e-9, "n={n}: {w:?}");
            assert!(w.direct < 0.0);
        }
    }

    #[test]
    fn ball_integrals_are_monotone_in_epsilon() {
        let p1 = BubbleParams::new(9, 0.1_f64, 0.2, CutoffProfile::default()).unwrap();
        let p2 = BubbleParams::new(9, 0.1_f64, 0.4, CutoffProfile::default()).unwrap();
        let (a, b) = (radial_integrals(&p1, 1e-11).unwrap(), radial_integrals(&p2, 1e-11).unwrap());
        assert!(a.i_mass < b.i_mass && a.i_r2grad < b.i_r2grad);
        assert!(a.biharm_tail > b.biharm_tail && a.crit_tail > b.crit_tail);
        assert!((a.i_biharm - b.i_biharm).abs() < 1e-10 * a.i_biharm);
    }
}
