//! Right-hand side of the nonlocal Q-curvature flow on the round sphere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Base;
use crate::spectral::{
    critical_integral, energy, nonlinear_power, paneitz_inverse, positive_nodal, ZonalBasis, ZonalField,
};

/// How the multiplier `μ` in front of the nonlocal term is normalised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MuNormalization {
    /// `E[u]/(∫u^{2n/(n−4)})^{(n−4)/n}`, the Sobolev quotient.
    SobolevQuotient,
    /// `E[u]/∫u^{2n/(n−4)}`; makes `∫φ P u = 0`, so `E[u]` is conserved.
    #[default]
    VolumeRatio,
}

impl MuNormalization {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sobolev" | "sobolev-quotient" => Ok(Self::SobolevQuotient),
            "volume" | "volume-ratio" => Ok(Self::VolumeRatio),
            _ => Err(Error::InvalidParameter(format!("unknown μ normalisation {s}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::SobolevQuotient => "sobolev-quotient",
            Self::VolumeRatio => "volume-ratio",
        }
    }
}

fn check_nonzero<T: Base>(u: &ZonalField<T>) -> Result<()> {
    if u.coeffs.iter().all(|c| *c == T::zero()) {
        return Err(Error::ZeroField);
    }
    Ok(())
}

/// `μ` under the given normalisation, with the volume `∫u^{2n/(n−4)}` it used.
pub fn mu_and_volume<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>, norm: MuNormalization) -> Result<(T, T)> {
    check_nonzero(u)?;
    let vol = critical_integral(b, u)?;
    let e = energy(u);
    let mu = match norm {
        MuNormalization::SobolevQuotient => {
            let n = u.n as i64;
            e / vol.powf(T::int(n - 4) / T::int(n))
        }
        MuNormalization::VolumeRatio => e / vol,
    };
    Ok((mu, vol))
}

/// The Sobolev quotient `E[u]/(∫u^{2n/(n−4)})^{(n−4)/n}`.
pub fn mu_of<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> Result<T> {
    Ok(mu_and_volume(b, u, MuNormalization::SobolevQuotient)?.0)
}

/// `φ = −u + μ P⁻¹(u^{(n+4)/(n−4)})` under the given normalisation.
pub fn velocity_with<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>, norm: MuNormalization) -> Result<ZonalField<T>> {
    let (mu, _) = mu_and_volume(b, u, norm)?;
    let n = u.n as i64;
    let pw = nonlinear_power(b, u, T::int(n + 4) / T::int(n - 4))?;
    let v = paneitz_inverse(&pw.field);
    let phi = v.scale(mu).axpy(-T::one(), u);
    if phi.coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("flow velocity"));
    }
    Ok(phi)
}

/// [`velocity_with`] for the Sobolev quotient.
pub fn velocity<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> Result<ZonalField<T>> {
    velocity_with(b, u, MuNormalization::SobolevQuotient)
}

/// `F₂ = ∫ φ P φ` under the given normalisation.
pub fn f2_with<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>, norm: MuNormalization) -> Result<T> {
    Ok(energy(&velocity_with(b, u, norm)?))
}

/// [`f2_with`] for the Sobolev quotient.
pub fn f2_of<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> Result<T> {
    f2_with(b, u, MuNormalization::SobolevQuotient)
}

/// `H(F) = ∫₀^F ds/(1 + √s) = 2√F − 2 ln(1 + √F)`.
pub fn h_function<T: Base>(f2: T) -> Result<T> {
    if f2 < T::zero() || !f2.is_finite() {
        return Err(Error::InvalidParameter("H needs a finite F₂ ≥ 0".into()));
    }
    let s = f2.sqrt();
    if s < T::lit(1e-3) {
        // 2(s − ln(1+s)) = s² − 2s³/3 + s⁴/2 − 2s⁵/5 + …
        let mut term = s * s;
        let mut sum = T::zero();
        for k in 2..12 {
            let c = T::int(2) / T::int(k);
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            sum = sum + sign * c * term;
            term = term * s;
        }
        return Ok(sum);
    }
    Ok(T::int(2) * (s - s.ln_1p()))
}

/// Minimum of `u` over the transform nodes.
pub fn min_nodal<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> T {
    b.nodal(u).into_iter().fold(T::infinity(), |a, v| a.min(v))
}

/// Minimum of `P u` over the nodes: the discrete cone condition `P u ≥ 0`.
pub fn cone_minimum<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> Result<T> {
    positive_nodal(b, u)?;
    let pu = crate::spectral::paneitz_apply_sphere(u);
    Ok(b.nodal(&pu).into_iter().fold(T::infinity(), |a, v| a.min(v)))
}

/// The constant `c*` with `∫ c*^{2n/(n−4)} dμ = 1`, the fixed point of the flow.
pub fn fixed_point_constant<T: Base>(n: u32) -> T {
    let ni = n as i64;
    crate::special::sphere_volume::<T>(n).powf(-T::int(ni - 4) / T::int(2 * ni))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::q_sphere;
    use crate::quadrature::{adaptive, AdaptiveOpts};
    use crate::special::sphere_volume;
    use crate::spectral::{paneitz_apply_sphere, paneitz_eigenvalue};

    fn basis(n: u32) -> ZonalBasis<f64> {
        ZonalBasis::with_oversampling(n, 32).unwrap()
    }

    #[test]
    fn constants_give_sphere_constant() {
        for n in [5u32, 8, 10] {
            let b = basis(n);
            for &c in &[0.3, 1.0, 7.0] {
                let mu = mu_of(&b, &ZonalField::constant(n, 32, c)).unwrap();
                let q = q_sphere::<f64>(n);
                assert!((mu - q).abs() < 1e-12 * q, "n={n} c={c}");
            }
        }
    }

    #[test]
    fn scale_invariance_and_perturbation() {
        let n = 8;
        let b = basis(n);
        let u = ZonalField::constant(n, 32, 1.0).axpy(0.1, &ZonalField::harmonic(n, 32, 2));
        let (m1, m2) = (mu_of(&b, &u).unwrap(), mu_of(&b, &u.scale(3.7)).unwrap());
        assert!((m1 - m2).abs() < 1e-12 * m1);
        assert!(m1 > q_sphere::<f64>(n));
        assert_eq!(mu_of(&b, &ZonalField::zeros(n, 32)), Err(Error::ZeroField));
    }

    #[test]
    fn fixed_point_and_constant_velocity() {
        for n in [5u32, 8, 10] {
            let b = basis(n);
            let c = fixed_point_constant::<f64>(n);
            let phi = velocity(&b, &ZonalField::constant(n, 32, c)).unwrap();
            assert!(phi.coeffs.iter().all(|x| x.abs() <= 1e-12), "n={n}: {:?}", &phi.coeffs[..2]);
            let w = sphere_volume::<f64>(n);
            let p = (n as f64 + 4.0) / (n as f64 - 4.0);
            for &c in &[0.5 * c, 2.0 * c] {
                let phi = velocity(&b, &ZonalField::constant(n, 32, c)).unwrap();
                let expect = -c + w.powf(4.0 / n as f64) * c.powf(p);
                let got = b.eval(&phi, 0.3);
                assert!((got - expect).abs() < 1e-11 * expect.abs().max(1.0));
                assert!(phi.coeffs[1..].iter().all(|x| x.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn equilibrium_only_at_unit_volume() {
        let n = 6;
        let b = basis(n);
        let c0 = fixed_point_constant::<f64>(n);
        for &c in &[0.9 * c0, c0, 1.1 * c0] {
            let u = ZonalField::constant(n, 32, c);
            let vol = critical_integral(&b, &u).unwrap();
            let phi = velocity(&b, &u).unwrap();
            let at_rest = phi.l2_norm2().sqrt() < 1e-10;
            assert_eq!(at_rest, (vol - 1.0).abs() < 1e-10, "c={c}");
        }
    }

    #[test]
    fn volume_ratio_pairing_vanishes() {
        let n = 8;
        let b = basis(n);
        let u = ZonalField::constant(n, 32, 1.2).axpy(0.2, &ZonalField::harmonic(n, 32, 3));
        let phi = velocity_with(&b, &u, MuNormalization::VolumeRatio).unwrap();
        let pu = paneitz_apply_sphere(&u);
        let pairing: f64 = phi.coeffs.iter().zip(&pu.coeffs).map(|(a, c)| a * c).sum();
        assert!(pairing.abs() < 1e-10 * energy(&u), "{pairing}");
    }

    #[test]
    fn f2_is_quadratic_near_fixed_point() {
        let n = 8;
        let b = basis(n);
        let c = fixed_point_constant::<f64>(n);
        let base = ZonalField::constant(n, 32, c);
        assert!(f2_of(&b, &base).unwrap() < 1e-24);
        let f = |e: f64| f2_of(&b, &base.axpy(e, &ZonalField::harmonic(n, 32, 2))).unwrap();
        let (a, s) = (f(1e-3), f(1e-4));
        assert!(a > 0.0);
        let (ra, rs) = (a / 1e-6, s / 1e-8);
        assert!((ra - rs).abs() < 0.05 * ra);
        // linearisation at the fixed point: φ₂ = δ(pΛ₀/Λ₂ − 1), so F₂/δ² → (Λ₂ − pΛ₀)²/Λ₂
        let (l0, l2) = (paneitz_eigenvalue::<f64>(n, 0), paneitz_eigenvalue::<f64>(n, 2));
        let p = (n as f64 + 4.0) / (n as f64 - 4.0);
        let lin = (l2 - p * l0).powi(2) / l2;
        assert!((rs - lin).abs() < 1e-3 * lin, "{rs} vs {lin}");
    }

    #[test]
    fn h_function_values() {
        assert_eq!(h_function(0.0_f64).unwrap(), 0.0);
        assert!(h_function(-1.0_f64).is_err());
        for i in 1..200 {
            let s = 1e-2 * i as f64 / 200.0;
            let h = h_function(s).unwrap();
            assert!((h / s - 1.0).abs() <= s.sqrt());
        }
        for &s in &[0.1_f64, 1.0, 10.0] {
            let q = adaptive(|x: f64| 1.0 / (1.0 + x.sqrt()), 0.0, s, &[], AdaptiveOpts::rel(1e-14)).unwrap();
            assert!((h_function(s).unwrap() - q.value).abs() < 1e-12 * q.value.max(1.0));
        }
        // the series and closed-form branches meet continuously
        let a = h_function(0.999e-6_f64).unwrap();
        let c = h_function(1.001e-6_f64).unwrap();
        assert!((c - a) > 0.0 && (c - a) < 1e-8);
    }
}
