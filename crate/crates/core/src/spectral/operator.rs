//! The Paneitz operator of the round sphere acting on zonal fields.

use serde::{Deserialize, Serialize};

use super::basis::{Projection, ZonalBasis, ZonalField};
use crate::dual::Dual;
use crate::error::{Error, Result};
use crate::scalar::Base;

/// `Λ_k = λ_k² + ((n²−2n−4)/2)λ_k + n(n−4)(n²−4)/16` with `λ_k = k(k+n−1)`.
pub fn paneitz_eigenvalue<T: Base>(n: u32, k: usize) -> T {
    let (n, l) = (n as i64, (k as i64) * (k as i64 + n as i64 - 1));
    let l = T::int(l);
    l * l + T::int(n * n - 2 * n - 4) / T::int(2) * l + T::int(n * (n - 4) * (n * n - 4)) / T::int(16)
}

/// `(λ_k + (n+2)(n−4)/4)(λ_k + n(n−2)/4)`.
pub fn paneitz_eigenvalue_factored<T: Base>(n: u32, k: usize) -> T {
    let (n, l) = (n as i64, (k as i64) * (k as i64 + n as i64 - 1));
    let l = T::int(l);
    (l + T::int((n + 2) * (n - 4)) / T::int(4)) * (l + T::int(n * (n - 2)) / T::int(4))
}

/// `16 Λ_k` in both forms, in integer arithmetic.
pub fn paneitz_eigenvalue_x16(n: u32, k: u64) -> (i128, i128) {
    let n = n as i128;
    let k = k as i128;
    let l = k * (k + n - 1);
    let expanded = 16 * l * l + 8 * (n * n - 2 * n - 4) * l + n * (n - 4) * (n * n - 4);
    let factored = (4 * l + (n + 2) * (n - 4)) * (4 * l + n * (n - 2));
    (expanded, factored)
}

pub fn paneitz_apply_sphere<T: Base>(u: &ZonalField<T>) -> ZonalField<T> {
    let c = u.coeffs.iter().enumerate().map(|(k, &c)| c * paneitz_eigenvalue::<T>(u.n, k)).collect();
    ZonalField { n: u.n, coeffs: c }
}

pub fn paneitz_inverse<T: Base>(u: &ZonalField<T>) -> ZonalField<T> {
    let c = u.coeffs.iter().enumerate().map(|(k, &c)| c / paneitz_eigenvalue::<T>(u.n, k)).collect();
    ZonalField { n: u.n, coeffs: c }
}

/// `E[u] = ∫ u P u dμ = Σ Λ_k c_k²`.
pub fn energy<T: Base>(u: &ZonalField<T>) -> T {
    u.coeffs
        .iter()
        .enumerate()
        .fold(T::zero(), |s, (k, &c)| s + paneitz_eigenvalue::<T>(u.n, k) * c * c)
}

fn is_integer<T: Base>(p: T) -> bool {
    p == p.round()
}

fn first_non_positive<T: Base>(b: &ZonalBasis<T>, v: &[T]) -> Result<()> {
    match v.iter().position(|&x| !(x > T::zero())) {
        Some(j) => Err(Error::NonPositiveField { point: vec![b.nodes[j].re_f64()], value: v[j].re_f64() }),
        None => Ok(()),
    }
}

/// Nodal values of `u`, checked positive.
pub fn positive_nodal<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> Result<Vec<T>> {
    let v = b.nodal(u);
    first_non_positive(b, &v)?;
    Ok(v)
}

/// `u^p` evaluated at the nodes and projected back to degree `K`.
pub fn nonlinear_power<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>, p: T) -> Result<Projection<T>> {
    let v = b.nodal(u);
    if !is_integer(p) {
        first_non_positive(b, &v)?;
    }
    let w: Vec<T> = v.iter().map(|&x| if is_integer(p) { x.powi(p.re_f64() as i32) } else { x.powf(p) }).collect();
    Ok(b.project(&w))
}

/// `∫ u^{2n/(n−4)} dμ` by nodal quadrature.
pub fn critical_integral<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> Result<T> {
    let v = positive_nodal(b, u)?;
    let e = T::int(2 * u.n as i64) / T::int(u.n as i64 - 4);
    Ok(b.integrate(&v.iter().map(|&x| x.powf(e)).collect::<Vec<_>>()))
}

/// `Q_g = (2/(n−4)) P u / u^{(n+4)/(n−4)}` at the nodes.
pub fn q_curvature_nodal<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> Result<Vec<T>> {
    let v = positive_nodal(b, u)?;
    let pu = b.nodal(&paneitz_apply_sphere(u));
    let n = u.n as i64;
    let p = T::int(n + 4) / T::int(n - 4);
    let k = T::int(2) / T::int(n - 4);
    Ok(v.iter().zip(&pu).map(|(&x, &y)| k * y / x.powf(p)).collect())
}

/// `Q_g` of `g = u^{4/(n−4)} g_{Sⁿ}`, projected to degree `K`.
pub fn q_curvature_of_conformal<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> Result<Projection<T>> {
    Ok(b.project(&q_curvature_nodal(b, u)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KazdanWarner<T> {
    /// `∫ ⟨X, ∇Q_g⟩ u^{2n/(n−4)} dμ` with `X = ∇ cos θ`.
    pub integral: T,
    /// `∫ |X| |∇Q_g| u^{2n/(n−4)} dμ`.
    pub scale: T,
}

impl<T: Base> KazdanWarner<T> {
    /// `|integral|/scale`, or 0 when `Q_g` is constant.
    pub fn relative(&self) -> T {
        if self.scale > T::zero() {
            self.integral.abs() / self.scale
        } else {
            self.integral.abs()
        }
    }
}

/// The Kazdan–Warner integral for the conformal field generating the zonal
/// dilations. `⟨∇cos θ, ∇Q⟩ = (1 − x²) Q′(x)`, with `Q′` obtained by exact
/// differentiation of `P u` and `u`.
pub fn kazdan_warner_integral<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>) -> Result<KazdanWarner<T>> {
    positive_nodal(b, u)?;
    let pu = paneitz_apply_sphere(u);
    let n = u.n as i64;
    let p = T::int(n + 4) / T::int(n - 4);
    let k = T::int(2) / T::int(n - 4);
    let crit = T::int(2 * n) / T::int(n - 4);
    let rec = &b.recurrence;
    let rec_owned;
    let rec = if u.coeffs.len() < rec.a.len() {
        rec
    } else {
        rec_owned = super::basis::ZonalRecurrence::new(u.n, u.coeffs.len() + 1);
        &rec_owned
    };
    let (mut integral, mut scale) = (T::zero(), T::zero());
    for (&x, &w) in b.nodes.iter().zip(&b.weights) {
        let xd = Dual::var(x);
        let uv: Dual<T> = rec.eval(&u.coeffs, xd);
        let pv: Dual<T> = rec.eval(&pu.coeffs, xd);
        let dq = k * (pv.eps / uv.re.powf(p) - p * pv.re * uv.eps / uv.re.powf(p + T::one()));
        let g = (T::one() - x * x) * dq * uv.re.powf(crit) * w;
        integral = integral + g;
        scale = scale + g.abs();
    }
    Ok(KazdanWarner { integral, scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sphere_volume;

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(paneitz_eigenvalue::<f64>(8, 0), 120.0);
        assert_eq!(paneitz_eigenvalue::<f64>(8, 1), 360.0);
        assert_eq!(paneitz_eigenvalue_factored::<f64>(8, 1), 360.0);
        for n in 5..13 {
            for k in 0..50 {
                assert!(paneitz_eigenvalue::<f64>(n, k) > 0.0);
            }
        }
    }

    #[test]
    fn factorization_is_exact() {
        for n in 5..=12 {
            for k in 0..=200 {
                let (a, b) = paneitz_eigenvalue_x16(n, k);
                assert_eq!(a, b, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn constant_field() {
        let n = 8;
        let c = ZonalField::constant(n, 6, 3.0);
        let pc = paneitz_apply_sphere(&c);
        let b = ZonalBasis::<f64>::new(n, 6, 24).unwrap();
        assert!((b.eval(&pc, 0.2) - 360.0).abs() < 1e-11);
        let q = q_curvature_of_conformal(&b, &ZonalField::constant(n, 6, 1.0)).unwrap();
        assert!((b.eval(&q.field, -0.4) - 60.0).abs() < 1e-11);
        let kw = kazdan_warner_integral(&b, &c).unwrap();
        assert_eq!(kw.integral, 0.0);
        assert_eq!(kw.relative(), 0.0);
    }

    #[test]
    fn inverse_round_trip() {
        let u = ZonalField::new(9, (0..20).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect()).unwrap();
        let r = paneitz_inverse(&paneitz_apply_sphere(&u));
        let err = r.coeffs.iter().zip(&u.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-12);
    }

    #[test]
    fn powers() {
        let n = 6;
        let b = ZonalBasis::<f64>::with_oversampling(n, 16).unwrap();
        let c = ZonalField::constant(n, 16, 1.5);
        let sq = nonlinear_power(&b, &c, 2.0).unwrap();
        assert!((b.eval(&sq.field, 0.7) - 2.25).abs() < 1e-13);
        let u = ZonalField::constant(n, 16, 1.0).axpy(0.1, &ZonalField::harmonic(n, 16, 2));
        let id = nonlinear_power(&b, &u, 1.0).unwrap();
        for (a, c) in id.field.coeffs.iter().zip(&u.coeffs) {
            assert!((a - c).abs() < 1e-13);
        }
        // projection preserves the mean
        let p = 2.0 * n as f64 / (n as f64 - 4.0) + 0.3;
        let up = nonlinear_power(&b, &u, p).unwrap();
        let mean = up.field.coeffs[0] * sphere_volume::<f64>(n).sqrt();
        let direct = b.integrate(&b.nodal(&u).iter().map(|x| x.powf(p)).collect::<Vec<_>>());
        assert!((mean - direct).abs() < 1e-10 * direct);
        let neg = ZonalField::constant(n, 4, -1.0);
        assert!(matches!(nonlinear_power(&b, &neg, 0.5), Err(Error::NonPositiveField { .. })));
        assert!(nonlinear_power(&b, &neg, 2.0).is_ok());
    }

    #[test]
    fn energy_is_diagonal_quadratic_form() {
        let n = 7;
        let b = ZonalBasis::<f64>::new(n, 10, 40).unwrap();
        let u = ZonalField::new(n, (0..11).map(|k| 1.0 / (2.0 + k as f64)).collect()).unwrap();
        let nodal = b.integrate(
            &b.nodal(&u).iter().zip(b.nodal(&paneitz_apply_sphere(&u))).map(|(a, c)| a * c).collect::<Vec<_>>(),
        );
        assert!((nodal - energy(&u)).abs() < 1e-10 * nodal);
    }

    #[test]
    fn q_round_trip() {
        let n = 6;
        let b = ZonalBasis::<f64>::with_oversampling(n, 32).unwrap();
        let u = ZonalField::constant(n, 32, 1.0).axpy(0.1, &ZonalField::harmonic(n, 32, 2));
        let q = q_curvature_nodal(&b, &u).unwrap();
        let spread = q.iter().cloned().fold(f64::MIN, f64::max) - q.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 1.0);
        let v = b.nodal(&u);
        let pu = b.nodal(&paneitz_apply_sphere(&u));
        let p = (n as f64 + 4.0) / (n as f64 - 4.0);
        for j in 0..b.len() {
            let back = (n as f64 - 4.0) / 2.0 * q[j] * v[j].powf(p);
            assert!((back - pu[j]).abs() <= 1e-10 * pu[j].abs());
        }
    }

    #[test]
    fn kazdan_warner_vanishes() {
        let n = 5;
        let b = ZonalBasis::<f64>::with_oversampling(n, 64).unwrap();
        let u = ZonalField::constant(n, 64, 1.0)
            .axpy(0.05, &ZonalField::harmonic(n, 64, 2))
            .axpy(0.02, &ZonalField::harmonic(n, 64, 3));
        let kw = kazdan_warner_integral(&b, &u).unwrap();
        assert!(kw.scale > 0.0);
        assert!(kw.relative() <= 1e-6, "{kw:?}");
    }
}
