//! Sphere volumes and related elementary constants.

use crate::scalar::Real;

/// Volume of the unit sphere `Sᵏ ⊂ ℝᵏ⁺¹`, i.e. `2π^{(k+1)/2}/Γ((k+1)/2)`.
///
/// Evaluated by the recurrence `ω_k = 2π ω_{k−2}/(k−1)` from `ω₀ = 2`, `ω₁ = 2π`.
pub fn sphere_volume<T: Real>(k: u32) -> T {
    let two_pi = T::lit(std::f64::consts::TAU);
    let (mut w, mut j) = if k.is_multiple_of(2) { (T::int(2), 0) } else { (two_pi, 1) };
    while j < k {
        j += 2;
        w = w * two_pi / T::int(j as i64 - 1);
    }
    w
}

/// `∫_{-1}^{1} (1 − x²)^{λ − 1/2} dx` for half-integer `λ = two_lambda/2`.
pub fn gegenbauer_mass<T: Real>(two_lambda: u32) -> T {
    // λ = 0: π,  λ = 1/2: 2;  μ(λ + 1) = μ(λ)(2λ + 1)/(2λ + 2)
    let (mut m, mut tl) = if two_lambda.is_multiple_of(2) {
        (T::lit(std::f64::consts::PI), 0)
    } else {
        (T::int(2), 1)
    };
    while tl < two_lambda {
        m = m * T::int(tl as i64 + 1) / T::int(tl as i64 + 2);
        tl += 2;
    }
    m
}

/// `2^k` for small non-negative `k`.
pub fn pow2<T: Real>(k: i32) -> T {
    T::int(2).powi(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_dimensional_sphere_volumes() {
        let pi = std::f64::consts::PI;
        assert!((sphere_volume::<f64>(1) - 2.0 * pi).abs() < 1e-14);
        assert!((sphere_volume::<f64>(2) - 4.0 * pi).abs() < 1e-14);
        assert!((sphere_volume::<f64>(3) - 2.0 * pi * pi).abs() < 1e-13);
        assert!((sphere_volume::<f64>(4) - 8.0 * pi * pi / 3.0).abs() < 1e-13);
    }

    #[test]
    fn sphere_volume_matches_gamma_formula() {
        for k in 0..20u32 {
            let a = (k as f64 + 1.0) / 2.0;
            let expect = 2.0 * std::f64::consts::PI.powf(a) / statrs::function::gamma::gamma(a);
            let got = sphere_volume::<f64>(k);
            assert!((got - expect).abs() <= 1e-13 * expect, "k = {k}");
        }
    }

    #[test]
    fn gegenbauer_mass_matches_beta_function() {
        for tl in 0..16u32 {
            let l = tl as f64 / 2.0;
            let expect = statrs::function::beta::beta(0.5, l + 0.5);
            let got = gegenbauer_mass::<f64>(tl);
            assert!((got - expect).abs() <= 1e-13 * expect, "2λ = {tl}");
        }
    }

    #[test]
    fn sphere_volume_in_single_precision() {
        let w = sphere_volume::<f32>(8);
        assert!((w as f64 - sphere_volume::<f64>(8)).abs() < 1e-4);
    }
}
