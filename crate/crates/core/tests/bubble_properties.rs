use paneitz_core::bubble::{
    gap_certificate, lemma31, lemma31_closed_form, lemma31_quadrature, q_sphere, radial_integrals, scaling_fit,
    successive_log_slopes, weyl_coefficient, BubbleParams, CutoffProfile, FitModel, Regime,
};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn params(n: u32, alpha: f64, eps: f64) -> BubbleParams<f64> {
    BubbleParams::new(n, alpha, eps, CutoffProfile::QuinticSmoothstep).unwrap()
}

#[test]
fn closed_form_matches_quadrature_on_grid() {
    for n in 8..=14 {
        for eps in [0.1, 0.5, 1.0] {
            for alpha in [1e-2, 1e-3] {
                let q: f64 = lemma31_quadrature(n, eps, alpha, TOL).unwrap();
                let c = lemma31_closed_form(n, eps, alpha, TOL).unwrap();
                assert!((q - c).abs() <= 1e-8 * q.abs().max(1.0), "n={n} eps={eps} alpha={alpha}: {q} vs {c}");
            }
        }
    }
}

#[test]
fn regimes_at_eight_and_ten() {
    let alphas = [1e-2_f64, 1e-3, 1e-4];
    let ten: Vec<_> = alphas.iter().map(|&a| lemma31(10, 1.0, a, TOL).unwrap()).collect();
    for r in &ten {
        assert_eq!(r.regime, Regime::ConstantLimit);
        assert!(r.value < 0.0);
    }
    for w in ten.windows(2) {
        assert!((w[0].value - w[1].value).abs() < 0.01 * w[1].value.abs());
    }
    let eight: Vec<_> = alphas.iter().map(|&a| lemma31(8, 1.0, a, TOL).unwrap()).collect();
    for r in &eight {
        assert_eq!(r.regime, Regime::LogDivergent);
        assert!(r.fitted_constant > 0.0);
    }
    // the constant term cancels in successive differences
    let slopes = successive_log_slopes(&eight);
    assert!((slopes[0] - slopes[1]).abs() < 1e-3 * slopes[1].abs(), "{slopes:?}");
}

#[test]
fn weyl_coefficient_is_negative_and_routes_agree() {
    for n in 8..=12 {
        for alpha in [1e-2, 1e-3] {
            let w = weyl_coefficient(&params(n, alpha, 0.5), TOL).unwrap();
            assert!(w.direct < 0.0);
            assert!(w.relative_gap() < 1e-9, "n={n} alpha={alpha}");
        }
    }
}

#[test]
fn tails_scale_with_expected_exponents() {
    for n in [8u32, 10] {
        let alphas = [1e-2, 1e-3, 1e-4];
        let rows: Vec<_> = alphas.iter().map(|&a| radial_integrals(&params(n, a, 0.5), TOL).unwrap()).collect();
        let series = |f: &dyn Fn(usize) -> f64| -> Vec<(f64, f64)> { (0..3).map(|i| (alphas[i], f(i))).collect() };
        let annulus = scaling_fit(&series(&|i| rows[i].annulus_mass), FitModel::PurePower).unwrap();
        let crit = scaling_fit(&series(&|i| rows[i].crit_tail), FitModel::PurePower).unwrap();
        let biharm = scaling_fit(&series(&|i| rows[i].biharm_tail), FitModel::PurePower).unwrap();
        assert!((annulus.exponent - (n - 4) as f64).abs() < 0.05, "n={n}: {}", annulus.exponent);
        assert!((biharm.exponent - (n - 4) as f64).abs() < 0.05, "n={n}: {}", biharm.exponent);
        assert!((crit.exponent - n as f64).abs() < 0.05, "n={n}: {}", crit.exponent);
    }
}

#[test]
fn critical_integral_is_scale_invariant() {
    for n in [5u32, 8, 10] {
        let a = radial_integrals(&params(n, 1.0, 0.5), TOL).unwrap();
        for alpha in [1e-1, 1e-2] {
            let b = radial_integrals(&params(n, alpha, 0.5), TOL).unwrap();
            assert!((a.i_crit - b.i_crit).abs() < 1e-9 * a.i_crit);
            assert!((a.i_biharm - b.i_biharm).abs() < 1e-9 * a.i_biharm);
            let ratio = b.i_biharm / b.i_crit.powf((n as f64 - 4.0) / n as f64);
            let q = q_sphere::<f64>(n);
            assert!((ratio - q).abs() < 1e-9 * q);
        }
    }
}

#[test]
fn remainders_outpace_the_deficit_at_nine() {
    let alphas = [1e-2_f64, 3e-3, 1e-3, 3e-4];
    let rep = gap_certificate(9, &alphas, 0.5, 1.0, CutoffProfile::QuinticSmoothstep, TOL).unwrap();
    let deficit = rep.deficit_power_fit.unwrap();
    let remainder = rep.remainder_fit.unwrap();
    assert!(deficit.constant < 0.0);
    assert!((deficit.exponent - 4.0).abs() < 0.05, "{}", deficit.exponent);
    assert!(remainder.exponent - deficit.exponent >= 0.8, "{} vs {}", remainder.exponent, deficit.exponent);
}

#[test]
fn deficit_takes_logarithmic_form_at_eight() {
    let alphas = [1e-3_f64, 1e-4, 1e-5, 1e-6];
    let rep = gap_certificate(8, &alphas, 1.0, 1.0, CutoffProfile::QuinticSmoothstep, TOL).unwrap();
    let pure = rep.deficit_power_fit.unwrap();
    let log = rep.deficit_log_fit.unwrap();
    assert!(pure.residual >= 10.0 * log.residual, "{} vs {}", pure.residual, log.residual);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_tracks_quadrature(n in 8u32..13, eps in 0.05f64..1.0, la in -4.0f64..-1.0) {
        let alpha = 10f64.powf(la);
        let q = lemma31_quadrature(n, eps, alpha, TOL).unwrap();
        let c = lemma31_closed_form(n, eps, alpha, TOL).unwrap();
        prop_assert!((q - c).abs() <= 1e-8 * q.abs().max(1.0));
    }

    #[test]
    fn bound_decreases_with_weyl_weight(w2 in 0.0f64..5.0) {
        let a = gap_certificate(10, &[1e-2], 0.5, w2, CutoffProfile::QuinticSmoothstep, 1e-10).unwrap();
        let b = gap_certificate(10, &[1e-2], 0.5, w2 + 1.0, CutoffProfile::QuinticSmoothstep, 1e-10).unwrap();
        prop_assert!(b.rows[0].log_ratio < a.rows[0].log_ratio);
    }
}
