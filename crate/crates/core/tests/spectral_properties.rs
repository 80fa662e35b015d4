use paneitz_core::curvature::{paneitz_apply, Chart, ChartMetric};
use paneitz_core::special::sphere_volume;
use paneitz_core::spectral::{
    companion, critical_integral, energy, kazdan_warner_integral, paneitz_apply_sphere, positive_nodal, MoebiusMap,
    ZonalBasis, ZonalChartField, ZonalField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Positive zonal field with coefficients decaying like `rho^k`.
fn random_positive(b: &ZonalBasis<f64>, rng: &mut ChaCha8Rng, rho: f64) -> ZonalField<f64> {
    let (n, k) = (b.n, b.k_max);
    let mut coeffs: Vec<f64> = (0..=k).map(|j| rng.gen_range(-1.0..1.0) * rho.powi(j as i32)).collect();
    coeffs[0] = 0.0;
    let mut u = ZonalField::new(n, coeffs).unwrap();
    let lo = b.nodal(&u).into_iter().fold(f64::INFINITY, f64::min);
    let shift = (0.2 - lo).max(0.0) + rng.gen_range(0.0..1.0);
    u.coeffs[0] = shift * sphere_volume::<f64>(n).sqrt();
    positive_nodal(b, &u).unwrap();
    u
}

#[test]
fn kazdan_warner_vanishes_for_random_fields() {
    let b = ZonalBasis::with_oversampling(5, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..10 {
        let u = random_positive(&b, &mut rng, 0.5);
        let kw = kazdan_warner_integral(&b, &u).unwrap();
        assert!(kw.scale > 0.0);
        assert!(kw.relative() <= 1e-6, "field {i}: {kw:?}");
    }
}

#[test]
fn companion_preserves_energy_and_volume() {
    let n = 8;
    let b = ZonalBasis::with_oversampling(n, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..10 {
        let u = random_positive(&b, &mut rng, 0.4);
        let (e, c) = (energy(&u), critical_integral(&b, &u).unwrap());
        for l in [0.25, 0.5, 2.0, 4.0] {
            let v = companion(&b, &u, &MoebiusMap::new(n, l).unwrap());
            assert!(!v.truncation_dominated(), "field {i} λ={l}: tail {}", v.relative_tail());
            assert!((energy(&v.field) - e).abs() <= 1e-6 * e, "field {i} λ={l}");
            assert!((critical_integral(&b, &v.field).unwrap() - c).abs() <= 1e-6 * c, "field {i} λ={l}");
        }
    }
}

#[test]
fn companion_tail_shrinks_with_degree() {
    let n = 6;
    let u = ZonalField::constant(n, 8, 1.0).axpy(0.3, &ZonalField::harmonic(n, 8, 2));
    let phi = MoebiusMap::new(n, 2.0).unwrap();
    let tail = |k: usize| {
        let b = ZonalBasis::with_oversampling(n, k).unwrap();
        companion(&b, &u.resized(k), &phi).relative_tail()
    };
    let (t8, t16) = (tail(8), tail(16));
    assert!(t8 > 0.0);
    assert!(t16 * 10.0 <= t8, "{t8:e} -> {t16:e}");
}

#[test]
fn diagonal_operator_matches_chart_operator() {
    let n = 6;
    let k = 8;
    let u = ZonalField::constant(n, k, 1.0).axpy(0.1, &ZonalField::harmonic(n, k, 2));
    let pu = paneitz_apply_sphere(&u);
    let b = ZonalBasis::with_oversampling(n, k).unwrap();
    let cm = ChartMetric::analytic(Chart::sphere(n as usize, 2.0));
    let field = ZonalChartField::new(u);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.9..0.9)).collect();
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let x = (1.0 - r2) / (1.0 + r2);
        let chart = paneitz_apply(&cm, &field, &y).unwrap();
        let spectral = b.eval(&pu, x);
        assert!((chart - spectral).abs() <= 1e-5 * spectral.abs(), "{chart} vs {spectral} at x={x}");
    }
}

#[test]
fn quadratic_form_is_symmetric() {
    let n = 7;
    let b = ZonalBasis::with_oversampling(n, 24).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let u = random_positive(&b, &mut rng, 0.6);
        let v = random_positive(&b, &mut rng, 0.6);
        let pair = |a: &ZonalField<f64>, c: &ZonalField<f64>| {
            let (x, y) = (b.nodal(a), b.nodal(&paneitz_apply_sphere(c)));
            b.integrate(&x.iter().zip(&y).map(|(p, q)| p * q).collect::<Vec<_>>())
        };
        let (uv, vu) = (pair(&u, &v), pair(&v, &u));
        assert!((uv - vu).abs() <= 1e-12 * uv.abs().max(vu.abs()), "{uv} vs {vu}");
    }
}
