//! One-dimensional quadrature: Gauss rules for symmetric Jacobi weights and an
//! adaptive Gauss–Kronrod integrator.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::gegenbauer_mass;

/// Nodes and weights of a fixed rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule on `[a, b]` (weight function ignored by the mapping).
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let h = (b - a) / T::int(2);
        let c = (a + b) / T::int(2);
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |s, (&x, &w)| s + w * f(c + h * x))
            * h
    }
}

/// Off-diagonal of the Jacobi matrix for the orthonormal Gegenbauer family:
/// `x p_k = a_{k+1} p_{k+1} + a_k p_{k−1}`, entry `k` holds `a_k` (`a_0 = 0`).
pub fn gegenbauer_recurrence<T: Real>(len: usize, two_lambda: u32) -> Vec<T> {
    let l = T::int(two_lambda as i64) / T::int(2);
    let mut a = vec![T::zero(); len];
    for (k, ak) in a.iter_mut().enumerate().skip(1) {
        let kk = T::int(k as i64);
        let num = kk * (kk + l + l - T::one());
        let den = T::int(4) * (kk + l) * (kk + l - T::one());
        *ak = (num / den).sqrt();
    }
    a
}

/// Gauss rule with `m` nodes for the weight `(1 − x²)^{λ − 1/2}`, `λ = two_lambda/2 ≥ 1/2`.
///
/// Nodes are the eigenvalues of the Jacobi matrix, isolated by Sturm-count
/// bisection and polished with Newton steps; weights follow from the
/// Christoffel function `1/Σ p_k(x)²`.
pub fn gauss_gegenbauer<T: Real>(m: usize, two_lambda: u32) -> Result<Rule<T>> {
    if m == 0 {
        return Err(Error::EmptyGrid);
    }
    if two_lambda == 0 {
        return Err(Error::InvalidParameter("Gegenbauer rule needs λ ≥ 1/2".into()));
    }
    let a = gegenbauer_recurrence::<T>(m + 1, two_lambda);
    let p0 = gegenbauer_mass::<T>(two_lambda).sqrt().recip();

    let count_below = |x: T| -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut d = -x;
        let mut c = usize::from(d < T::zero());
        for ak in a.iter().take(m).skip(1) {
            if d == T::zero() {
                d = tiny;
            }
            d = -x - *ak * *ak / d;
            if d < T::zero() {
                c += 1;
            }
        }
        c
    };

    // orthonormal p_m and p_m' at x, plus Σ_{k<m} p_k²
    let eval = |x: T| -> (T, T, T) {
        let (mut pm1, mut p) = (T::zero(), p0);
        let (mut dm1, mut d) = (T::zero(), T::zero());
        let mut s = p * p;
        for k in 0..m {
            let pn = (x * p - a[k] * pm1) / a[k + 1];
            let dn = (p + x * d - a[k] * dm1) / a[k + 1];
            pm1 = p;
            p = pn;
            dm1 = d;
            d = dn;
            if k + 1 < m {
                s = s + p * p;
            }
        }
        (p, d, s)
    };

    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        let (mut lo, mut hi) = (-T::one(), T::one());
        for _ in 0..200 {
            let mid = (lo + hi) / T::int(2);
            if mid <= lo || mid >= hi {
                break;
            }
            if count_below(mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut x = (lo + hi) / T::int(2);
        for _ in 0..2 {
            let (p, d, _) = eval(x);
            if d != T::zero() {
                let nx = x - p / d;
                if nx > lo - (hi - lo) && nx < hi + (hi - lo) {
                    x = nx;
                }
            }
        }
        let (_, _, s) = eval(x);
        nodes.push(x);
        weights.push(s.recip());
    }
    Ok(Rule { nodes, weights })
}

/// Gauss–Legendre rule with `m` nodes on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(m: usize) -> Result<Rule<T>> {
    gauss_gegenbauer(m, 1)
}

const XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances and budget for [`adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOpts {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 4000 }
    }
}

impl AdaptiveOpts {
    pub fn rel(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

fn gk15<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T) -> (T, T) {
    let c = (a + b) / T::int(2);
    let h = (b - a) / T::int(2);
    let fc = f(c);
    let mut k = fc * T::lit(WK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(XK[j]);
        let s = f(c - dx) + f(c + dx);
        k = k + s * T::lit(WK[j]);
        if j % 2 == 1 {
            g = g + s * T::lit(WG[j / 2]);
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive G7–K15 quadrature of `f` over `[a, b]`, starting from the
/// given interior break points. Subdivision always bisects the interval with
/// the largest error estimate, so the result is deterministic.
pub fn adaptive<T: Real>(
    mut f: impl FnMut(T) -> T,
    a: T,
    b: T,
    breaks: &[T],
    opts: AdaptiveOpts,
) -> Result<Estimate<T>> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    let mut ivs: Vec<(T, T, T, T)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&mut f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let value = ivs.iter().fold(T::zero(), |s, iv| s + iv.2);
        let error = ivs.iter().fold(T::zero(), |s, iv| s + iv.3);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonFinite("quadrature integrand"));
        }
        let target = T::lit(opts.rel_tol) * value.abs();
        let target = target.max(T::lit(opts.abs_tol));
        if error <= target || error <= T::epsilon() * T::int(50) * value.abs() {
            return Ok(Estimate { value, error, intervals: ivs.len() });
        }
        if ivs.len() >= opts.max_intervals {
            return Err(Error::QuadratureBudget {
                tol: opts.rel_tol,
                intervals: ivs.len(),
                estimate: error.re_f64(),
            });
        }
        let (worst, _) = ivs
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |(bi, be), (i, iv)| if iv.3 > be { (i, iv.3) } else { (bi, be) });
        let (lo, hi, _, _) = ivs[worst];
        let mid = (lo + hi) / T::int(2);
        if !(mid > lo && mid < hi) {
            // cannot split further; accept what we have
            return Ok(Estimate { value, error, intervals: ivs.len() });
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        ivs[worst] = (lo, mid, v1, e1);
        ivs.push((mid, hi, v2, e2));
    }
}

/// `∫_a^b f(r) dr` (with `b = None` meaning `+∞`) through the substitution
/// `r = s·tan θ`, which resolves features at scale `s` and maps infinity to `π/2`.
pub fn radial<T: Real>(
    mut f: impl FnMut(T) -> T,
    a: T,
    b: Option<T>,
    scale: T,
    breaks: &[T],
    opts: AdaptiveOpts,
) -> Result<Estimate<T>> {
    if !(scale > T::zero()) {
        return Err(Error::InvalidParameter("radial quadrature scale must be positive".into()));
    }
    let half_pi = T::lit(std::f64::consts::FRAC_PI_2);
    let ta = (a / scale).atan();
    let tb = b.map_or(half_pi, |b| (b / scale).atan());
    let tbreaks: Vec<T> = breaks.iter().map(|&r| (r / scale).atan()).collect();
    adaptive(
        |th| {
            if th >= half_pi {
                return T::zero();
            }
            let t = th.tan();
            let r = scale * t;
            let v = f(r);
            if v == T::zero() {
                v
            } else {
                v * scale * (T::one() + t * t)
            }
        },
        ta,
        tb,
        &tbreaks,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre::<f64>(6).unwrap();
        for p in 0..12 {
            let got = r.integrate(-1.0, 1.0, |x| x.powi(p));
            let expect = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((got - expect).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn known_legendre_nodes() {
        let r = gauss_legendre::<f64>(3).unwrap();
        let x = (0.6_f64).sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15);
        assert!(r.nodes[1].abs() < 1e-15);
        assert!((r.weights[0] - 5.0 / 9.0).abs() < 1e-15);
        assert!((r.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gegenbauer_weights_sum_to_mass() {
        for tl in 1..12u32 {
            let r = gauss_gegenbauer::<f64>(40, tl).unwrap();
            let s: f64 = r.weights.iter().sum();
            let m = gegenbauer_mass::<f64>(tl);
            assert!((s - m).abs() < 1e-13 * m, "2λ = {tl}");
        }
    }

    #[test]
    fn gegenbauer_exact_on_weighted_monomials() {
        // ∫ x² (1 − x²)^{λ − 1/2} = μ(λ)/(2(λ + 1))
        let tl = 7;
        let r = gauss_gegenbauer::<f64>(5, tl).unwrap();
        let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
        let l = tl as f64 / 2.0;
        let expect = gegenbauer_mass::<f64>(tl) / (2.0 * (l + 1.0));
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn large_rule_nodes_are_distinct_and_sorted() {
        let r = gauss_gegenbauer::<f64>(512, 9).unwrap();
        assert!(r.nodes.windows(2).all(|w| w[1] > w[0]));
        let s: f64 = r.weights.iter().sum();
        assert!((s - gegenbauer_mass::<f64>(9)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let a = 1e-3_f64;
        let e = adaptive(|x| a / (a * a + x * x), -1.0, 1.0, &[], AdaptiveOpts::rel(1e-12)).unwrap();
        let expect = 2.0 * (1.0 / a).atan();
        assert!((e.value - expect).abs() < 1e-11 * expect);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let opts = AdaptiveOpts { rel_tol: 1e-15, abs_tol: 0.0, max_intervals: 3 };
        let r = adaptive(|x: f64| x.abs().sqrt().recip(), 0.0, 1.0, &[], opts);
        assert!(matches!(r, Err(Error::QuadratureBudget { .. })));
    }

    #[test]
    fn radial_to_infinity() {
        // ∫_0^∞ r³/(1 + r²)^4 dr = 1/12
        let e = radial(|r: f64| r.powi(3) / (1.0 + r * r).powi(4), 0.0, None, 1.0, &[], AdaptiveOpts::rel(1e-13)).unwrap();
        assert!((e.value - 1.0 / 12.0).abs() < 1e-14);
    }
}
