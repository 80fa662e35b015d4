//! Derivatives of point functions and metric jets, either exact (nested
//! dual numbers) or by second-order central differences.

use crate::curvature::chart::{DerivativeMode, MetricField, ScalarField};
use crate::dual::Dual;
use crate::error::Result;
use crate::linalg::Mat;
use crate::scalar::{Base, Lift, Real};

/// A possibly failing scalar function of a chart point, evaluable on any
/// scalar that embeds `T`.
pub trait PointFn<T: Base> {
    fn eval<S: Lift<T>>(&self, x: &[S]) -> Result<S>;
}

/// Vector-valued analogue of [`PointFn`].
pub trait VectorFn<T: Base> {
    fn eval<S: Lift<T>>(&self, x: &[S]) -> Result<Vec<S>>;
}

/// Adapts a [`ScalarField`] to [`PointFn`].
pub struct FieldFn<'a, U>(pub &'a U);

impl<T: Base, U: ScalarField<T>> PointFn<T> for FieldFn<'_, U> {
    fn eval<S: Lift<T>>(&self, x: &[S]) -> Result<S> {
        Ok(self.0.value(x))
    }
}

fn fd_scale<S: Real>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |m, c| m.max(c.abs()))
}

/// `(f, D_v f, D_v² f)` at `x`.
pub fn along<T: Base, S: Lift<T>, F: PointFn<T>>(
    f: &F,
    x: &[S],
    v: &[S],
    mode: DerivativeMode<T>,
) -> Result<(S, S, S)> {
    match mode {
        DerivativeMode::Analytic => {
            let y: Vec<Dual<Dual<S>>> = x
                .iter()
                .zip(v)
                .map(|(&xi, &vi)| Dual::new(Dual::new(xi, vi), Dual::new(vi, S::zero())))
                .collect();
            let r = f.eval(&y)?;
            Ok((r.re.re, r.re.eps, r.eps.eps))
        }
        DerivativeMode::FiniteDifference { h_high, .. } => {
            let f0 = f.eval(x)?;
            let m = fd_scale(v);
            if m == S::zero() {
                return Ok((f0, S::zero(), S::zero()));
            }
            let t = S::lift(h_high) / m;
            let yp: Vec<S> = x.iter().zip(v).map(|(&a, &b)| a + t * b).collect();
            let ym: Vec<S> = x.iter().zip(v).map(|(&a, &b)| a - t * b).collect();
            let (fp, fm) = (f.eval(&yp)?, f.eval(&ym)?);
            Ok((f0, (fp - fm) / (t + t), (fp - f0 - f0 + fm) / (t * t)))
        }
    }
}

/// Derivative of every component of `f` along the coordinate axis `k`.
pub fn partial_vec<T: Base, S: Lift<T>, F: VectorFn<T>>(
    f: &F,
    x: &[S],
    k: usize,
    mode: DerivativeMode<T>,
) -> Result<Vec<S>> {
    match mode {
        DerivativeMode::Analytic => {
            let y: Vec<Dual<S>> = x
                .iter()
                .enumerate()
                .map(|(i, &xi)| Dual::new(xi, if i == k { S::one() } else { S::zero() }))
                .collect();
            Ok(f.eval(&y)?.into_iter().map(|d| d.eps).collect())
        }
        DerivativeMode::FiniteDifference { h_high, .. } => {
            let h = S::lift(h_high);
            let mut yp = x.to_vec();
            let mut ym = x.to_vec();
            yp[k] = yp[k] + h;
            ym[k] = ym[k] - h;
            let (fp, fm) = (f.eval(&yp)?, f.eval(&ym)?);
            Ok(fp.iter().zip(&fm).map(|(&p, &m)| (p - m) / (h + h)).collect())
        }
    }
}

/// Value and coordinate gradient of a scalar function.
pub fn gradient<T: Base, S: Lift<T>, F: PointFn<T>>(
    f: &F,
    x: &[S],
    mode: DerivativeMode<T>,
) -> Result<(S, Vec<S>)> {
    let n = x.len();
    match mode {
        DerivativeMode::Analytic => {
            let mut val = S::zero();
            let mut g = Vec::with_capacity(n);
            for k in 0..n {
                let y: Vec<Dual<S>> = x
                    .iter()
                    .enumerate()
                    .map(|(i, &xi)| Dual::new(xi, if i == k { S::one() } else { S::zero() }))
                    .collect();
                let r = f.eval(&y)?;
                val = r.re;
                g.push(r.eps);
            }
            if n == 0 {
                val = f.eval(x)?;
            }
            Ok((val, g))
        }
        DerivativeMode::FiniteDifference { h, .. } => {
            let h = S::lift(h);
            let val = f.eval(x)?;
            let mut g = Vec::with_capacity(n);
            for k in 0..n {
                let mut yp = x.to_vec();
                let mut ym = x.to_vec();
                yp[k] = yp[k] + h;
                ym[k] = ym[k] - h;
                g.push((f.eval(&yp)? - f.eval(&ym)?) / (h + h));
            }
            Ok((val, g))
        }
    }
}

/// Metric with first and (optionally) second coordinate derivatives.
#[derive(Clone, Debug)]
pub struct MetricJet<S> {
    pub g: Mat<S>,
    /// `dg[k] = ∂_k g`.
    pub dg: Vec<Mat<S>>,
    /// `ddg[k·n + l] = ∂_k ∂_l g`; empty for a first-order jet.
    pub ddg: Vec<Mat<S>>,
}

impl<S: Real> MetricJet<S> {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `∂_k ∂_l g_ij`.
    #[inline]
    pub fn d2(&self, k: usize, l: usize, i: usize, j: usize) -> S {
        self.ddg[k * self.dim() + l][(i, j)]
    }
}

fn combine<S: Real>(a: &Mat<S>, b: &Mat<S>, f: impl Fn(S, S) -> S) -> Mat<S> {
    Mat::from_fn(a.dim(), |i, j| f(a[(i, j)], b[(i, j)]))
}

fn shifted<S: Real>(x: &[S], moves: &[(usize, S)]) -> Vec<S> {
    let mut y = x.to_vec();
    for &(k, d) in moves {
        y[k] = y[k] + d;
    }
    y
}

/// Metric and its first derivatives at `x`.
pub fn metric_jet1<T: Base, S: Lift<T>, M: MetricField<T>>(m: &M, x: &[S], mode: DerivativeMode<T>) -> MetricJet<S> {
    let n = x.len();
    match mode {
        DerivativeMode::Analytic => {
            let mut g = Mat::zeros(n);
            let mut dg = Vec::with_capacity(n);
            for k in 0..n {
                let y: Vec<Dual<S>> = x
                    .iter()
                    .enumerate()
                    .map(|(i, &xi)| Dual::new(xi, if i == k { S::one() } else { S::zero() }))
                    .collect();
                let gm = m.metric(&y);
                g = gm.map(|d| d.re);
                dg.push(gm.map(|d| d.eps));
            }
            if n == 0 {
                g = m.metric(x);
            }
            MetricJet { g, dg, ddg: Vec::new() }
        }
        DerivativeMode::FiniteDifference { h, .. } => {
            let h = S::lift(h);
            let g = m.metric(x);
            let dg = (0..n)
                .map(|k| {
                    let gp = m.metric(&shifted(x, &[(k, h)]));
                    let gm = m.metric(&shifted(x, &[(k, -h)]));
                    combine(&gp, &gm, |p, q| (p - q) / (h + h))
                })
                .collect();
            MetricJet { g, dg, ddg: Vec::new() }
        }
    }
}

/// Metric with first and second derivatives at `x`.
pub fn metric_jet2<T: Base, S: Lift<T>, M: MetricField<T>>(m: &M, x: &[S], mode: DerivativeMode<T>) -> MetricJet<S> {
    let n = x.len();
    let mut ddg = vec![Mat::zeros(n); n * n];
    match mode {
        DerivativeMode::Analytic => {
            let mut g = Mat::zeros(n);
            let mut dg = vec![Mat::zeros(n); n];
            for a in 0..n {
                for b in a..n {
                    let y: Vec<Dual<Dual<S>>> = x
                        .iter()
                        .enumerate()
                        .map(|(i, &xi)| {
                            let eb = if i == b { S::one() } else { S::zero() };
                            let ea = if i == a { S::one() } else { S::zero() };
                            Dual::new(Dual::new(xi, eb), Dual::new(ea, S::zero()))
                        })
                        .collect();
                    let gm = m.metric(&y);
                    if a == b {
                        g = gm.map(|d| d.re.re);
                        dg[a] = gm.map(|d| d.eps.re);
                    }
                    let h = gm.map(|d| d.eps.eps);
                    ddg[b * n + a] = h.clone();
                    ddg[a * n + b] = h;
                }
            }
            if n == 0 {
                g = m.metric(x);
            }
            MetricJet { g, dg, ddg }
        }
        DerivativeMode::FiniteDifference { h, .. } => {
            let mut jet = metric_jet1(m, x, mode);
            let h = S::lift(h);
            let g0 = &jet.g;
            for a in 0..n {
                let gp = m.metric(&shifted(x, &[(a, h)]));
                let gm = m.metric(&shifted(x, &[(a, -h)]));
                ddg[a * n + a] = Mat::from_fn(n, |i, j| (gp[(i, j)] - g0[(i, j)] - g0[(i, j)] + gm[(i, j)]) / (h * h));
                for b in a + 1..n {
                    let pp = m.metric(&shifted(x, &[(a, h), (b, h)]));
                    let pm = m.metric(&shifted(x, &[(a, h), (b, -h)]));
                    let mp = m.metric(&shifted(x, &[(a, -h), (b, h)]));
                    let mm = m.metric(&shifted(x, &[(a, -h), (b, -h)]));
                    let d = Mat::from_fn(n, |i, j| {
                        (pp[(i, j)] - pm[(i, j)] - mp[(i, j)] + mm[(i, j)]) / (S::int(4) * h * h)
                    });
                    ddg[b * n + a] = d.clone();
                    ddg[a * n + b] = d;
                }
            }
            jet.ddg = ddg;
            jet
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::chart::{Chart, CoordBox};
    use crate::curvature::field::Affine;

    struct Cubic;
    impl PointFn<f64> for Cubic {
        fn eval<S: Lift<f64>>(&self, x: &[S]) -> Result<S> {
            Ok(x[0] * x[0] * x[1] + x[1].sin())
        }
    }

    #[test]
    fn along_exact_and_fd_agree() {
        let x = [0.3, -0.2];
        let v = [0.5, 1.5];
        let (f, d1, d2) = along(&Cubic, &x, &v, DerivativeMode::Analytic).unwrap();
        // D_v f = 2 x0 x1 v0 + (x0² + cos x1) v1, D_v² f = 2 x1 v0² + 4 x0 v0 v1 − sin x1 v1²
        let e1 = 2.0 * x[0] * x[1] * v[0] + (x[0] * x[0] + x[1].cos()) * v[1];
        let e2 = 2.0 * x[1] * v[0] * v[0] + 4.0 * x[0] * v[0] * v[1] - x[1].sin() * v[1] * v[1];
        assert!((f - (0.09 * -0.2 + (-0.2_f64).sin())).abs() < 1e-15);
        assert!((d1 - e1).abs() < 1e-14);
        assert!((d2 - e2).abs() < 1e-14);
        let fd = DerivativeMode::FiniteDifference { h: 1e-4, h_high: 1e-4 };
        let (_, g1, g2) = along(&Cubic, &x, &v, fd).unwrap();
        assert!((g1 - e1).abs() < 1e-7);
        assert!((g2 - e2).abs() < 1e-5);
    }

    #[test]
    fn gradient_of_affine_field() {
        let a = Affine { c0: 1.0, coeffs: vec![0.5, -2.0, 3.0] };
        let (v, g) = gradient(&FieldFn(&a), &[1.0, 1.0, 1.0], DerivativeMode::Analytic).unwrap();
        assert_eq!(v, 2.5);
        assert_eq!(g, vec![0.5, -2.0, 3.0]);
    }

    #[test]
    fn metric_jets_of_sphere_chart() {
        let c = Chart::StereographicSphere { n: 3, radius: 1.0, domain: CoordBox::cube(3, 1.0) };
        let x = [0.2, -0.1, 0.3];
        let j = metric_jet2(&c, &x, DerivativeMode::Analytic);
        // g = 4/(1+s)² δ, s = |x|²: ∂_k g = −16 x_k/(1+s)³, ∂_k∂_l = 96 x_k x_l/(1+s)⁴ − 16 δ_kl/(1+s)³
        let s: f64 = x.iter().map(|v| v * v).sum();
        for k in 0..3 {
            assert!((j.dg[k][(1, 1)] + 16.0 * x[k] / (1.0 + s).powi(3)).abs() < 1e-14);
            for l in 0..3 {
                let d = if k == l { 1.0 } else { 0.0 };
                let e = 96.0 * x[k] * x[l] / (1.0 + s).powi(4) - 16.0 * d / (1.0 + s).powi(3);
                assert!((j.d2(k, l, 2, 2) - e).abs() < 1e-13);
                assert_eq!(j.d2(k, l, 0, 1), 0.0);
            }
        }
        let fd = metric_jet2(&c, &x, DerivativeMode::FiniteDifference { h: 1e-4, h_high: 1e-3 });
        for k in 0..3 {
            for l in 0..3 {
                assert!((fd.d2(k, l, 0, 0) - j.d2(k, l, 0, 0)).abs() < 1e-6);
            }
            assert!((fd.dg[k][(0, 0)] - j.dg[k][(0, 0)]).abs() < 1e-7);
        }
    }
}
