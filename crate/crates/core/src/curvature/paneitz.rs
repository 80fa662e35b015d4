//! Curvature packs, the Paneitz operator and chart energies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::chart::{ChartMetric, ConformalMetric, CoordBox, DerivativeMode, MetricField, ScalarField};
use crate::curvature::diff::{along, gradient, metric_jet1, metric_jet2, partial_vec, FieldFn, PointFn, VectorFn};
use crate::curvature::field::Product;
use crate::curvature::tensors::{
    norm2, q_curvature, ricci, ricci_from_riemann, riemann, schouten, trace, weyl, Connection, Tensor4,
};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::quadrature::{gauss_gegenbauer, gauss_legendre};
use crate::scalar::{Base, Lift, Real};

fn not_pd<S: Real>(x: &[S]) -> Error {
    Error::NotPositiveDefinite(x.iter().map(|v| v.re_f64()).collect())
}

/// Christoffel symbols `Γ^k_ij` at `x`.
pub fn christoffel<T: Base, M: MetricField<T>>(cm: &ChartMetric<T, M>, x: &[T]) -> Result<Connection<T>> {
    cm.check_point(x)?;
    let jet = metric_jet1(&cm.field, x, cm.mode);
    Connection::new(&jet).ok_or_else(|| not_pd(x))
}

/// Ricci tensor, scalar curvature and inverse metric at a (possibly dual) point.
struct RicciData<S> {
    g: Mat<S>,
    ginv: Mat<S>,
    ric: Mat<S>,
    r: S,
}

fn ricci_data<T: Base, S: Lift<T>, M: MetricField<T>>(m: &M, y: &[S], mode: DerivativeMode<T>) -> Result<RicciData<S>> {
    let jet = metric_jet2(m, y, mode);
    let conn = Connection::new(&jet).ok_or_else(|| not_pd(y))?;
    let ric = ricci(&jet, &conn);
    let r = trace(&ric, &conn.ginv);
    Ok(RicciData { g: jet.g, ginv: conn.ginv, ric, r })
}

/// `R_g` as a point function, so that it can be differentiated again.
struct ScalarCurvatureFn<'a, T, M> {
    metric: &'a M,
    mode: DerivativeMode<T>,
}

impl<T: Base, M: MetricField<T>> PointFn<T> for ScalarCurvatureFn<'_, T, M> {
    fn eval<S: Lift<T>>(&self, y: &[S]) -> Result<S> {
        Ok(ricci_data(self.metric, y, self.mode)?.r)
    }
}

/// `Δ_g f` at `y`, with `Δ_g = g^{ij}∇_i∇_j`.
///
/// The second-order part is a sum of second directional derivatives along
/// the columns of a Cholesky factor of `g⁻¹`; the first-order part is the
/// derivative along `b^k = g^{ij}Γ^k_ij`.
pub fn laplacian<T: Base, S: Lift<T>, M: MetricField<T>, F: PointFn<T>>(
    m: &M,
    mode: DerivativeMode<T>,
    f: &F,
    y: &[S],
) -> Result<S> {
    let n = y.len();
    let jet = metric_jet1(m, y, mode);
    let conn = Connection::new(&jet).ok_or_else(|| not_pd(y))?;
    let l = conn.ginv.cholesky().ok_or_else(|| not_pd(y))?;
    let mut acc = S::zero();
    let mut v = vec![S::zero(); n];
    for a in 0..n {
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = l[(i, a)];
        }
        acc = acc + along(f, y, &v, mode)?.2;
    }
    let b = conn.trace_vector();
    if b.iter().any(|c| !c.is_zero()) {
        acc = acc - along(f, y, &b, mode)?.1;
    }
    Ok(acc)
}

struct LaplacianFn<'a, T, M, F> {
    metric: &'a M,
    mode: DerivativeMode<T>,
    f: F,
}

impl<T: Base, M: MetricField<T>, F: PointFn<T>> PointFn<T> for LaplacianFn<'_, T, M, F> {
    fn eval<S: Lift<T>>(&self, y: &[S]) -> Result<S> {
        laplacian(self.metric, self.mode, &self.f, y)
    }
}

/// `√det g · (4A^{il} − (n−2)σ₁(A) g^{il}) ∂_l u`.
struct DensitizedFlux<'a, T, M, U> {
    metric: &'a M,
    mode: DerivativeMode<T>,
    u: &'a U,
}

impl<T: Base, M: MetricField<T>, U: ScalarField<T>> VectorFn<T> for DensitizedFlux<'_, T, M, U> {
    fn eval<S: Lift<T>>(&self, y: &[S]) -> Result<Vec<S>> {
        let n = y.len();
        let d = ricci_data(self.metric, y, self.mode)?;
        let a = schouten(&d.ric, d.r, &d.g);
        let sigma1 = trace(&a, &d.ginv);
        let a_up = d.ginv.matmul(&a).matmul(&d.ginv);
        let (_, du) = gradient(&FieldFn(self.u), y, self.mode)?;
        let det = d.g.det();
        if !(det > S::zero()) {
            return Err(not_pd(y));
        }
        let vol = det.sqrt();
        let c = S::int(n as i64 - 2) * sigma1;
        Ok((0..n)
            .map(|i| {
                let s = (0..n).fold(S::zero(), |s, l| s + (S::int(4) * a_up[(i, l)] - c * d.ginv[(i, l)]) * du[l]);
                vol * s
            })
            .collect())
    }
}

/// All pointwise curvature quantities at one chart point.
#[derive(Clone, Debug)]
pub struct CurvaturePack<T> {
    pub point: Vec<T>,
    pub g: Mat<T>,
    pub ginv: Mat<T>,
    pub r: T,
    pub ric: Mat<T>,
    pub riem: Tensor4<T>,
    pub weyl: Tensor4<T>,
    pub schouten: Mat<T>,
    pub sigma1: T,
    pub q: T,
    pub laplacian_r: T,
}

impl<T: Real> CurvaturePack<T> {
    pub fn dim(&self) -> usize {
        self.point.len()
    }

    /// `|Ric|²_g`.
    pub fn ric_norm2(&self) -> T {
        norm2(&self.ric, &self.ginv)
    }

    /// `Q` recomputed from the stored `R`, `Ric` and `ΔR`.
    pub fn q_from_parts(&self) -> T {
        q_curvature(self.dim(), self.r, self.ric_norm2(), self.laplacian_r)
    }
}

/// Curvature of the chart metric at `x`.
pub fn curvature_at<T: Base, M: MetricField<T>>(cm: &ChartMetric<T, M>, x: &[T]) -> Result<CurvaturePack<T>> {
    cm.check_point(x)?;
    let jet = metric_jet2(&cm.field, x, cm.mode);
    let conn = Connection::new(&jet).ok_or_else(|| not_pd(x))?;
    let riem = riemann(&jet, &conn);
    let ric = ricci_from_riemann(&riem, &conn.ginv);
    let r = trace(&ric, &conn.ginv);
    let a = schouten(&ric, r, &jet.g);
    let sigma1 = trace(&a, &conn.ginv);
    let w = weyl(&riem, &a, &jet.g);
    let laplacian_r = laplacian(&cm.field, cm.mode, &ScalarCurvatureFn { metric: &cm.field, mode: cm.mode }, x)?;
    let q = q_curvature(x.len(), r, norm2(&ric, &conn.ginv), laplacian_r);
    let pack = CurvaturePack {
        point: x.to_vec(),
        g: jet.g,
        ginv: conn.ginv,
        r,
        ric,
        riem,
        weyl: w,
        schouten: a,
        sigma1,
        q,
        laplacian_r,
    };
    if !pack.q.is_finite() || !pack.r.is_finite() {
        return Err(Error::NonFinite("curvature"));
    }
    Ok(pack)
}

/// Q-curvature at `x` without forming the Riemann tensor.
pub fn q_at<T: Base, M: MetricField<T>>(cm: &ChartMetric<T, M>, x: &[T]) -> Result<T> {
    let d = ricci_data(&cm.field, x, cm.mode)?;
    let lap_r = laplacian(&cm.field, cm.mode, &ScalarCurvatureFn { metric: &cm.field, mode: cm.mode }, x)?;
    Ok(q_curvature(x.len(), d.r, norm2(&d.ric, &d.ginv), lap_r))
}

/// The three parts of `P_g u` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PaneitzTerms<T> {
    pub bilaplacian: T,
    pub divergence: T,
    pub zeroth_order: T,
}

impl<T: Real> PaneitzTerms<T> {
    pub fn total(&self) -> T {
        self.bilaplacian + self.divergence + self.zeroth_order
    }
}

/// `Δ_g²u`, `div_g((4A − (n−2)σ₁g)(∇u, ·))` and `(n−4)/2 Q_g u` at `x`.
pub fn paneitz_terms<T: Base, M: MetricField<T>, U: ScalarField<T>>(
    cm: &ChartMetric<T, M>,
    u: &U,
    x: &[T],
) -> Result<PaneitzTerms<T>> {
    cm.check_point(x)?;
    let n = x.len();
    let mode = cm.mode;
    let m = &cm.field;
    let inner = LaplacianFn { metric: m, mode, f: FieldFn(u) };
    let bilaplacian = laplacian(m, mode, &inner, x)?;

    let flux = DensitizedFlux { metric: m, mode, u };
    let mut div = T::zero();
    for i in 0..n {
        div = div + partial_vec(&flux, x, i, mode)?[i];
    }
    let det = m.metric(x).det();
    let divergence = div / det.sqrt();

    let q = q_at(cm, x)?;
    let zeroth_order = T::int(n as i64 - 4) / T::int(2) * q * u.value(x);
    let t = PaneitzTerms { bilaplacian, divergence, zeroth_order };
    if !t.total().is_finite() {
        return Err(Error::NonFinite("Paneitz operator"));
    }
    Ok(t)
}

/// `P_g u (x) = Δ_g²u + div_g((4A_g − (n−2)σ₁(A_g)g)(∇u, ·)) + (n−4)/2 Q_g u`.
pub fn paneitz_apply<T: Base, M: MetricField<T>, U: ScalarField<T>>(
    cm: &ChartMetric<T, M>,
    u: &U,
    x: &[T],
) -> Result<T> {
    Ok(paneitz_terms(cm, u, x)?.total())
}

/// `ChartMetric` for `ḡ = u^{4/(n−4)} g` with the same derivative mode.
pub fn conformal_chart<'a, T: Base, M: MetricField<T>, U: ScalarField<T>>(
    cm: &'a ChartMetric<T, M>,
    u: &'a U,
) -> ChartMetric<T, ConformalMetric<&'a M, &'a U>> {
    ChartMetric { field: ConformalMetric { base: &cm.field, factor: u }, mode: cm.mode }
}

/// `|P_g(φu)(x) − u(x)^{(n+4)/(n−4)} P_ḡ(φ)(x)|` with `ḡ = u^{4/(n−4)} g`.
pub fn conformal_covariance_residual<T: Base, M: MetricField<T>, U: ScalarField<T>, F: ScalarField<T>>(
    cm: &ChartMetric<T, M>,
    u: &U,
    phi: &F,
    x: &[T],
) -> Result<T> {
    cm.check_point(x)?;
    let n = x.len();
    let margin = cm.mode.margin();
    let mut probes = vec![x.to_vec()];
    if margin > T::zero() {
        for i in 0..n {
            for s in [T::one(), -T::one()] {
                let mut y = x.to_vec();
                y[i] = y[i] + s * margin;
                probes.push(y);
            }
        }
    }
    for y in &probes {
        let v = u.value(y);
        if !(v > T::zero()) {
            return Err(Error::NonPositiveField { point: y.iter().map(|c| c.re_f64()).collect(), value: v.re_f64() });
        }
    }
    let lhs = paneitz_apply(cm, &Product(phi, u), x)?;
    let bar = conformal_chart(cm, u);
    let p = T::int(n as i64 + 4) / T::int(n as i64 - 4);
    let rhs = u.value(x).powf(p) * paneitz_apply(&bar, phi, x)?;
    Ok((lhs - rhs).abs())
}

/// Cubature over a chart region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChartQuadrature<T> {
    /// Tensor-product Gauss–Legendre over the support box of the integrand,
    /// `panels` equal panels per axis with `order` nodes each.
    TensorGauss { order: usize, panels: usize },
    /// Polar cubature about `center` out to `radius`: Gauss–Legendre panels in
    /// `r` (geometrically graded from `grading` towards the origin, with extra
    /// `breaks`), Gauss–Gegenbauer rules for the polar angles and the
    /// trapezoid rule in the azimuth.
    Polar {
        center: Vec<T>,
        radius: T,
        breaks: Vec<T>,
        grading: T,
        order: usize,
        panels: usize,
        angular_order: usize,
    },
}

impl<T: Base> ChartQuadrature<T> {
    /// Nodes and weights (Euclidean `dx`) of the cubature over `support`.
    pub fn nodes(&self, n: usize, support: &CoordBox<T>) -> Result<Vec<(Vec<T>, T)>> {
        match self {
            ChartQuadrature::TensorGauss { order, panels } => {
                if *panels == 0 {
                    return Err(Error::EmptyGrid);
                }
                let rule = gauss_legendre::<T>(*order)?;
                let axes: Vec<Vec<(T, T)>> = (0..n)
                    .map(|i| {
                        let (lo, hi) = (support.lo[i], support.hi[i]);
                        let w = (hi - lo) / T::int(*panels as i64);
                        let mut pts = Vec::new();
                        for p in 0..*panels {
                            let a = lo + w * T::int(p as i64);
                            let c = a + w / T::int(2);
                            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                                pts.push((c + *x * w / T::int(2), *wt * w / T::int(2)));
                            }
                        }
                        pts
                    })
                    .collect();
                let mut out = vec![(Vec::with_capacity(n), T::one())];
                for axis in &axes {
                    let mut next = Vec::with_capacity(out.len() * axis.len());
                    for (x, w) in &out {
                        for &(c, wc) in axis {
                            let mut y = x.clone();
                            y.push(c);
                            next.push((y, *w * wc));
                        }
                    }
                    out = next;
                }
                Ok(out)
            }
            ChartQuadrature::Polar { center, radius, breaks, grading, order, panels, angular_order } => {
                if *panels == 0 || *angular_order == 0 || n < 2 {
                    return Err(Error::EmptyGrid);
                }
                if !(*grading > T::zero()) || !(*radius > T::zero()) {
                    return Err(Error::InvalidParameter("polar cubature needs positive radius and grading".into()));
                }
                let mut cuts = vec![T::zero()];
                let first = breaks.iter().copied().filter(|b| *b > T::zero()).fold(*radius, T::min);
                let mut g = *grading;
                while g < first {
                    cuts.push(g);
                    g = g * T::int(4);
                }
                let mut rest: Vec<T> = breaks.iter().copied().filter(|b| *b > T::zero() && *b < *radius).collect();
                rest.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                cuts.extend(rest);
                cuts.push(*radius);
                cuts.dedup();
                let rule = gauss_legendre::<T>(*order)?;
                let mut radial = Vec::new();
                for w in cuts.windows(2) {
                    let len = (w[1] - w[0]) / T::int(*panels as i64);
                    for p in 0..*panels {
                        let c = w[0] + len * (T::int(p as i64) + T::lit(0.5));
                        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                            let r = c + *x * len / T::int(2);
                            radial.push((r, *wt * len / T::int(2) * r.powi(n as i32 - 1)));
                        }
                    }
                }
                let dirs = sphere_directions::<T>(n, *angular_order)?;
                let mut out = Vec::with_capacity(radial.len() * dirs.len());
                for &(r, wr) in &radial {
                    for (d, wd) in &dirs {
                        let y: Vec<T> = (0..n).map(|i| center[i] + r * d[i]).collect();
                        out.push((y, wr * *wd));
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Product cubature on `S^{n−1}` whose weights sum to its area.
pub fn sphere_directions<T: Base>(n: usize, order: usize) -> Result<Vec<(Vec<T>, T)>> {
    let nphi = 2 * order;
    let two_pi = T::lit(std::f64::consts::TAU);
    let mut out: Vec<(Vec<T>, T)> = vec![(Vec::new(), T::one())];
    // polar angles θ_j, j = 1..n−2, carry sin^{n−1−j}
    let mut prefix_sin: Vec<T> = vec![T::one()];
    for j in 1..n - 1 {
        let rule = gauss_gegenbauer::<T>(order, (n - 1 - j) as u32)?;
        let mut next = Vec::new();
        let mut next_sin = Vec::new();
        for ((d, w), s) in out.iter().zip(&prefix_sin) {
            for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let mut e = d.clone();
                e.push(*s * t);
                next.push((e, *w * wt));
                next_sin.push(*s * (T::one() - t * t).sqrt());
            }
        }
        out = next;
        prefix_sin = next_sin;
    }
    let mut res = Vec::with_capacity(out.len() * nphi);
    for ((d, w), s) in out.iter().zip(&prefix_sin) {
        for k in 0..nphi {
            let phi = two_pi * (T::int(k as i64) + T::lit(0.5)) / T::int(nphi as i64);
            let mut e = d.clone();
            e.push(*s * phi.cos());
            e.push(*s * phi.sin());
            res.push((e, *w * two_pi / T::int(nphi as i64)));
        }
    }
    Ok(res)
}

fn support_inside<T: Base, M: MetricField<T>, U: ScalarField<T>>(cm: &ChartMetric<T, M>, u: &U) -> Result<CoordBox<T>> {
    let s = u.support().ok_or(Error::SupportTouchesBoundary)?;
    let margin = cm.mode.margin();
    let d = cm.field.domain();
    let shrunk = CoordBox {
        lo: d.lo.iter().map(|&v| v + margin).collect(),
        hi: d.hi.iter().map(|&v| v - margin).collect(),
    };
    if !shrunk.strictly_contains(&s) {
        return Err(Error::SupportTouchesBoundary);
    }
    Ok(s)
}

fn integrate_nodes<T: Base>(nodes: &[(Vec<T>, T)], f: impl Fn(&[T]) -> Result<T> + Sync) -> Result<T> {
    let vals: Vec<Result<T>> = nodes.par_iter().map(|(x, w)| f(x).map(|v| v * *w)).collect();
    let mut s = T::zero();
    for v in vals {
        s = s + v?;
    }
    if !s.is_finite() {
        return Err(Error::NonFinite("chart cubature"));
    }
    Ok(s)
}

/// `E_g[u] = ∫ u P_g u dμ_g` over the support of `u`.
pub fn energy_on_chart<T: Base, M: MetricField<T>, U: ScalarField<T>>(
    cm: &ChartMetric<T, M>,
    u: &U,
    quad: &ChartQuadrature<T>,
) -> Result<T> {
    let s = support_inside(cm, u)?;
    let nodes = quad.nodes(cm.dim(), &s)?;
    integrate_nodes(&nodes, |x| {
        if !s.contains(x, T::zero()) {
            return Ok(T::zero());
        }
        let v = u.value(x);
        if v.is_zero() {
            return Ok(T::zero());
        }
        let vol = cm.field.metric(x).det().sqrt();
        Ok(v * paneitz_apply(cm, u, x)? * vol)
    })
}

/// `∫ |u|^{2n/(n−4)} dμ_g` over the support of `u`.
pub fn critical_norm_on_chart<T: Base, M: MetricField<T>, U: ScalarField<T>>(
    cm: &ChartMetric<T, M>,
    u: &U,
    quad: &ChartQuadrature<T>,
) -> Result<T> {
    let s = support_inside(cm, u)?;
    let n = cm.dim() as i64;
    let p = T::int(2 * n) / T::int(n - 4);
    let nodes = quad.nodes(cm.dim(), &s)?;
    integrate_nodes(&nodes, |x| {
        if !s.contains(x, T::zero()) {
            return Ok(T::zero());
        }
        let v = u.value(x).abs();
        if v.is_zero() {
            return Ok(T::zero());
        }
        Ok(v.powf(p) * cm.field.metric(x).det().sqrt())
    })
}

/// `E_g[u] / (∫|u|^{2n/(n−4)} dμ_g)^{(n−4)/n}`.
pub fn sobolev_quotient_on_chart<T: Base, M: MetricField<T>, U: ScalarField<T>>(
    cm: &ChartMetric<T, M>,
    u: &U,
    quad: &ChartQuadrature<T>,
) -> Result<T> {
    let n = cm.dim() as i64;
    let e = energy_on_chart(cm, u, quad)?;
    let c = critical_norm_on_chart(cm, u, quad)?;
    if c.is_zero() {
        return Err(Error::ZeroField);
    }
    Ok(e / c.powf(T::int(n - 4) / T::int(n)))
}
