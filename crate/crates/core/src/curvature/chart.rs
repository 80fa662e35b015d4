//! Coordinate charts: boxes, metric fields and the shipped chart registry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Base, Lift, Real};

/// Axis-aligned box `∏[lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Real> CoordBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidParameter("box bounds must be non-empty and of equal length".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidParameter("box needs lo < hi on every axis".into()));
        }
        Ok(Self { lo, hi })
    }

    /// `[-r, r]ⁿ`.
    pub fn cube(n: usize, r: T) -> Self {
        Self { lo: vec![-r; n], hi: vec![r; n] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn diameter(&self) -> T {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(T::zero(), |s, (&l, &h)| s + (h - l) * (h - l))
            .sqrt()
    }

    /// Whether `x` lies in the box shrunk by `margin` on every side.
    pub fn contains<S: Real>(&self, x: &[S], margin: T) -> bool {
        let m = margin.re_f64();
        x.len() == self.dim()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(xi, (l, h))| {
                let v = xi.re_f64();
                v >= l.re_f64() + m && v <= h.re_f64() - m
            })
    }

    /// Whether `inner` lies strictly inside `self`.
    pub fn strictly_contains(&self, inner: &CoordBox<T>) -> bool {
        inner.dim() == self.dim()
            && (0..self.dim()).all(|i| inner.lo[i] > self.lo[i] && inner.hi[i] < self.hi[i])
    }
}

/// A metric tensor field on a coordinate box. The metric callback is generic
/// over every scalar that can embed `T`, so it can be evaluated on nested
/// dual numbers for exact derivatives.
pub trait MetricField<T: Base>: Send + Sync {
    fn dim(&self) -> usize;
    fn domain(&self) -> &CoordBox<T>;
    fn metric<S: Lift<T>>(&self, x: &[S]) -> Mat<S>;
}

/// A scalar function on a chart, generic in the same way as [`MetricField`].
pub trait ScalarField<T: Base>: Send + Sync {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S;

    /// Box outside which the field vanishes identically, if any.
    fn support(&self) -> Option<CoordBox<T>> {
        None
    }
}

impl<T: Base, F: ScalarField<T>> ScalarField<T> for &F {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S {
        (**self).value(x)
    }
    fn support(&self) -> Option<CoordBox<T>> {
        (**self).support()
    }
}

impl<T: Base, M: MetricField<T>> MetricField<T> for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn domain(&self) -> &CoordBox<T> {
        (**self).domain()
    }
    fn metric<S: Lift<T>>(&self, x: &[S]) -> Mat<S> {
        (**self).metric(x)
    }
}

/// How derivatives of metrics and fields are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DerivativeMode<T> {
    /// Exact derivatives of the analytic callbacks by nested dual numbers.
    Analytic,
    /// Second-order central differences: step `h` for first and second
    /// derivatives of the metric, `h_high` for the outer derivatives that
    /// build third and fourth order quantities.
    FiniteDifference { h: T, h_high: T },
}

impl<T: Real> DerivativeMode<T> {
    /// Default finite-difference steps: 1e-3 and 5e-3 of the domain diameter.
    pub fn default_fd(domain: &CoordBox<T>) -> Self {
        let d = domain.diameter();
        DerivativeMode::FiniteDifference { h: d * T::lit(1e-3), h_high: d * T::lit(5e-3) }
    }

    /// Distance every stencil of the engine may reach from its centre.
    pub fn margin(&self) -> T {
        match *self {
            DerivativeMode::Analytic => T::zero(),
            DerivativeMode::FiniteDifference { h, h_high } => T::int(2) * h + T::int(4) * h_high,
        }
    }
}

/// A metric field together with the derivative mode used to differentiate it.
#[derive(Clone, Debug)]
pub struct ChartMetric<T, M> {
    pub field: M,
    pub mode: DerivativeMode<T>,
}

impl<T: Base, M: MetricField<T>> ChartMetric<T, M> {
    pub fn analytic(field: M) -> Self {
        Self { field, mode: DerivativeMode::Analytic }
    }

    pub fn finite_difference(field: M, h: T, h_high: T) -> Result<Self> {
        if !(h > T::zero() && h_high > T::zero()) {
            return Err(Error::InvalidParameter("finite-difference steps must be positive".into()));
        }
        Ok(Self { field, mode: DerivativeMode::FiniteDifference { h, h_high } })
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    /// Rejects points without the stencil margin and non positive definite metrics.
    pub fn check_point(&self, x: &[T]) -> Result<()> {
        let margin = self.mode.margin();
        if let DerivativeMode::FiniteDifference { h, .. } = self.mode {
            let scale = x.iter().fold(T::one(), |m, v| m.max(v.abs()));
            if h <= scale * T::epsilon() * T::int(16) {
                return Err(Error::DerivativeStepUnderflow(h.re_f64()));
            }
        }
        if !self.field.domain().contains(x, margin) {
            return Err(Error::PointOutsideDomain {
                point: x.iter().map(|v| v.re_f64()).collect(),
                margin: margin.re_f64(),
            });
        }
        if self.field.metric::<T>(x).cholesky().is_none() {
            return Err(Error::NotPositiveDefinite(x.iter().map(|v| v.re_f64()).collect()));
        }
        Ok(())
    }
}

fn norm2<S: Real>(x: &[S]) -> S {
    x.iter().fold(S::zero(), |s, &v| s + v * v)
}

/// The registered charts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Chart<T> {
    /// Euclidean `ℝⁿ`.
    Flat { n: usize, domain: CoordBox<T> },
    /// Round sphere of radius `radius` through inverse stereographic
    /// projection: `g = 4ρ² δ/(1 + |x|²)²`.
    StereographicSphere { n: usize, radius: T, domain: CoordBox<T> },
    /// `S^p(r₁) × S^q(r₂)` with a stereographic chart on each factor.
    ProductSpheres { p: usize, q: usize, r1: T, r2: T, domain: CoordBox<T> },
}

impl<T: Base> Chart<T> {
    pub fn flat(n: usize, half_width: T) -> Self {
        Chart::Flat { n, domain: CoordBox::cube(n, half_width) }
    }

    pub fn sphere(n: usize, half_width: T) -> Self {
        Chart::StereographicSphere { n, radius: T::one(), domain: CoordBox::cube(n, half_width) }
    }

    pub fn product(p: usize, q: usize, r1: T, r2: T, half_width: T) -> Self {
        Chart::ProductSpheres { p, q, r1, r2, domain: CoordBox::cube(p + q, half_width) }
    }

    /// Looks a chart up by its identifier: `flat`, `sphere` or `product:p:q`.
    pub fn by_id(id: &str, n: usize, half_width: T) -> Result<Self> {
        match id {
            "flat" => Ok(Self::flat(n, half_width)),
            "sphere" => Ok(Self::sphere(n, half_width)),
            _ => {
                let parts: Vec<&str> = id.split(':').collect();
                if parts.len() == 3 && parts[0] == "product" {
                    let p: usize = parts[1].parse().map_err(|_| Error::InvalidParameter(format!("bad chart id {id}")))?;
                    let q: usize = parts[2].parse().map_err(|_| Error::InvalidParameter(format!("bad chart id {id}")))?;
                    if p + q != n || p < 2 || q < 2 {
                        return Err(Error::InvalidParameter(format!("chart {id} does not have dimension {n}")));
                    }
                    Ok(Self::product(p, q, T::one(), T::one(), half_width))
                } else {
                    Err(Error::InvalidParameter(format!("unknown chart id {id}")))
                }
            }
        }
    }
}

impl<T: Base> MetricField<T> for Chart<T> {
    fn dim(&self) -> usize {
        match self {
            Chart::Flat { n, .. } | Chart::StereographicSphere { n, .. } => *n,
            Chart::ProductSpheres { p, q, .. } => p + q,
        }
    }

    fn domain(&self) -> &CoordBox<T> {
        match self {
            Chart::Flat { domain, .. }
            | Chart::StereographicSphere { domain, .. }
            | Chart::ProductSpheres { domain, .. } => domain,
        }
    }

    fn metric<S: Lift<T>>(&self, x: &[S]) -> Mat<S> {
        match self {
            Chart::Flat { n, .. } => Mat::identity(*n),
            Chart::StereographicSphere { n, radius, .. } => {
                let rho = S::lift(*radius);
                let d = S::one() + norm2(x);
                let f = S::int(4) * rho * rho / (d * d);
                Mat::diag(&vec![f; *n])
            }
            Chart::ProductSpheres { p, q, r1, r2, .. } => {
                let (y, z) = x.split_at(*p);
                let (a, b) = (S::lift(*r1), S::lift(*r2));
                let dy = S::one() + norm2(y);
                let dz = S::one() + norm2(z);
                let fy = S::int(4) * a * a / (dy * dy);
                let fz = S::int(4) * b * b / (dz * dz);
                let mut d = vec![fy; *p];
                d.extend(std::iter::repeat_n(fz, *q));
                Mat::diag(&d)
            }
        }
    }
}

/// `ḡ = u^{4/(n−4)} g` for a positive conformal factor `u`.
#[derive(Clone, Debug)]
pub struct ConformalMetric<M, U> {
    pub base: M,
    pub factor: U,
}

impl<T: Base, M: MetricField<T>, U: ScalarField<T>> MetricField<T> for ConformalMetric<M, U> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn domain(&self) -> &CoordBox<T> {
        self.base.domain()
    }

    fn metric<S: Lift<T>>(&self, x: &[S]) -> Mat<S> {
        let n = self.dim() as i64;
        let u = self.factor.value(x);
        let e = S::int(4) / S::int(n - 4);
        self.base.metric(x).scale(u.powf(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_margins() {
        let b = CoordBox::cube(2, 1.0_f64);
        assert!(b.contains(&[0.5, -0.5], 0.4));
        assert!(!b.contains(&[0.5, -0.5], 0.6));
        assert!(!b.contains(&[0.5], 0.0));
        assert!(CoordBox::new(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn chart_ids() {
        assert!(matches!(Chart::<f64>::by_id("product:4:4", 8, 0.5), Ok(Chart::ProductSpheres { .. })));
        assert!(Chart::<f64>::by_id("product:4:4", 7, 0.5).is_err());
        assert!(Chart::<f64>::by_id("torus", 5, 0.5).is_err());
    }

    #[test]
    fn check_point_rejects_stencil_overflow() {
        let c = ChartMetric::finite_difference(Chart::flat(5, 1.0_f64), 1e-3, 5e-2).unwrap();
        assert!(c.check_point(&[0.0; 5]).is_ok());
        assert!(matches!(c.check_point(&[0.9, 0.0, 0.0, 0.0, 0.0]), Err(Error::PointOutsideDomain { .. })));
    }

    #[test]
    fn check_point_rejects_tiny_step() {
        let c = ChartMetric::finite_difference(Chart::flat(5, 1.0_f64), 1e-18, 1e-18).unwrap();
        assert!(matches!(c.check_point(&[0.5; 5]), Err(Error::DerivativeStepUnderflow(_))));
    }
}
