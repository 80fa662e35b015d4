//! Curvature of metrics given on coordinate charts.

pub mod chart;
pub mod diff;
pub mod field;
pub mod paneitz;
pub mod tensors;

pub use chart::{Chart, ChartMetric, ConformalMetric, CoordBox, DerivativeMode, MetricField, ScalarField};
pub use paneitz::{
    christoffel, conformal_chart, conformal_covariance_residual, critical_norm_on_chart, curvature_at, energy_on_chart, paneitz_apply,
    paneitz_terms, q_at, sobolev_quotient_on_chart, ChartQuadrature, CurvaturePack, PaneitzTerms,
};
