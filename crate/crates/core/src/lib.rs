//! Numerical laboratory for the Paneitz operator and Q-curvature.
//!
//! * [`curvature`]: curvature tensors, `Q_g` and `P_g` on coordinate charts.
//! * [`bubble`]: radial integrals of the bubble family, the Weyl coefficient and the gap certificate.
//! * [`spectral`]: zonal harmonic calculus on the round sphere.
//! * [`flow`]: the nonlocal Q-curvature flow for zonal data.
//!
//! Everything is generic over the scalar type; the aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod bubble;
pub mod curvature;
pub mod dual;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};

pub type BubbleParams = bubble::BubbleParams<f64>;
pub type GapReport = bubble::GapReport<f64>;
pub type Lemma31Result = bubble::Lemma31Result<f64>;
pub type ZonalField = spectral::ZonalField<f64>;
pub type ZonalBasis = spectral::ZonalBasis<f64>;
pub type MoebiusMap = spectral::MoebiusMap<f64>;
pub type FlowState = flow::FlowState<f64>;
pub type Trajectory = flow::Trajectory<f64>;
pub type Chart = curvature::Chart<f64>;
pub type CurvaturePack = curvature::CurvaturePack<f64>;
