use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the chart domain (margin {margin})")]
    PointOutsideDomain { point: Vec<f64>, margin: f64 },
    #[error("metric is not positive definite at {0:?}")]
    NotPositiveDefinite(Vec<f64>),
    #[error("finite-difference step {0} underflows relative to the point scale")]
    DerivativeStepUnderflow(f64),
    #[error("field is not positive where it must be ({value} at {point:?})")]
    NonPositiveField { point: Vec<f64>, value: f64 },
    #[error("support of the field touches the domain boundary")]
    SupportTouchesBoundary,
    #[error("quadrature did not reach tolerance {tol:e} within {intervals} intervals (estimate {estimate:e})")]
    QuadratureBudget { tol: f64, intervals: usize, estimate: f64 },
    #[error("degenerate least-squares design")]
    DegenerateFit,
    #[error("field is identically zero")]
    ZeroField,
    #[error("time step underflow at t = {t} (dt = {dt:e})")]
    DtUnderflow { t: f64, dt: f64 },
    #[error("positivity lost at t = {t}: min u = {min_u:e}")]
    PositivityLoss { t: f64, min_u: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
