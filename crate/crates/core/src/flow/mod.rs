//! The nonlocal Q-curvature flow for zonal data on the round sphere.

pub mod integrator;
pub mod model;

pub use integrator::{run, Flow, FlowConfig, FlowDiagnostics, FlowSample, FlowState, StopReason, Trajectory};
pub use model::{
    cone_minimum, f2_of, f2_with, fixed_point_constant, h_function, min_nodal, mu_and_volume, mu_of, velocity,
    velocity_with, MuNormalization,
};
