//! Zonal spectral calculus on the round sphere.

pub mod basis;
pub mod moebius;
pub mod operator;

pub use basis::{Projection, ZonalBasis, ZonalChartField, ZonalField, ZonalRecurrence};
pub use moebius::{companion, MoebiusMap};
pub use operator::{
    critical_integral, energy, kazdan_warner_integral, nonlinear_power, paneitz_apply_sphere, paneitz_eigenvalue,
    paneitz_eigenvalue_factored, paneitz_eigenvalue_x16, paneitz_inverse, positive_nodal, q_curvature_nodal,
    q_curvature_of_conformal, KazdanWarner,
};
