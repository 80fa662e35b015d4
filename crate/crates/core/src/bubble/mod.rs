//! Radial computations with the bubble family on Euclidean space.

pub mod fit;
pub mod gap;
pub mod integrals;
pub mod lemma31;
pub mod profile;

pub use fit::{scaling_fit, FitModel, ScalingFit};
pub use gap::{gap_certificate, GapReport, GapRow, Remainders};
pub use integrals::{q_sphere, radial_bilaplacian, radial_integrals, weyl_coefficient, RadialIntegrals, WeylCoefficient};
pub use lemma31::{
    lemma31, lemma31_bracket, lemma31_closed_form, lemma31_quadrature, sign_change_root, successive_log_slopes,
    Lemma31Result, Regime,
};
pub use profile::{bubble, BubbleParams, BubbleValues, CutoffProfile};
