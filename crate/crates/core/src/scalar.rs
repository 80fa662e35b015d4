//! Scalar abstraction shared by every numerical module.
//!
//! All geometry is written against [`Real`], which is satisfied by `f32`,
//! `f64` and by forward-mode [`Dual`](crate::dual::Dual) numbers built on top
//! of them. Metric and field callbacks are additionally generic over
//! [`Lift<T>`], the set of scalars into which parameters stored as `T` can be
//! embedded as constants.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

/// Floating point scalar: f32, f64 or a dual number over one of them.
pub trait Real: Float + FromPrimitive + Debug + Send + Sync + 'static {
    /// Converts an `f64` literal. Panics only if the target cannot represent
    /// finite `f64` values, which never happens for the supported types.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal is representable")
    }

    /// Converts a small integer literal.
    #[inline]
    fn int(v: i64) -> Self {
        Self::from_i64(v).expect("integer literal is representable")
    }

    /// Value of the innermost real part as `f64`.
    #[inline]
    fn re_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Embeds a base scalar `T` as a constant into `Self`.
pub trait Lift<T>: Real {
    fn lift(t: T) -> Self;
}

impl Lift<f32> for f32 {
    #[inline]
    fn lift(t: f32) -> Self {
        t
    }
}

impl Lift<f64> for f64 {
    #[inline]
    fn lift(t: f64) -> Self {
        t
    }
}

/// Base scalar types usable as parameter storage.
pub trait Base: Real + Lift<Self> {}
impl<T: Real + Lift<T>> Base for T {}

/// Lifts a slice of base values.
pub fn lift_all<T: Copy, S: Lift<T>>(xs: &[T]) -> Vec<S> {
    xs.iter().map(|&x| S::lift(x)).collect()
}

/// Relative difference `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff<T: Real>(a: T, b: T, floor: T) -> T {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
