//! Conformal dilations of `Sⁿ` along the zonal axis and companion functions.

use serde::{Deserialize, Serialize};

use super::basis::{Projection, ZonalBasis, ZonalField};
use crate::error::{Error, Result};
use crate::scalar::Base;

/// The dilation `y ↦ λy` in the stereographic chart centred at the pole `x = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap<T> {
    pub n: u32,
    pub lambda: T,
}

impl<T: Base> MoebiusMap<T> {
    pub fn new(n: u32, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParameter("dilation parameter must be positive".into()));
        }
        Ok(Self { n, lambda })
    }

    pub fn identity(n: u32) -> Self {
        Self { n, lambda: T::one() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { n: self.n, lambda: self.lambda * other.lambda }
    }

    fn denom(&self, x: T) -> T {
        let l2 = self.lambda * self.lambda;
        (T::one() + x) + l2 * (T::one() - x)
    }

    /// Image of the point with `cos θ = x`.
    pub fn map(&self, x: T) -> T {
        let l2 = self.lambda * self.lambda;
        ((T::one() + x) - l2 * (T::one() - x)) / self.denom(x)
    }

    /// `|det dφ|^{1/n} = 2λ/((1+x) + λ²(1−x))`.
    pub fn conformal_factor(&self, x: T) -> T {
        (self.lambda + self.lambda) / self.denom(x)
    }

    /// `|det dφ|`.
    pub fn jacobian(&self, x: T) -> T {
        self.conformal_factor(x).powi(self.n as i32)
    }
}

/// `v = (u∘φ) |det dφ|^{(n−4)/(2n)}`, evaluated at the nodes and projected.
pub fn companion<T: Base>(b: &ZonalBasis<T>, u: &ZonalField<T>, phi: &MoebiusMap<T>) -> Projection<T> {
    let half = T::int(u.n as i64 - 4) / T::int(2);
    if phi.lambda == T::one() {
        let v = b.nodal(u);
        return b.project(&v);
    }
    b.project_fn(|x| b.eval(u, phi.map(x)) * phi.conformal_factor(x).powf(half))
}
