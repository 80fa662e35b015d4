//! Scalar test fields on charts.

use crate::bubble::profile::{bubble_r2, BubbleParams};
use crate::curvature::chart::{CoordBox, ScalarField};
use crate::scalar::{Base, Lift};

fn dist2<T: Base, S: Lift<T>>(x: &[S], c: &[T]) -> S {
    x.iter().enumerate().fold(S::zero(), |s, (i, &xi)| {
        let d = xi - S::lift(c.get(i).copied().unwrap_or_else(T::zero));
        s + d * d
    })
}

/// A constant function.
#[derive(Clone, Copy, Debug)]
pub struct Constant<T>(pub T);

impl<T: Base> ScalarField<T> for Constant<T> {
    fn value<S: Lift<T>>(&self, _x: &[S]) -> S {
        S::lift(self.0)
    }
}

/// The coordinate function `x_i`.
#[derive(Clone, Copy, Debug)]
pub struct Coordinate(pub usize);

impl<T: Base> ScalarField<T> for Coordinate {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S {
        x[self.0]
    }
}

/// `c₀ + Σ aᵢ xᵢ`.
#[derive(Clone, Debug)]
pub struct Affine<T> {
    pub c0: T,
    pub coeffs: Vec<T>,
}

impl<T: Base> ScalarField<T> for Affine<T> {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S {
        self.coeffs
            .iter()
            .zip(x)
            .fold(S::lift(self.c0), |s, (&a, &xi)| s + S::lift(a) * xi)
    }
}

/// `|x − c|²`.
#[derive(Clone, Debug)]
pub struct SquaredRadius<T> {
    pub center: Vec<T>,
}

impl<T: Base> ScalarField<T> for SquaredRadius<T> {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S {
        dist2(x, &self.center)
    }
}

/// Pointwise product of two fields.
#[derive(Clone, Debug)]
pub struct Product<A, B>(pub A, pub B);

impl<T: Base, A: ScalarField<T>, B: ScalarField<T>> ScalarField<T> for Product<A, B> {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S {
        self.0.value(x) * self.1.value(x)
    }

    fn support(&self) -> Option<CoordBox<T>> {
        match (self.0.support(), self.1.support()) {
            (None, s) | (s, None) => s,
            (Some(a), Some(b)) => {
                let lo = a.lo.iter().zip(&b.lo).map(|(&p, &q)| p.max(q)).collect();
                let hi = a.hi.iter().zip(&b.hi).map(|(&p, &q)| p.min(q)).collect();
                Some(CoordBox { lo, hi })
            }
        }
    }
}

/// The bubble `u_α` centred at `center`.
#[derive(Clone, Debug)]
pub struct Bubble<T> {
    pub n: u32,
    pub alpha: T,
    pub center: Vec<T>,
}

impl<T: Base> ScalarField<T> for Bubble<T> {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S {
        bubble_r2(self.n, S::lift(self.alpha), dist2(x, &self.center))
    }
}

/// The localised bubble `η_ε u_α` centred at `center`; vanishes beyond `2ε`.
#[derive(Clone, Debug)]
pub struct CutoffBubble<T> {
    pub params: BubbleParams<T>,
    pub center: Vec<T>,
}

impl<T: Base> ScalarField<T> for CutoffBubble<T> {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S {
        self.params.phi_r2(dist2(x, &self.center))
    }

    fn support(&self) -> Option<CoordBox<T>> {
        let r = self.params.epsilon * T::int(2);
        Some(CoordBox {
            lo: self.center.iter().map(|&c| c - r).collect(),
            hi: self.center.iter().map(|&c| c + r).collect(),
        })
    }
}

/// Radial polynomial bump `(1 − |x − c|²/R²)^k` inside the ball of radius `R`.
#[derive(Clone, Debug)]
pub struct PolynomialBump<T> {
    pub center: Vec<T>,
    pub radius: T,
    pub power: i32,
}

impl<T: Base> ScalarField<T> for PolynomialBump<T> {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S {
        let r = S::lift(self.radius);
        let s = S::one() - dist2(x, &self.center) / (r * r);
        if s <= S::zero() {
            S::zero()
        } else {
            s.powi(self.power)
        }
    }

    fn support(&self) -> Option<CoordBox<T>> {
        Some(CoordBox {
            lo: self.center.iter().map(|&c| c - self.radius).collect(),
            hi: self.center.iter().map(|&c| c + self.radius).collect(),
        })
    }
}

/// Tensor-product bump `∏ (1 − (xᵢ/a)²)^k` on `[−a, a]ⁿ`.
#[derive(Clone, Debug)]
pub struct TensorBump<T> {
    pub n: usize,
    pub half_width: T,
    pub power: i32,
}

impl<T: Base> ScalarField<T> for TensorBump<T> {
    fn value<S: Lift<T>>(&self, x: &[S]) -> S {
        let a = S::lift(self.half_width);
        x.iter().fold(S::one(), |p, &xi| {
            let s = S::one() - (xi / a) * (xi / a);
            if s <= S::zero() {
                S::zero()
            } else {
                p * s.powi(self.power)
            }
        })
    }

    fn support(&self) -> Option<CoordBox<T>> {
        Some(CoordBox::cube(self.n, self.half_width))
    }
}
