//! Forward-mode dual numbers `a + b·ε` with `ε² = 0`.
//!
//! `Dual<T>` implements [`num_traits::Float`] whenever `T` does, so duals nest:
//! `Dual<Dual<f64>>` carries mixed second derivatives, and four levels carry the
//! fourth-order derivatives needed by `Δ_g R_g` and `Δ_g² u`. Comparisons look
//! at the real part only.

use std::cmp::Ordering;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Float, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

use crate::scalar::{Lift, Real};

#[derive(Clone, Copy, Debug, Default)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Real> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    /// A constant (zero infinitesimal part).
    #[inline]
    pub fn cst(re: T) -> Self {
        Self { re, eps: T::zero() }
    }

    /// The independent variable `re + ε`.
    #[inline]
    pub fn var(re: T) -> Self {
        Self { re, eps: T::one() }
    }

    /// Applies a scalar function with known derivative `df` at `re`.
    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Self { re: f, eps: df * self.eps }
    }
}

impl<B, S: Lift<B>> Lift<B> for Dual<S> {
    #[inline]
    fn lift(t: B) -> Self {
        Dual::cst(S::lift(t))
    }
}

impl<T: Real> Real for Dual<T> {}

impl<T: Real> PartialEq for Dual<T> {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re
    }
}

impl<T: Real> PartialOrd for Dual<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.re.partial_cmp(&other.re)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { re: -self.re, eps: -self.eps }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, eps: self.eps + o.eps }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, eps: self.eps - o.eps }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self { re: self.re * o.re, eps: self.re * o.eps + self.eps * o.re }
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.re;
        let q = self.re * inv;
        Self { re: q, eps: (self.eps - q * o.eps) * inv }
    }
}

impl<T: Real> Rem for Dual<T> {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        let k = (self.re / o.re).trunc();
        Self { re: self.re % o.re, eps: self.eps - o.eps * k }
    }
}

impl<T: Real> AddAssign for Dual<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Dual<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Dual<T> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> DivAssign for Dual<T> {
    #[inline]
    fn div_assign(&mut self, o: Self) {
        *self = *self / o;
    }
}

impl<T: Real> Zero for Dual<T> {
    fn zero() -> Self {
        Self::cst(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<T: Real> One for Dual<T> {
    fn one() -> Self {
        Self::cst(T::one())
    }
}

impl<T: Real> Num for Dual<T> {
    type FromStrRadixErr = T::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        T::from_str_radix(s, radix).map(Self::cst)
    }
}

impl<T: Real> ToPrimitive for Dual<T> {
    fn to_i64(&self) -> Option<i64> {
        self.re.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.re.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        self.re.to_f64()
    }
}

impl<T: Real> NumCast for Dual<T> {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        <T as NumCast>::from(n).map(Self::cst)
    }
}

impl<T: Real> FromPrimitive for Dual<T> {
    fn from_i64(n: i64) -> Option<Self> {
        T::from_i64(n).map(Self::cst)
    }
    fn from_u64(n: u64) -> Option<Self> {
        T::from_u64(n).map(Self::cst)
    }
    fn from_f64(n: f64) -> Option<Self> {
        T::from_f64(n).map(Self::cst)
    }
}

impl<T: Real> Float for Dual<T> {
    fn nan() -> Self {
        Self::cst(T::nan())
    }
    fn infinity() -> Self {
        Self::cst(T::infinity())
    }
    fn neg_infinity() -> Self {
        Self::cst(T::neg_infinity())
    }
    fn neg_zero() -> Self {
        Self::cst(T::neg_zero())
    }
    fn min_value() -> Self {
        Self::cst(T::min_value())
    }
    fn min_positive_value() -> Self {
        Self::cst(T::min_positive_value())
    }
    fn epsilon() -> Self {
        Self::cst(T::epsilon())
    }
    fn max_value() -> Self {
        Self::cst(T::max_value())
    }
    fn is_nan(self) -> bool {
        self.re.is_nan() || self.eps.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.re.is_infinite() || self.eps.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.eps.is_finite()
    }
    fn is_normal(self) -> bool {
        self.re.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.re.classify()
    }
    fn floor(self) -> Self {
        Self::cst(self.re.floor())
    }
    fn ceil(self) -> Self {
        Self::cst(self.re.ceil())
    }
    fn round(self) -> Self {
        Self::cst(self.re.round())
    }
    fn trunc(self) -> Self {
        Self::cst(self.re.trunc())
    }
    fn fract(self) -> Self {
        Self { re: self.re.fract(), eps: self.eps }
    }
    fn abs(self) -> Self {
        if self.re < T::zero() {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        Self::cst(self.re.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.re.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.re.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        let r = self.re.recip();
        self.chain(r, -r * r)
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let pm1 = self.re.powi(n - 1);
        self.chain(pm1 * self.re, T::from_i32(n).unwrap() * pm1)
    }
    fn powf(self, n: Self) -> Self {
        if n.eps.is_zero() {
            // constant exponent: avoid ln(x) so that x <= 0 stays finite
            let pm1 = self.re.powf(n.re - T::one());
            return self.chain(pm1 * self.re, n.re * pm1);
        }
        let v = self.re.powf(n.re);
        Self {
            re: v,
            eps: n.re * self.re.powf(n.re - T::one()) * self.eps + v * self.re.ln() * n.eps,
        }
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, T::one() / (s + s))
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn exp2(self) -> Self {
        let e = self.re.exp2();
        self.chain(e, e * T::lit(std::f64::consts::LN_2))
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), self.re.recip())
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn log2(self) -> Self {
        self.chain(self.re.log2(), (self.re * T::lit(std::f64::consts::LN_2)).recip())
    }
    fn log10(self) -> Self {
        self.chain(self.re.log10(), (self.re * T::lit(std::f64::consts::LN_10)).recip())
    }
    fn max(self, o: Self) -> Self {
        if o.re > self.re {
            o
        } else {
            self
        }
    }
    fn min(self, o: Self) -> Self {
        if o.re < self.re {
            o
        } else {
            self
        }
    }
    fn abs_sub(self, o: Self) -> Self {
        if self.re > o.re {
            self - o
        } else {
            Self::zero()
        }
    }
    fn cbrt(self) -> Self {
        let c = self.re.cbrt();
        self.chain(c, T::one() / (T::int(3) * c * c))
    }
    fn hypot(self, o: Self) -> Self {
        (self * self + o * o).sqrt()
    }
    fn sin(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(s, c)
    }
    fn cos(self) -> Self {
        let (s, c) = self.re.sin_cos();
        self.chain(c, -s)
    }
    fn tan(self) -> Self {
        let t = self.re.tan();
        self.chain(t, T::one() + t * t)
    }
    fn asin(self) -> Self {
        self.chain(self.re.asin(), (T::one() - self.re * self.re).sqrt().recip())
    }
    fn acos(self) -> Self {
        self.chain(self.re.acos(), -(T::one() - self.re * self.re).sqrt().recip())
    }
    fn atan(self) -> Self {
        self.chain(self.re.atan(), (T::one() + self.re * self.re).recip())
    }
    fn atan2(self, x: Self) -> Self {
        let d = self.re * self.re + x.re * x.re;
        Self {
            re: self.re.atan2(x.re),
            eps: (x.re * self.eps - self.re * x.eps) / d,
        }
    }
    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.re.sin_cos();
        (self.chain(s, c), self.chain(c, -s))
    }
    fn exp_m1(self) -> Self {
        self.chain(self.re.exp_m1(), self.re.exp())
    }
    fn ln_1p(self) -> Self {
        self.chain(self.re.ln_1p(), (T::one() + self.re).recip())
    }
    fn sinh(self) -> Self {
        self.chain(self.re.sinh(), self.re.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.re.cosh(), self.re.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        self.chain(t, T::one() - t * t)
    }
    fn asinh(self) -> Self {
        self.chain(self.re.asinh(), (self.re * self.re + T::one()).sqrt().recip())
    }
    fn acosh(self) -> Self {
        self.chain(self.re.acosh(), (self.re * self.re - T::one()).sqrt().recip())
    }
    fn atanh(self) -> Self {
        self.chain(self.re.atanh(), (T::one() - self.re * self.re).recip())
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.re.integer_decode()
    }
}

/// Value and first two derivatives of `f` along a line, `f(t)`, `f'(t)`, `f''(t)`.
pub fn second_derivative<T: Real>(t: T, f: impl Fn(Dual<Dual<T>>) -> Dual<Dual<T>>) -> (T, T, T) {
    let x = Dual::new(Dual::var(t), Dual::cst(T::one()));
    let y = f(x);
    (y.re.re, y.re.eps, y.eps.eps)
}

/// Value and derivative of `f` at `t`.
pub fn derivative<T: Real>(t: T, f: impl Fn(Dual<T>) -> Dual<T>) -> (T, T) {
    let y = f(Dual::var(t));
    (y.re, y.eps)
}
