//! Zonal harmonics on `Sⁿ` and the nodal transform.

use serde::{Deserialize, Serialize};

use crate::curvature::{CoordBox, ScalarField};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_gegenbauer, gegenbauer_recurrence};
use crate::scalar::{Base, Lift};
use crate::special::{gegenbauer_mass, sphere_volume};

/// A zonal function `Σ_{k≤K} c_k Y_k(cos θ)` on `Sⁿ`, with `{Y_k}` orthonormal
/// for the round measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ZonalRecord<T>", into = "ZonalRecord<T>")]
#[serde(bound(serialize = "T: Serialize + Clone", deserialize = "T: Deserialize<'de>"))]
pub struct ZonalField<T> {
    pub n: u32,
    pub coeffs: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct ZonalRecord<T> {
    n: u32,
    #[serde(rename = "K")]
    k: usize,
    coeffs: Vec<T>,
}

impl<T> TryFrom<ZonalRecord<T>> for ZonalField<T> {
    type Error = String;

    fn try_from(r: ZonalRecord<T>) -> std::result::Result<Self, String> {
        if r.coeffs.len() != r.k + 1 {
            return Err(format!("K = {} but {} coefficients", r.k, r.coeffs.len()));
        }
        if r.n < 5 {
            return Err(format!("dimension {} < 5", r.n));
        }
        Ok(Self { n: r.n, coeffs: r.coeffs })
    }
}

impl<T> From<ZonalField<T>> for ZonalRecord<T> {
    fn from(f: ZonalField<T>) -> Self {
        Self { n: f.n, k: f.coeffs.len() - 1, coeffs: f.coeffs }
    }
}

impl<T: Base> ZonalField<T> {
    pub fn new(n: u32, coeffs: Vec<T>) -> Result<Self> {
        if n < 5 {
            return Err(Error::InvalidParameter(format!("dimension {n} < 5")));
        }
        if coeffs.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(Self { n, coeffs })
    }

    pub fn zeros(n: u32, k: usize) -> Self {
        Self { n, coeffs: vec![T::zero(); k + 1] }
    }

    /// The constant `c`, of degree `k`.
    pub fn constant(n: u32, k: usize, c: T) -> Self {
        let mut f = Self::zeros(n, k);
        f.coeffs[0] = c * sphere_volume::<T>(n).sqrt();
        f
    }

    /// `Y_j` padded to degree `k`.
    pub fn harmonic(n: u32, k: usize, j: usize) -> Self {
        let mut f = Self::zeros(n, k.max(j));
        f.coeffs[j] = T::one();
        f
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Truncates or zero-pads to degree `k`.
    pub fn resized(&self, k: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(k + 1, T::zero());
        Self { n: self.n, coeffs: c }
    }

    pub fn axpy(&self, a: T, other: &Self) -> Self {
        let k = self.degree().max(other.degree());
        let mut out = self.resized(k);
        for (o, &c) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o = *o + a * c;
        }
        out
    }

    pub fn scale(&self, a: T) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|&c| a * c).collect() }
    }

    /// `Σ c_k²`, the `L²(Sⁿ)` norm squared.
    pub fn l2_norm2(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |s, &c| s + c * c)
    }
}

/// `p_0` and the recurrence of the orthonormal family, enough to evaluate any
/// degree up to `len − 1` at any point.
#[derive(Clone, Debug)]
pub struct ZonalRecurrence<T> {
    pub n: u32,
    /// `Y_0 = 1/√ω_n`.
    pub y0: T,
    /// `x Y_k = a_{k+1} Y_{k+1} + a_k Y_{k−1}`.
    pub a: Vec<T>,
}

impl<T: Base> ZonalRecurrence<T> {
    pub fn new(n: u32, len: usize) -> Self {
        let two_lambda = n - 1;
        let mass = gegenbauer_mass::<T>(two_lambda);
        let y0 = (mass * sphere_volume::<T>(n - 1)).sqrt().recip();
        Self { n, y0, a: gegenbauer_recurrence(len.max(2), two_lambda) }
    }

    /// `Σ c_k Y_k(x)` by the three-term recurrence.
    pub fn eval<S: Lift<T>>(&self, coeffs: &[T], x: S) -> S {
        assert!(coeffs.len() <= self.a.len(), "recurrence table too short");
        let mut prev = S::zero();
        let mut cur = S::lift(self.y0);
        let mut s = cur * S::lift(coeffs[0]);
        for k in 1..coeffs.len() {
            let next = (x * cur - S::lift(self.a[k - 1]) * prev) / S::lift(self.a[k]);
            prev = cur;
            cur = next;
            s = s + cur * S::lift(coeffs[k]);
        }
        s
    }

    /// `Y_0(x), …, Y_{len−1}(x)`.
    pub fn values(&self, x: T, len: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(len);
        let mut prev = T::zero();
        let mut cur = self.y0;
        out.push(cur);
        for k in 1..len {
            let next = (x * cur - self.a[k - 1] * prev) / self.a[k];
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }
}

/// Result of projecting nodal values onto degrees `≤ K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Clone", deserialize = "T: Deserialize<'de>"))]
pub struct Projection<T> {
    pub field: ZonalField<T>,
    /// `Σ_{K<k≤2K} c_k²`, computed from the same nodes.
    pub tail_energy: T,
    /// `∫ f²` by nodal quadrature.
    pub total_energy: T,
}

impl<T: Base> Projection<T> {
    pub fn relative_tail(&self) -> T {
        if self.total_energy > T::zero() {
            self.tail_energy / self.total_energy
        } else {
            T::zero()
        }
    }

    /// Whether the discarded tail exceeds `1e-6` of the total.
    pub fn truncation_dominated(&self) -> bool {
        self.relative_tail() > T::lit(1e-6)
    }
}

/// Nodes, weights and basis table for degree `K` with `M` Gauss–Gegenbauer nodes
/// in `x = cos θ`. Immutable once built.
#[derive(Clone, Debug)]
pub struct ZonalBasis<T> {
    pub n: u32,
    pub k_max: usize,
    pub nodes: Vec<T>,
    /// Weights of the full `Sⁿ` measure.
    pub weights: Vec<T>,
    pub recurrence: ZonalRecurrence<T>,
    /// Row `j` holds `Y_0..Y_{width−1}` at node `j`.
    table: Vec<T>,
    width: usize,
}

impl<T: Base> ZonalBasis<T> {
    /// `m` nodes for degree `k`; requires `m ≥ k + 1`.
    pub fn new(n: u32, k: usize, m: usize) -> Result<Self> {
        if n < 5 {
            return Err(Error::InvalidParameter(format!("dimension {n} < 5")));
        }
        if m <= k {
            return Err(Error::InvalidParameter(format!("{m} nodes cannot resolve degree {k}")));
        }
        let rule = gauss_gegenbauer::<T>(m, n - 1)?;
        let w1 = sphere_volume::<T>(n - 1);
        // tail coefficients up to 2K stay exact while 2K + deg(f) < 2M
        let width = (2 * k + 1).min(m);
        let rec = ZonalRecurrence::new(n, width.max(k + 2) + 1);
        let mut table = Vec::with_capacity(m * width);
        for &x in &rule.nodes {
            table.extend(rec.values(x, width));
        }
        Ok(Self {
            n,
            k_max: k,
            nodes: rule.nodes,
            weights: rule.weights.iter().map(|&w| w * w1).collect(),
            recurrence: rec,
            table,
            width,
        })
    }

    /// Degree `k` with `4k` nodes.
    pub fn with_oversampling(n: u32, k: usize) -> Result<Self> {
        Self::new(n, k, (4 * k).max(8))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn row(&self, j: usize) -> &[T] {
        &self.table[j * self.width..(j + 1) * self.width]
    }

    /// Values of `f` at the nodes.
    pub fn nodal(&self, f: &ZonalField<T>) -> Vec<T> {
        if f.coeffs.len() <= self.width {
            (0..self.len())
                .map(|j| self.row(j).iter().zip(&f.coeffs).fold(T::zero(), |s, (&y, &c)| s + y * c))
                .collect()
        } else {
            self.nodes.iter().map(|&x| self.eval(f, x)).collect()
        }
    }

    /// `f(x)` at an arbitrary `x ∈ [−1, 1]`.
    pub fn eval(&self, f: &ZonalField<T>, x: T) -> T {
        if f.coeffs.len() < self.recurrence.a.len() {
            self.recurrence.eval(&f.coeffs, x)
        } else {
            ZonalRecurrence::new(self.n, f.coeffs.len() + 1).eval(&f.coeffs, x)
        }
    }

    /// `∫_{Sⁿ} g dμ` from nodal values.
    pub fn integrate(&self, values: &[T]) -> T {
        values.iter().zip(&self.weights).fold(T::zero(), |s, (&v, &w)| s + v * w)
    }

    /// Projects nodal values onto degrees `≤ K`.
    pub fn project(&self, values: &[T]) -> Projection<T> {
        let mut c = vec![T::zero(); self.width];
        for (j, (&v, &w)) in values.iter().zip(&self.weights).enumerate() {
            let vw = v * w;
            for (ck, &y) in c.iter_mut().zip(self.row(j)) {
                *ck = *ck + vw * y;
            }
        }
        let tail_energy = c[self.k_max + 1..].iter().fold(T::zero(), |s, &x| s + x * x);
        c.truncate(self.k_max + 1);
        let total_energy = self.integrate(&values.iter().map(|&v| v * v).collect::<Vec<_>>());
        Projection { field: ZonalField { n: self.n, coeffs: c }, tail_energy, total_energy }
    }

    /// Projects `g(x)` evaluated at every node.
    pub fn project_fn(&self, g: impl Fn(T) -> T) -> Projection<T> {
        let v: Vec<T> = self.nodes.iter().map(|&x| g(x)).collect();
        self.project(&v)
    }
}

/// A zonal field seen on the stereographic chart of the unit sphere, where
/// `cos θ = (1 − |y|²)/(1 + |y|²)`.
#[derive(Clone, Debug)]
pub struct ZonalChartField<T> {
    pub field: ZonalField<T>,
    rec: ZonalRecurrence<T>,
}

impl<T: Base> ZonalChartField<T> {
    pub fn new(field: ZonalField<T>) -> Self {
        let rec = ZonalRecurrence::new(field.n, field.coeffs.len() + 1);
        Self { field, rec }
    }
}

impl<T: Base> ScalarField<T> for ZonalChartField<T> {
    fn value<S: Lift<T>>(&self, y: &[S]) -> S {
        let r2 = y.iter().fold(S::zero(), |s, &v| s + v * v);
        let x = (S::one() - r2) / (S::one() + r2);
        self.rec.eval(&self.field.coeffs, x)
    }

    fn support(&self) -> Option<CoordBox<T>> {
        None
    }
}
