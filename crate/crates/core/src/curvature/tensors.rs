//! Pointwise curvature algebra from a metric jet.
//!
//! Conventions: `Γ_{k,ij} = ½(∂_i g_jk + ∂_j g_ik − ∂_k g_ij)`,
//! `R_abcd = ½(∂_b∂_c g_ad + ∂_a∂_d g_bc − ∂_b∂_d g_ac − ∂_a∂_c g_bd)
//!          + Γ_{p,bc}Γ^p_ad − Γ_{p,bd}Γ^p_ac`,
//! `Ric_bd = g^{ac} R_abcd`, so the unit sphere has `R_abcd = g_ac g_bd − g_ad g_bc`.

use std::ops::{Index, IndexMut};

use crate::curvature::diff::MetricJet;
use crate::linalg::Mat;
use crate::scalar::Real;

/// Christoffel symbols of both kinds and the inverse metric.
#[derive(Clone, Debug)]
pub struct Connection<S> {
    n: usize,
    pub ginv: Mat<S>,
    first: Vec<S>,
    second: Vec<S>,
}

impl<S: Real> Connection<S> {
    /// `None` if the metric is singular.
    pub fn new(jet: &MetricJet<S>) -> Option<Self> {
        let n = jet.dim();
        let ginv = jet.g.inverse()?;
        let mut first = vec![S::zero(); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v = (jet.dg[i][(j, k)] + jet.dg[j][(i, k)] - jet.dg[k][(i, j)]) / S::int(2);
                    first[(k * n + i) * n + j] = v;
                    first[(k * n + j) * n + i] = v;
                }
            }
        }
        let mut second = vec![S::zero(); n * n * n];
        for m in 0..n {
            for k in 0..n {
                let gmk = ginv[(m, k)];
                if gmk == S::zero() && gmk.is_zero() {
                    continue;
                }
                for ij in 0..n * n {
                    second[m * n * n + ij] = second[m * n * n + ij] + gmk * first[k * n * n + ij];
                }
            }
        }
        Some(Self { n, ginv, first, second })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ_{k,ij}`.
    #[inline]
    pub fn lower(&self, k: usize, i: usize, j: usize) -> S {
        self.first[(k * self.n + i) * self.n + j]
    }

    /// `Γ^k_ij`.
    #[inline]
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> S {
        self.second[(k * self.n + i) * self.n + j]
    }

    /// `b^k = g^{ij} Γ^k_ij`, so that `Δf = g^{ij}∂_i∂_j f − b^k ∂_k f`.
    pub fn trace_vector(&self) -> Vec<S> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut s = S::zero();
                for i in 0..n {
                    for j in 0..n {
                        s = s + self.ginv[(i, j)] * self.gamma(k, i, j);
                    }
                }
                s
            })
            .collect()
    }
}

/// A dense rank-4 tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Real> Tensor4<S> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![S::zero(); n * n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |m, v| m.max(v.abs()))
    }

    pub fn map<R>(&self, f: impl FnMut(&S) -> R) -> Tensor4<R> {
        Tensor4 { n: self.n, data: self.data.iter().map(f).collect() }
    }

    /// Full contraction `g^{ae}g^{bf}g^{cg}g^{dh} T_abcd T_efgh`.
    pub fn norm2(&self, ginv: &Mat<S>) -> S {
        let n = self.n;
        // raise all indices one at a time
        let mut t = self.clone();
        for slot in 0..4 {
            let mut r = Tensor4::zeros(n);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let idx = [a, b, c, d];
                            let mut s = S::zero();
                            for e in 0..n {
                                let mut j = idx;
                                j[slot] = e;
                                s = s + ginv[(idx[slot], e)] * t[(j[0], j[1], j[2], j[3])];
                            }
                            r[(a, b, c, d)] = s;
                        }
                    }
                }
            }
            t = r;
        }
        self.data.iter().zip(&t.data).fold(S::zero(), |s, (&a, &b)| s + a * b)
    }
}

impl<S> Index<(usize, usize, usize, usize)> for Tensor4<S> {
    type Output = S;
    #[inline]
    fn index(&self, (a, b, c, d): (usize, usize, usize, usize)) -> &S {
        &self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }
}

impl<S> IndexMut<(usize, usize, usize, usize)> for Tensor4<S> {
    #[inline]
    fn index_mut(&mut self, (a, b, c, d): (usize, usize, usize, usize)) -> &mut S {
        &mut self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }
}

/// Full Riemann tensor `R_abcd` from a second-order jet.
pub fn riemann<S: Real>(jet: &MetricJet<S>, conn: &Connection<S>) -> Tensor4<S> {
    let n = jet.dim();
    let half = S::lit(0.5);
    let mut r = Tensor4::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = half
                        * (jet.d2(b, c, a, d) + jet.d2(a, d, b, c) - jet.d2(b, d, a, c) - jet.d2(a, c, b, d));
                    for p in 0..n {
                        v = v + conn.lower(p, b, c) * conn.gamma(p, a, d) - conn.lower(p, b, d) * conn.gamma(p, a, c);
                    }
                    r[(a, b, c, d)] = v;
                }
            }
        }
    }
    r
}

/// `Ric_bd = g^{ac} R_abcd` by contraction of a stored Riemann tensor.
pub fn ricci_from_riemann<S: Real>(riem: &Tensor4<S>, ginv: &Mat<S>) -> Mat<S> {
    let n = riem.dim();
    Mat::from_fn(n, |b, d| {
        let mut s = S::zero();
        for a in 0..n {
            for c in 0..n {
                s = s + ginv[(a, c)] * riem[(a, b, c, d)];
            }
        }
        s
    })
}

/// Ricci tensor straight from the jet in `O(n⁴)`, without forming `R_abcd`.
pub fn ricci<S: Real>(jet: &MetricJet<S>, conn: &Connection<S>) -> Mat<S> {
    let n = jet.dim();
    let gi = &conn.ginv;
    let bvec = conn.trace_vector();
    // Γ^{pc}_d = g^{ca} Γ^p_ad
    let mut up = vec![S::zero(); n * n * n];
    for p in 0..n {
        for c in 0..n {
            for d in 0..n {
                let mut s = S::zero();
                for a in 0..n {
                    s = s + gi[(c, a)] * conn.gamma(p, a, d);
                }
                up[(p * n + c) * n + d] = s;
            }
        }
    }
    let half = S::lit(0.5);
    let mut ric = Mat::zeros(n);
    for b in 0..n {
        for d in b..n {
            let mut s = S::zero();
            for a in 0..n {
                for c in 0..n {
                    let gac = gi[(a, c)];
                    let h = jet.d2(b, c, a, d) + jet.d2(a, d, b, c) - jet.d2(b, d, a, c) - jet.d2(a, c, b, d);
                    s = s + half * gac * h;
                }
            }
            for p in 0..n {
                for c in 0..n {
                    s = s + conn.lower(p, b, c) * up[(p * n + c) * n + d];
                }
                s = s - conn.lower(p, b, d) * bvec[p];
            }
            ric[(b, d)] = s;
            ric[(d, b)] = s;
        }
    }
    ric
}

/// `tr_g T = g^{ij} T_ij`.
pub fn trace<S: Real>(t: &Mat<S>, ginv: &Mat<S>) -> S {
    let n = t.dim();
    let mut s = S::zero();
    for i in 0..n {
        for j in 0..n {
            s = s + ginv[(i, j)] * t[(i, j)];
        }
    }
    s
}

/// `|T|²_g = g^{ac} g^{bd} T_ab T_cd`.
pub fn norm2<S: Real>(t: &Mat<S>, ginv: &Mat<S>) -> S {
    let up = ginv.matmul(t).matmul(ginv);
    let n = t.dim();
    let mut s = S::zero();
    for i in 0..n {
        for j in 0..n {
            s = s + up[(i, j)] * t[(i, j)];
        }
    }
    s
}

/// `A = (Ric − R/(2(n−1)) g)/(n−2)`.
pub fn schouten<S: Real>(ric: &Mat<S>, r: S, g: &Mat<S>) -> Mat<S> {
    let n = S::int(g.dim() as i64);
    let c = r / (S::int(2) * (n - S::one()));
    Mat::from_fn(g.dim(), |i, j| (ric[(i, j)] - c * g[(i, j)]) / (n - S::int(2)))
}

/// `W = Riem − A ⊙ g` (Kulkarni–Nomizu product).
pub fn weyl<S: Real>(riem: &Tensor4<S>, a: &Mat<S>, g: &Mat<S>) -> Tensor4<S> {
    let n = riem.dim();
    let mut w = Tensor4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let kn = a[(i, k)] * g[(j, l)] + a[(j, l)] * g[(i, k)] - a[(i, l)] * g[(j, k)] - a[(j, k)] * g[(i, l)];
                    w[(i, j, k, l)] = riem[(i, j, k, l)] - kn;
                }
            }
        }
    }
    w
}

/// Q-curvature from `R`, `|Ric|²` and `ΔR`:
/// `−ΔR/(2(n−1)) + (n³−4n²+16n−16)/(8(n−1)²(n−2)²) R² − 2/(n−2)² |Ric|²`.
pub fn q_curvature<S: Real>(n: usize, r: S, ric_norm2: S, lap_r: S) -> S {
    let nn = S::int(n as i64);
    let n1 = nn - S::one();
    let n2 = nn - S::int(2);
    let c2 = (nn * nn * nn - S::int(4) * nn * nn + S::int(16) * nn - S::int(16)) / (S::int(8) * n1 * n1 * n2 * n2);
    -lap_r / (S::int(2) * n1) + c2 * r * r - S::int(2) / (n2 * n2) * ric_norm2
}

/// Largest violation of the algebraic Riemann symmetries.
pub fn symmetry_residual<S: Real>(r: &Tensor4<S>) -> S {
    let n = r.dim();
    let mut m = S::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = r[(a, b, c, d)];
                    m = m
                        .max((v + r[(b, a, c, d)]).abs())
                        .max((v + r[(a, b, d, c)]).abs())
                        .max((v - r[(c, d, a, b)]).abs())
                        .max((v + r[(a, c, d, b)] + r[(a, d, b, c)]).abs());
                }
            }
        }
    }
    m
}

/// Largest metric trace of `W` over all six index pairs.
pub fn trace_residual<S: Real>(w: &Tensor4<S>, ginv: &Mat<S>) -> S {
    let n = w.dim();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut m = S::zero();
    for &(p, q) in &pairs {
        let free: Vec<usize> = (0..4).filter(|s| *s != p && *s != q).collect();
        for x in 0..n {
            for y in 0..n {
                let mut s = S::zero();
                for i in 0..n {
                    for j in 0..n {
                        let mut idx = [0; 4];
                        idx[p] = i;
                        idx[q] = j;
                        idx[free[0]] = x;
                        idx[free[1]] = y;
                        s = s + ginv[(i, j)] * w[(idx[0], idx[1], idx[2], idx[3])];
                    }
                }
                m = m.max(s.abs());
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_q_simplifies() {
        // R = n(n−1), |Ric|² = n(n−1)², ΔR = 0 ⇒ Q = n(n²−4)/8
        for n in 5..16usize {
            let nf = n as f64;
            let q = q_curvature(n, nf * (nf - 1.0), nf * (nf - 1.0).powi(2), 0.0);
            assert!((q - nf * (nf * nf - 4.0) / 8.0).abs() < 1e-12 * q, "n = {n}");
        }
    }

    #[test]
    fn product_q_value() {
        let q = q_curvature(8, 24.0_f64, 72.0, 0.0);
        assert!((q - 540.0 / 49.0).abs() < 1e-13);
    }

    #[test]
    fn q_formula_in_exact_arithmetic_shape() {
        // f32 still reproduces the sphere value closely
        let q = q_curvature(8, 56.0_f32, 392.0, 0.0);
        assert!((q - 60.0).abs() < 1e-4);
    }
}
