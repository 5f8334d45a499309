//! Ladder-operator algebra in the truncated Fock basis.
//!
//! Quadratures follow `x = (a + a†)/√2`, `p = (a - a†)/(i√2)`, so that
//! `[x, p] = i` and the vacuum covariance matrix is `½·1`.

use super::{Dim, Obs};
use crate::error::Result;
use crate::linalg::{re, CMatrix, CVector, C64};

/// One of the two canonical quadratures. Both are tridiagonal in the Fock
/// basis with zero diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    /// Matrix element `⟨n+1| Q |n⟩`.
    #[inline]
    pub fn lower(self, n: usize) -> C64 {
        let s = ((n + 1) as f64 / 2.0).sqrt();
        match self {
            Quadrature::X => re(s),
            Quadrature::P => C64::new(0.0, s),
        }
    }

    /// Matrix element `⟨n| Q |n+1⟩`.
    #[inline]
    pub fn upper(self, n: usize) -> C64 {
        self.lower(n).conj()
    }

    /// `Q·v`, O(d).
    pub fn apply(self, v: &CVector) -> CVector {
        let d = v.len();
        CVector::from_fn(d, |i, _| {
            let mut acc = C64::new(0.0, 0.0);
            if i > 0 {
                acc += self.lower(i - 1) * v[i - 1];
            }
            if i + 1 < d {
                acc += self.upper(i) * v[i + 1];
            }
            acc
        })
    }

    /// `Q·M`, O(d²).
    pub fn left_mul(self, m: &CMatrix) -> CMatrix {
        let d = m.nrows();
        CMatrix::from_fn(d, m.ncols(), |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            if i > 0 {
                acc += self.lower(i - 1) * m[(i - 1, j)];
            }
            if i + 1 < d {
                acc += self.upper(i) * m[(i + 1, j)];
            }
            acc
        })
    }

    /// `Tr[M·Q]`, O(d).
    pub fn trace_with(self, m: &CMatrix) -> C64 {
        let d = m.nrows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d.saturating_sub(1) {
            // M_{i,i+1} Q_{i+1,i} + M_{i+1,i} Q_{i,i+1}
            acc += m[(i, i + 1)] * self.lower(i) + m[(i + 1, i)] * self.upper(i);
        }
        acc
    }

    pub fn matrix(self, d: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, d);
        for n in 0..d.saturating_sub(1) {
            m[(n + 1, n)] = self.lower(n);
            m[(n, n + 1)] = self.upper(n);
        }
        m
    }
}

/// Annihilation operator, `a|n⟩ = √n |n-1⟩`.
pub fn annihilation(d: usize) -> CMatrix {
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = re((n as f64).sqrt());
    }
    a
}

pub fn number(d: usize) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_fn(d, |n, _| re(n as f64)))
}

/// Matrix representations of `x`, `p` and `n = a†a` on `d` levels.
#[derive(Debug, Clone)]
pub struct Quadratures {
    pub x: Obs,
    pub p: Obs,
    pub n: Obs,
}

pub fn quadrature_ops(d: usize) -> Result<Quadratures> {
    let d = Dim::new(d)?.get();
    Ok(Quadratures {
        x: Obs::from_trusted(Quadrature::X.matrix(d)),
        p: Obs::from_trusted(Quadrature::P.matrix(d)),
        n: Obs::from_trusted(number(d)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, I};

    #[test]
    fn two_level_position() {
        let q = quadrature_ops(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(2, 2, &[re(0.0), re(h), re(h), re(0.0)]);
        assert!(max_abs(&(q.x.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn rejects_dimension_below_two() {
        assert!(quadrature_ops(1).is_err());
        assert!(quadrature_ops(0).is_err());
    }

    #[test]
    fn vacuum_energy_is_zero() {
        let q = quadrature_ops(16).unwrap();
        assert_eq!(q.n.matrix()[(0, 0)], re(0.0));
    }

    #[test]
    fn number_operator_from_quadratures_below_edge() {
        let d = 16;
        let q = quadrature_ops(d).unwrap();
        let x = q.x.matrix();
        let p = q.p.matrix();
        let from_quad = (x * x + p * p - CMatrix::identity(d, d)) * re(0.5);
        let diff = from_quad - q.n.matrix();
        let inner = diff.view((0, 0), (d - 2, d - 2)).into_owned();
        assert!(max_abs(&inner) < 1e-12);
    }

    #[test]
    fn canonical_commutator_below_edge() {
        for d in [4, 9, 32] {
            let q = quadrature_ops(d).unwrap();
            let x = q.x.matrix();
            let p = q.p.matrix();
            let comm = x * p - p * x - CMatrix::identity(d, d) * I;
            let inner = comm.view((0, 0), (d - 2, d - 2)).into_owned();
            assert!(max_abs(&inner) < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn momentum_matches_ladder_definition() {
        let d = 10;
        let a = annihilation(d);
        let p = (&a - a.adjoint()) * (C64::new(0.0, -1.0) * std::f64::consts::FRAC_1_SQRT_2);
        assert!(max_abs(&(p - Quadrature::P.matrix(d))) < 1e-15);
        let x = (&a + a.adjoint()) * re(std::f64::consts::FRAC_1_SQRT_2);
        assert!(max_abs(&(x - Quadrature::X.matrix(d))) < 1e-15);
    }

    #[test]
    fn sparse_products_match_dense() {
        let d = 7;
        let m = CMatrix::from_fn(d, d, |i, j| C64::new((i + 2 * j) as f64, (i as f64) - 0.5 * j as f64));
        let v = CVector::from_fn(d, |i, _| C64::new(i as f64, 1.0));
        for q in [Quadrature::X, Quadrature::P] {
            let dense = q.matrix(d);
            assert!(max_abs(&(q.left_mul(&m) - &dense * &m)) < 1e-12);
            assert!((q.apply(&v) - &dense * &v).norm() < 1e-12);
            assert!((q.trace_with(&m) - (&m * &dense).trace()).norm() < 1e-12);
        }
    }
}
