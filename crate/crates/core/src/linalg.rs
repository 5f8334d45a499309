//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `(A + A†) / 2`
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * re(0.5)
}

/// Largest entrywise deviation from Hermiticity, `max |A_ij - conj(A_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}

/// Spectral decomposition `A = V diag(values) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

/// Entries below this fraction of the largest one are zeroed before an
/// eigen-decomposition. Far Fock tails of squeezed states reach 1e-200 and
/// below, and the QR iteration overflows on them.
const FLUSH_RELATIVE: f64 = 1e-30;

/// Eigen-decomposition of a Hermitian matrix. Purely real input takes the
/// (faster) real-symmetric path.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let mut h = hermitize(m);
    let floor = max_abs(&h) * FLUSH_RELATIVE;
    h.iter_mut()
        .filter(|z| z.norm() < floor)
        .for_each(|z| *z = C64::new(0.0, 0.0));
    if h.iter().all(|z| z.im == 0.0) {
        let eig = h.map(|z| z.re).symmetric_eigen();
        finite(HermitianEigen {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors.map(re),
        })
    } else {
        let eig = h.symmetric_eigen();
        finite(HermitianEigen {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }
}

fn finite(eig: HermitianEigen) -> Result<HermitianEigen> {
    let ok =
        eig.values.iter().all(|v| v.is_finite()) && eig.vectors.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    if ok {
        Ok(eig)
    } else {
        Err(Error::InternalInconsistency(
            "eigen-decomposition produced non-finite values".into(),
        ))
    }
}

/// `exp(-i t H)` for a real symmetric `H`.
pub fn expm_i_real_symmetric(h: &DMatrix<f64>, t: f64) -> CMatrix {
    let floor = h.amax() * FLUSH_RELATIVE;
    let eig = h.map(|v| if v.abs() < floor { 0.0 } else { v }).symmetric_eigen();
    let v = eig.eigenvectors.map(re);
    let phases = eig.eigenvalues.map(|lam| C64::from_polar(1.0, -t * lam));
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// `diag(d) · M · diag(d)†` for a diagonal unitary `diag(d)`.
pub(crate) fn conjugate_by_diagonal(m: &CMatrix, d: &[C64]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| d[i] * m[(i, j)] * d[j].conj())
}

/// Eigenvalues of a general complex 2x2 matrix.
pub(crate) fn eigenvalues_2x2(m: &nalgebra::Matrix2<C64>) -> [C64; 2] {
    let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (half_tr * half_tr - det).sqrt();
    [half_tr + disc, half_tr - disc]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_survives_subnormal_entries() {
        let d = 300;
        let v = CVector::from_fn(d, |n, _| re(0.2f64.powi(n as i32 / 2)));
        let v = &v / re(v.norm());
        let e = hermitian_eigen(&(&v * v.adjoint())).unwrap();
        assert!(e.values.iter().all(|x| x.is_finite()));
        assert!((e.values.max() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_symmetric_exponential_is_unitary() {
        let h = DMatrix::from_fn(6, 6, |i, j| ((i + j) as f64).cos() + if i == j { 1.0 } else { 0.0 });
        let h = (&h + h.transpose()) * 0.5;
        let u = expm_i_real_symmetric(&h, 0.7);
        let id = CMatrix::identity(6, 6);
        assert!(max_abs(&(u.adjoint() * &u - id)) < 1e-12);
    }

    #[test]
    fn exponential_of_diagonal_is_phase() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0, 2.0]));
        let u = expm_i_real_symmetric(&h, 0.5);
        for k in 0..3 {
            let expected = C64::from_polar(1.0, -0.5 * k as f64);
            assert!((u[(k, k)] - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn complex_eigen_reconstructs() {
        let m = CMatrix::from_fn(5, 5, |i, j| C64::new((i * j) as f64, i as f64 - j as f64));
        let h = hermitize(&m);
        let eig = hermitian_eigen(&h).unwrap();
        let d = CMatrix::from_diagonal(&eig.values.map(re));
        let back = &eig.vectors * d * eig.vectors.adjoint();
        assert!(max_abs(&(back - h)) < 1e-10);
    }
}
