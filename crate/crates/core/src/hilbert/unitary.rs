use super::{Dim, Ket, Quadrature};
use crate::error::{Error, Result};
use crate::linalg::{conjugate_by_diagonal, expm_i_real_symmetric, CMatrix, C64};

/// `e^{-i p0 x} e^{-i x0 p}` on `d` levels.
///
/// Both exponentials come from one real-symmetric eigen-decomposition of
/// `x`: with `F = diag(iⁿ)` one has `p = F x F†`.
pub fn displacement_unitary(x0: f64, p0: f64, d: usize) -> Result<CMatrix> {
    let d = Dim::new(d)?.get();
    if !x0.is_finite() || !p0.is_finite() {
        return Err(Error::invalid("displacement must be finite"));
    }
    let x = Quadrature::X.matrix(d).map(|z| z.re);
    let boost = expm_i_real_symmetric(&x, p0);
    let phases: Vec<C64> = (0..d).map(|n| C64::new(0.0, 1.0).powi(n as i32)).collect();
    let shift = conjugate_by_diagonal(&expm_i_real_symmetric(&x, x0), &phases);
    Ok(boost * shift)
}

/// `U|ψ⟩`, renormalizing away truncation loss.
pub fn apply_unitary(u: &CMatrix, ket: &Ket) -> Result<Ket> {
    if u.nrows() != ket.amplitudes().len() || !u.is_square() {
        return Err(Error::invalid("unitary and ket dimensions differ"));
    }
    Ket::normalized(u * ket.amplitudes())
}
