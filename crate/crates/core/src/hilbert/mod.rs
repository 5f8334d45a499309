//! Truncated Fock-basis engine: state types, standard states, expectations
//! and truncation diagnostics.
//!
//! Operators are built exactly on `d` levels. Their top rows are wrong by
//! construction (`x²` and `p²` only act correctly on `|0⟩…|d-3⟩`), so every
//! derived quantity goes through [`tail_gate`] first.

mod diagnostics;
mod ops;
mod states;
mod unitary;

pub use diagnostics::{
    expectation, mean_energy, tail_gate, tail_mass, tail_window, wigner_origin, TailCheck, TAIL_FAIL, TAIL_WARN,
};
pub use ops::{annihilation, number, quadrature_ops, Quadrature, Quadratures};
pub use states::{
    coherent, fock, fock_diagonal, mix, photon_added_thermal, squeezed_mixture, squeezed_vacuum, superpose, thermal,
};
pub use unitary::{apply_unitary, displacement_unitary};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermiticity_defect, hermitize, re, trace, CMatrix, CVector, C64};

/// Truncation dimension: basis `|0⟩…|d-1⟩`, `d ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dim(usize);

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid(format!("dimension must be at least 2, got {d}")));
        }
        Ok(Dim(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

const KET_NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Obs {
    matrix: CMatrix,
}

impl Obs {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("observable must be square"));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::invalid(format!(
                "observable is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(Obs::from_trusted(matrix))
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Obs {
            matrix: hermitize(&matrix),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: CVector,
}

impl Ket {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amps: CVector) -> Result<Self> {
        Dim::new(amps.len())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::invalid(format!("ket norm is {norm}, expected 1")));
        }
        Ok(Ket { amps })
    }

    /// Normalizes arbitrary amplitudes.
    pub fn normalized(amps: CVector) -> Result<Self> {
        Dim::new(amps.len())?;
        let norm = amps.norm();
        if norm <= 1e-12 {
            return Err(Error::DegenerateInput("cannot normalize a zero vector".into()));
        }
        Ok(Ket {
            amps: amps.unscale(norm),
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn fidelity(&self, other: &Ket) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn to_densop(&self) -> DensOp {
        DensOp::from_trusted(&self.amps * self.amps.adjoint())
    }
}

/// Density operator: Hermitian, positive semi-definite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensOp {
    matrix: CMatrix,
}

impl DensOp {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("density matrix must be square"));
        }
        Dim::new(matrix.nrows())?;
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::invalid(format!(
                "density matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = trace(&matrix);
        if (tr - re(1.0)).norm() > TRACE_TOL {
            return Err(Error::invalid(format!("density matrix trace is {tr}, expected 1")));
        }
        let rho = DensOp::from_trusted(matrix);
        let min_eig = hermitian_eigen(&rho.matrix)?.values.min();
        if min_eig < -PSD_TOL {
            return Err(Error::invalid(format!(
                "density matrix has eigenvalue {min_eig:.3e} < 0"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        DensOp {
            matrix: hermitize(&matrix),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Largest modulus of an off-diagonal entry.
    pub fn off_diagonal_max(&self) -> f64 {
        let d = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }
}

/// Finite convex combination of pure states, `Σ w_i |ψ_i⟩⟨ψ_i|`.
///
/// Keeps low-rank mixtures cheap at dimensions where a dense `d×d` density
/// matrix and its eigen-decomposition would dominate the cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    terms: Vec<(f64, Ket)>,
}

impl Ensemble {
    pub fn new(terms: Vec<(f64, Ket)>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::invalid("empty ensemble"))?;
        let d = first.1.amps.len();
        if terms.iter().any(|(_, k)| k.amps.len() != d) {
            return Err(Error::invalid("ensemble members have different dimensions"));
        }
        check_weights(terms.iter().map(|(w, _)| *w))?;
        Ok(Ensemble { terms })
    }

    pub fn terms(&self) -> &[(f64, Ket)] {
        &self.terms
    }

    /// Columns `√w_i |ψ_i⟩`, so that `ρ = A A†`.
    pub fn factor(&self) -> CMatrix {
        let d = self.terms[0].1.amps.len();
        CMatrix::from_fn(d, self.terms.len(), |i, j| {
            let (w, ket) = &self.terms[j];
            ket.amps[i] * w.sqrt()
        })
    }
}

pub(crate) fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    check_weights_tol(weights, 1e-12)
}

pub(crate) fn check_weights_tol(weights: impl Iterator<Item = f64>, tol: f64) -> Result<()> {
    let mut total = 0.0;
    for w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::invalid(format!("mixture weight {w} is negative or not finite")));
        }
        total += w;
    }
    if (total - 1.0).abs() > tol {
        return Err(Error::invalid(format!("mixture weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// A probe in any of the supported representations.
#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    Pure(Ket),
    Mixed(DensOp),
    Ensemble(Ensemble),
}

impl From<Ket> for Probe {
    fn from(k: Ket) -> Self {
        Probe::Pure(k)
    }
}

impl From<DensOp> for Probe {
    fn from(r: DensOp) -> Self {
        Probe::Mixed(r)
    }
}

impl From<Ensemble> for Probe {
    fn from(e: Ensemble) -> Self {
        Probe::Ensemble(e)
    }
}

/// Raw first and second quadrature moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_p: f64,
    /// `⟨x²⟩`
    pub xx: f64,
    /// `⟨p²⟩`
    pub pp: f64,
    /// `⟨(xp + px)/2⟩`
    pub xp: f64,
    /// `⟨n⟩`
    pub n: f64,
}

impl Moments {
    fn scaled(self, w: f64) -> Self {
        Moments {
            mean_x: w * self.mean_x,
            mean_p: w * self.mean_p,
            xx: w * self.xx,
            pp: w * self.pp,
            xp: w * self.xp,
            n: w * self.n,
        }
    }

    fn add(self, o: Self) -> Self {
        Moments {
            mean_x: self.mean_x + o.mean_x,
            mean_p: self.mean_p + o.mean_p,
            xx: self.xx + o.xx,
            pp: self.pp + o.pp,
            xp: self.xp + o.xp,
            n: self.n + o.n,
        }
    }

    pub fn var_x(&self) -> f64 {
        self.xx - self.mean_x * self.mean_x
    }

    pub fn var_p(&self) -> f64 {
        self.pp - self.mean_p * self.mean_p
    }

    pub fn cov_xp(&self) -> f64 {
        self.xp - self.mean_x * self.mean_p
    }
}

/// Common read-only view of a quantum state.
pub trait State {
    fn dim(&self) -> usize;

    /// Fock-basis populations `⟨n|ρ|n⟩`.
    fn populations(&self) -> Vec<f64>;

    /// `Tr[ρ A]`
    fn expect(&self, op: &CMatrix) -> Result<C64>;

    fn moments(&self) -> Moments;

    /// `Tr[ρ²]`
    fn purity(&self) -> f64;

    fn to_densop(&self) -> DensOp;
}

fn check_op_dim(op: &CMatrix, d: usize) -> Result<()> {
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::invalid(format!(
            "operator is {}x{}, state dimension is {d}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(())
}

impl State for Ket {
    fn dim(&self) -> usize {
        self.amps.len()
    }

    fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    fn expect(&self, op: &CMatrix) -> Result<C64> {
        check_op_dim(op, self.dim())?;
        Ok(self.amps.dotc(&(op * &self.amps)))
    }

    fn moments(&self) -> Moments {
        let xv = Quadrature::X.apply(&self.amps);
        let pv = Quadrature::P.apply(&self.amps);
        Moments {
            mean_x: self.amps.dotc(&xv).re,
            mean_p: self.amps.dotc(&pv).re,
            xx: xv.norm_squared(),
            pp: pv.norm_squared(),
            xp: xv.dotc(&pv).re,
            n: self.amps.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum(),
        }
    }

    fn purity(&self) -> f64 {
        1.0
    }

    fn to_densop(&self) -> DensOp {
        Ket::to_densop(self)
    }
}

impl State for DensOp {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    fn expect(&self, op: &CMatrix) -> Result<C64> {
        check_op_dim(op, self.dim())?;
        // Tr[ρA] = Σ_ij ρ_ij A_ji
        Ok(self.matrix.iter().zip(op.transpose().iter()).map(|(a, b)| a * b).sum())
    }

    fn moments(&self) -> Moments {
        let rho = &self.matrix;
        let x_rho = Quadrature::X.left_mul(rho);
        let p_rho = Quadrature::P.left_mul(rho);
        Moments {
            mean_x: Quadrature::X.trace_with(rho).re,
            mean_p: Quadrature::P.trace_with(rho).re,
            // Tr[ρ x x] = Tr[(x ρ) x]
            xx: Quadrature::X.trace_with(&x_rho).re,
            pp: Quadrature::P.trace_with(&p_rho).re,
            // Re Tr[ρ x p] = Re Tr[(p ρ) x]
            xp: Quadrature::X.trace_with(&p_rho).re,
            n: self.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum(),
        }
    }

    fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    fn to_densop(&self) -> DensOp {
        self.clone()
    }
}

impl State for Ensemble {
    fn dim(&self) -> usize {
        self.terms[0].1.amps.len()
    }

    fn populations(&self) -> Vec<f64> {
        let mut pops = vec![0.0; self.dim()];
        for (w, k) in &self.terms {
            for (p, z) in pops.iter_mut().zip(k.amps.iter()) {
                *p += w * z.norm_sqr();
            }
        }
        pops
    }

    fn expect(&self, op: &CMatrix) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (w, k) in &self.terms {
            acc += k.expect(op)? * *w;
        }
        Ok(acc)
    }

    fn moments(&self) -> Moments {
        self.terms
            .iter()
            .map(|(w, k)| k.moments().scaled(*w))
            .reduce(Moments::add)
            .expect("ensemble is non-empty")
    }

    fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for (wi, ki) in &self.terms {
            for (wj, kj) in &self.terms {
                acc += wi * wj * ki.inner(kj).norm_sqr();
            }
        }
        acc
    }

    fn to_densop(&self) -> DensOp {
        let a = self.factor();
        DensOp::from_trusted(&a * a.adjoint())
    }
}

impl State for Probe {
    fn dim(&self) -> usize {
        match self {
            Probe::Pure(k) => k.dim(),
            Probe::Mixed(r) => r.dim(),
            Probe::Ensemble(e) => e.dim(),
        }
    }

    fn populations(&self) -> Vec<f64> {
        match self {
            Probe::Pure(k) => k.populations(),
            Probe::Mixed(r) => r.populations(),
            Probe::Ensemble(e) => e.populations(),
        }
    }

    fn expect(&self, op: &CMatrix) -> Result<C64> {
        match self {
            Probe::Pure(k) => k.expect(op),
            Probe::Mixed(r) => r.expect(op),
            Probe::Ensemble(e) => e.expect(op),
        }
    }

    fn moments(&self) -> Moments {
        match self {
            Probe::Pure(k) => k.moments(),
            Probe::Mixed(r) => r.moments(),
            Probe::Ensemble(e) => e.moments(),
        }
    }

    fn purity(&self) -> f64 {
        match self {
            Probe::Pure(k) => k.purity(),
            Probe::Mixed(r) => r.purity(),
            Probe::Ensemble(e) => e.purity(),
        }
    }

    fn to_densop(&self) -> DensOp {
        match self {
            Probe::Pure(k) => k.to_densop(),
            Probe::Mixed(r) => r.clone(),
            Probe::Ensemble(e) => e.to_densop(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_lower_bound() {
        assert!(Dim::new(1).is_err());
        assert_eq!(Dim::new(2).unwrap().get(), 2);
    }

    #[test]
    fn densop_validation() {
        let bad_trace = CMatrix::identity(3, 3);
        assert!(matches!(DensOp::new(bad_trace), Err(Error::InvalidInput(_))));
        let mut not_psd = CMatrix::zeros(2, 2);
        not_psd[(0, 0)] = re(1.5);
        not_psd[(1, 1)] = re(-0.5);
        assert!(DensOp::new(not_psd).is_err());
        let mut skew = CMatrix::identity(2, 2) * re(0.5);
        skew[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensOp::new(skew).is_err());
    }

    #[test]
    fn ket_requires_normalization() {
        let v = CVector::from_vec(vec![re(1.0), re(1.0)]);
        assert!(Ket::new(v.clone()).is_err());
        let k = Ket::normalized(v).unwrap();
        assert!((k.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!(matches!(
            Ket::normalized(CVector::zeros(3)),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn ensemble_and_dense_moments_agree() {
        let e = squeezed_mixture(0.4, 48).unwrap();
        let rho = e.to_densop();
        let (a, b) = (e.moments(), rho.moments());
        for (u, v) in [
            (a.xx, b.xx),
            (a.pp, b.pp),
            (a.xp, b.xp),
            (a.n, b.n),
            (a.mean_x, b.mean_x),
        ] {
            assert!((u - v).abs() < 1e-12);
        }
        assert!((e.purity() - rho.purity()).abs() < 1e-12);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let k = fock(1, 4).unwrap();
        assert!(k.expect(&CMatrix::identity(5, 5)).is_err());
    }
}
