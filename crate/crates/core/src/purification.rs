//! Pure (generally non-Gaussian) Fock-basis states with a prescribed
//! single-mode covariance matrix.
//!
//! Recipe: `τ = √λ|N⟩ + √(1-λ)|0⟩` has covariance `(λN + ½)·1` for `N ≥ 3`;
//! choosing `λ = (2ν - 1)/(2N)` gives `ν·1`, and the Gaussian unitary of the
//! Williamson symplectic maps `ν·1` to `σ`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{cm_of_state, euler_decompose, physicality, williamson_single, CovMat2, EulerAngles, SympMat};
use crate::hilbert::{tail_gate, Dim, Ket, State};
use crate::linalg::{re, CMatrix, CVector, C64};

/// Smallest Fock level for which `|0⟩` and `|N⟩` have no quadratic cross
/// moments.
pub const MIN_FOCK_LEVEL: usize = 3;

/// Below this the covariance matrix is treated as pure.
const PURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurificationPlan {
    pub nu: f64,
    pub n_fock: usize,
    pub lambda: f64,
    pub symplectic: SympMat,
    pub euler: EulerAngles,
    /// Largest entrywise deviation of the output covariance from the target.
    pub cm_residual: f64,
    pub tail_mass: f64,
}

/// `max(3, ⌈ν + ½⌉)`
pub fn default_fock_level(nu: f64) -> usize {
    ((nu + 0.5).ceil() as usize).max(MIN_FOCK_LEVEL)
}

fn mixing_weight(nu: f64, n: usize) -> Result<f64> {
    if !nu.is_finite() || nu < 0.5 - PURE_TOL {
        return Err(Error::UnphysicalInput(format!(
            "symplectic eigenvalue {nu} is below 1/2"
        )));
    }
    if nu <= 0.5 + PURE_TOL {
        return Ok(0.0);
    }
    if n < MIN_FOCK_LEVEL {
        return Err(Error::invalid(format!(
            "Fock level {n} < {MIN_FOCK_LEVEL}: the |0⟩-|{n}⟩ cross moments make the covariance anisotropic"
        )));
    }
    let lambda = (2.0 * nu - 1.0) / (2.0 * n as f64);
    if lambda > 1.0 {
        return Err(Error::invalid(format!(
            "Fock level {n} is too small for ν = {nu} (need N ≥ ν - ½)"
        )));
    }
    Ok(lambda)
}

/// `√λ|N⟩ + √(1-λ)|0⟩` with covariance `ν·1`.
pub fn tau_state(nu: f64, n: usize, d: usize) -> Result<Ket> {
    let d = Dim::new(d)?.get();
    let lambda = mixing_weight(nu, n)?;
    let mut amps = CVector::zeros(d);
    amps[0] = re((1.0 - lambda).sqrt());
    if lambda > 0.0 {
        if n >= d {
            return Err(Error::invalid(format!("Fock level {n} does not fit in dimension {d}")));
        }
        amps[n] = re(lambda.sqrt());
    }
    Ket::normalized(amps)
}

/// `exp((r/2)(a² - a†²))` factorized as `Φ·exp(-irH)·Φ†`, with
/// `Φ = diag(e^{iπn/4})` and `H` real symmetric,
/// `H_{n-2,n} = H_{n,n-2} = -√(n(n-1))/2`.
struct Squeezer {
    phases: Vec<C64>,
    vectors: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    r: f64,
}

impl Squeezer {
    fn new(r: f64, d: usize) -> Self {
        let mut h = DMatrix::<f64>::zeros(d, d);
        for n in 2..d {
            let v = -0.5 * ((n * (n - 1)) as f64).sqrt();
            h[(n - 2, n)] = v;
            h[(n, n - 2)] = v;
        }
        let eig = h.symmetric_eigen();
        Squeezer {
            phases: (0..d)
                .map(|n| C64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * n as f64))
                .collect(),
            vectors: eig.eigenvectors,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            r,
        }
    }

    fn apply(&self, v: &CVector) -> CVector {
        let w = CVector::from_fn(v.len(), |n, _| v[n] * self.phases[n].conj());
        let vc = self.vectors.map(re);
        let mut coeffs = vc.transpose() * w;
        for (c, lam) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= C64::from_polar(1.0, -self.r * lam);
        }
        let out = vc * coeffs;
        CVector::from_fn(v.len(), |n, _| out[n] * self.phases[n])
    }

    fn matrix(&self) -> CMatrix {
        let d = self.phases.len();
        let vc = self.vectors.map(re);
        let diag = CVector::from_iterator(
            d,
            self.eigenvalues.iter().map(|lam| C64::from_polar(1.0, -self.r * lam)),
        );
        let core = &vc * CMatrix::from_diagonal(&diag) * vc.transpose();
        CMatrix::from_fn(d, d, |i, j| self.phases[i] * core[(i, j)] * self.phases[j].conj())
    }
}

fn rotation_phases(theta: f64, d: usize) -> Vec<C64> {
    (0..d).map(|n| C64::from_polar(1.0, -theta * n as f64)).collect()
}

/// `e^{-iθ1 n} · exp((r/2)(a² - a†²)) · e^{-iθ2 n}` as a dense matrix. Its
/// action on quadrature means is `R(θ1) Z(r) R(θ2)`.
pub fn gaussian_unitary_fock(euler: &EulerAngles, d: usize) -> Result<CMatrix> {
    let d = Dim::new(d)?.get();
    let left = rotation_phases(euler.theta1, d);
    let right = rotation_phases(euler.theta2, d);
    let core = if euler.r == 0.0 {
        CMatrix::identity(d, d)
    } else {
        Squeezer::new(euler.r, d).matrix()
    };
    Ok(CMatrix::from_fn(d, d, |i, j| left[i] * core[(i, j)] * right[j]))
}

/// Same unitary applied to a single state without forming the matrix.
pub fn apply_gaussian_unitary(euler: &EulerAngles, ket: &Ket) -> Result<Ket> {
    let d = ket.dim();
    let right = rotation_phases(euler.theta2, d);
    let mut v = CVector::from_fn(d, |n, _| ket.amplitudes()[n] * right[n]);
    if euler.r != 0.0 {
        v = Squeezer::new(euler.r, d).apply(&v);
    }
    let left = rotation_phases(euler.theta1, d);
    Ket::normalized(CVector::from_fn(d, |n, _| v[n] * left[n]))
}

/// Builds a pure state whose covariance matrix is `σ`. `n_fock` defaults to
/// [`default_fock_level`].
pub fn purify_cm(sigma: &CovMat2, d: usize, n_fock: Option<usize>) -> Result<(Ket, PurificationPlan)> {
    if !physicality(sigma) {
        return Err(Error::UnphysicalInput(format!(
            "covariance matrix violates the uncertainty relation (det = {})",
            sigma.det()
        )));
    }
    let d = Dim::new(d)?.get();
    let (symplectic, nu) = williamson_single(sigma)?;
    let euler = euler_decompose(&symplectic)?;
    let n = n_fock.unwrap_or_else(|| default_fock_level(nu));
    let lambda = mixing_weight(nu, n)?;
    let tau = tau_state(nu, n, d)?;
    let psi = apply_gaussian_unitary(&euler, &tau)?;

    let tail = tail_gate(&psi)?;
    let (_, out) = cm_of_state(&psi)?;
    let cm_residual = (out.matrix() - sigma.matrix()).abs().max();
    let tol = (10.0 * tail.mass).max(1e-8);
    if cm_residual > tol {
        return Err(Error::truncation(
            format!("purified covariance residual {cm_residual:.3e} exceeds {tol:.1e}"),
            tail.mass,
            d,
        ));
    }
    let plan = PurificationPlan {
        nu,
        n_fock: n,
        lambda,
        symplectic,
        euler,
        cm_residual,
        tail_mass: tail.mass,
    };
    Ok((psi, plan))
}
