//! Single-mode covariance-matrix toolkit.
//!
//! Ordering is `(x, p)` throughout. `[σ]_jk = ½⟨{R_j, R_k}⟩ - ⟨R_j⟩⟨R_k⟩`;
//! the vacuum has `σ = ½·1`.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{QfiMatrix, UhlmannMatrix};
use crate::hilbert::{tail_gate, Moments, State};

const SYMMETRY_TOL: f64 = 1e-12;
const PHYSICAL_TOL: f64 = 1e-10;
const SYMPLECTIC_TOL: f64 = 1e-10;

/// The symplectic form `Ω = [[0, 1], [-1, 0]]`.
pub fn omega() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// Phase-space action of `e^{-iθn}`: `[[cos θ, sin θ], [-sin θ, cos θ]]`.
pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Phase-space action of `exp((r/2)(a² - a†²))`: `diag(e^{-r}, e^{r})`.
pub fn squeeze(r: f64) -> Matrix2<f64> {
    Matrix2::new((-r).exp(), 0.0, 0.0, r.exp())
}

/// Maps quadrature-frame matrices into the `(x0, p0)` parameter frame.
///
/// `x0` shifts `⟨x⟩` by `+x0` but `p0` shifts `⟨p⟩` by `-p0`, so the
/// Jacobian of the mean with respect to the parameters is `diag(1, -1)`.
pub(crate) fn parameter_frame() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// Quadrature covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[[f64; 2]; 2]")]
pub struct CovMat2(Matrix2<f64>);

impl From<CovMat2> for [[f64; 2]; 2] {
    fn from(c: CovMat2) -> Self {
        to_rows(&c.0)
    }
}

pub(crate) fn to_rows(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

impl CovMat2 {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("covariance matrix has non-finite entries"));
        }
        if (m[(0, 1)] - m[(1, 0)]).abs() > SYMMETRY_TOL * m.abs().max().max(1.0) {
            return Err(Error::invalid("covariance matrix is not symmetric"));
        }
        Ok(CovMat2((m + m.transpose()) * 0.5))
    }

    pub fn from_entries(xx: f64, xp: f64, pp: f64) -> Result<Self> {
        CovMat2::new(Matrix2::new(xx, xp, xp, pp))
    }

    /// Row-major `[xx, xp, px, pp]`.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != 4 {
            return Err(Error::invalid(format!(
                "covariance matrix needs 4 entries, got {}",
                v.len()
            )));
        }
        CovMat2::new(Matrix2::new(v[0], v[1], v[2], v[3]))
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanVec {
    pub x: f64,
    pub p: f64,
}

/// Symplectic 2x2 matrix, `S Ω Sᵀ = Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[[f64; 2]; 2]")]
pub struct SympMat(Matrix2<f64>);

impl From<SympMat> for [[f64; 2]; 2] {
    fn from(s: SympMat) -> Self {
        to_rows(&s.0)
    }
}

impl SympMat {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        let residual = (m * omega() * m.transpose() - omega()).abs().max();
        if residual.is_nan() || residual > SYMPLECTIC_TOL {
            return Err(Error::invalid(format!(
                "matrix is not symplectic (residual {residual:.3e})"
            )));
        }
        Ok(SympMat(m))
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }
}

/// `S = R(θ1) · Z(r) · R(θ2)` with `r ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerAngles {
    pub theta1: f64,
    pub r: f64,
    pub theta2: f64,
}

impl EulerAngles {
    pub fn matrix(&self) -> Matrix2<f64> {
        rotation(self.theta1) * squeeze(self.r) * rotation(self.theta2)
    }
}

pub fn cm_from_moments(m: &Moments) -> Result<(MeanVec, CovMat2)> {
    let sigma = CovMat2::from_entries(m.var_x(), m.cov_xp(), m.var_p())?;
    Ok((
        MeanVec {
            x: m.mean_x,
            p: m.mean_p,
        },
        sigma,
    ))
}

/// First moments and covariance matrix of a state (tail gate enforced).
pub fn cm_of_state<S: State + ?Sized>(state: &S) -> Result<(MeanVec, CovMat2)> {
    tail_gate(state)?;
    cm_from_moments(&state.moments())
}

/// `σ ≻ 0` and `det σ ≥ ¼` (single-mode uncertainty relation).
pub fn physicality(sigma: &CovMat2) -> bool {
    sigma.0[(0, 0)] > 0.0 && sigma.det() >= 0.25 - PHYSICAL_TOL
}

fn require_physical(sigma: &CovMat2) -> Result<()> {
    if !physicality(sigma) {
        return Err(Error::invalid(format!(
            "covariance matrix violates the uncertainty relation (det = {})",
            sigma.det()
        )));
    }
    Ok(())
}

/// `μ = 1/(2√det σ)`. Exact for Gaussian states only.
pub fn purity_from_cm(sigma: &CovMat2) -> Result<f64> {
    require_physical(sigma)?;
    Ok((0.5 / sigma.det().max(0.25).sqrt()).min(1.0))
}

/// QFI of a Gaussian displacement model, `σ⁻¹` expressed in the
/// `(x0, p0)` frame (the off-diagonal entry changes sign).
pub fn gaussian_qfi(sigma: &CovMat2) -> Result<QfiMatrix> {
    require_physical(sigma)?;
    let inv = sigma
        .0
        .try_inverse()
        .ok_or_else(|| Error::invalid("singular covariance matrix"))?;
    let j = parameter_frame();
    QfiMatrix::new(j * inv * j)
}

/// Uhlmann curvature `½ σ⁻¹Ωσ⁻¹` (parameter frame), equal to `-2μ²Ω`, and
/// the resulting `R = μ`.
pub fn gaussian_uhlmann(sigma: &CovMat2) -> Result<(UhlmannMatrix, f64)> {
    require_physical(sigma)?;
    let inv = sigma
        .0
        .try_inverse()
        .ok_or_else(|| Error::invalid("singular covariance matrix"))?;
    let j = parameter_frame();
    let d = UhlmannMatrix::new(j * (inv * omega() * inv * 0.5) * j)?;
    Ok((d, purity_from_cm(sigma)?))
}

/// `σ = Sᵀ (ν·1) S` with `ν = √det σ` and `S` the symmetric square root of
/// `σ/ν`. In one mode `det(σ/ν) = 1`, so `S` is automatically symplectic.
pub fn williamson_single(sigma: &CovMat2) -> Result<(SympMat, f64)> {
    require_physical(sigma)?;
    let nu = sigma.det().sqrt();
    let a = sigma.0 / nu;
    // √A = (A + √det A·1)/√(tr A + 2√det A), det A = 1
    let s = (a + Matrix2::identity()) / (a.trace() + 2.0).sqrt();
    let s = SympMat::new(s)?;
    let residual = (s.0.transpose() * nu * s.0 - sigma.0).abs().max();
    if residual > 1e-10 * nu.max(1.0) {
        return Err(Error::InternalInconsistency(format!(
            "Williamson reconstruction residual {residual:.3e}"
        )));
    }
    Ok((s, nu))
}

/// Rotation-squeeze-rotation factorization of a symplectic matrix.
///
/// Gauge: `r ≥ 0`, `θ2 ∈ (-π/2, π/2]`, `θ1 ∈ (-π, π]`; when `r = 0` all of the
/// rotation is carried by `θ1`.
pub fn euler_decompose(s: &SympMat) -> Result<EulerAngles> {
    let s = s.0;
    if (s.determinant() - 1.0).abs() > SYMPLECTIC_TOL {
        return Err(Error::invalid("matrix is not symplectic"));
    }
    let m = s.transpose() * s;
    // Sᵀ S = R(θ2)ᵀ diag(e^{-2r}, e^{2r}) R(θ2); eigenvalue gap is 2 sinh 2r.
    let gap = ((m[(0, 0)] - m[(1, 1)]).powi(2) + 4.0 * m[(0, 1)].powi(2)).sqrt();
    let r = 0.5 * (0.5 * gap).asinh();
    let theta2 = if r < 1e-13 {
        0.0
    } else {
        let k = -gap;
        0.5 * (2.0 * m[(0, 1)] / k).atan2((m[(0, 0)] - m[(1, 1)]) / k)
    };
    let r1 = s * rotation(theta2).transpose() * squeeze(-r);
    let theta1 = r1[(0, 1)].atan2(r1[(0, 0)]);
    let angles = EulerAngles { theta1, r, theta2 };
    let residual = (angles.matrix() - s).abs().max();
    if residual > 1e-9 * s.abs().max().max(1.0) {
        return Err(Error::InternalInconsistency(format!(
            "Euler reconstruction residual {residual:.3e}"
        )));
    }
    Ok(angles)
}
