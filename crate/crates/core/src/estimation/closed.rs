//! Closed-form expressions used directly and as cross-checks of the SLD
//! routes.

use nalgebra::Matrix2;

use super::{QfiMatrix, RValue, UhlmannMatrix, WeightMatrix, R_FORMULA_TOL};
use crate::error::{Error, Result};
use crate::gaussian::CovMat2;
use crate::hilbert::{check_weights_tol, tail_gate, Ket, Obs, State};
use crate::linalg::{eigenvalues_2x2, re, CVector, C64, I};

/// `R = ‖i Q⁻¹ D‖_∞`, checked against `√(|det D| / det Q)`.
pub fn r_parameter(q: &QfiMatrix, d: &UhlmannMatrix) -> Result<RValue> {
    r_parameter_with_gap(q, d).map(|(r, _)| r)
}

pub(crate) fn r_parameter_with_gap(q: &QfiMatrix, d: &UhlmannMatrix) -> Result<(RValue, f64)> {
    let qinv = invert(q)?;
    let m = (qinv * d.matrix()).map(|v| C64::new(0.0, v));
    let spectral = eigenvalues_2x2(&m).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let det_form = (d.det().abs() / q.det()).sqrt();
    let gap = (spectral - det_form).abs();
    if gap > R_FORMULA_TOL {
        return Err(Error::InternalInconsistency(format!(
            "spectral R {spectral} and determinant R {det_form} disagree"
        )));
    }
    if spectral > 1.0 + 1e-6 {
        return Err(Error::InternalInconsistency(format!("R = {spectral} exceeds 1")));
    }
    Ok((RValue::new(spectral.min(1.0))?, gap))
}

fn invert(q: &QfiMatrix) -> Result<Matrix2<f64>> {
    let scale = q.matrix().abs().max();
    if q.det().is_nan() || q.det() <= 1e-14 * scale * scale {
        return Err(Error::invalid("QFI matrix is singular"));
    }
    q.matrix()
        .try_inverse()
        .ok_or_else(|| Error::invalid("QFI matrix is singular"))
}

/// `⟨G_μ ψ | G_ν ψ⟩` and `⟨G_μ⟩` for a pure probe.
fn pure_moments(psi: &Ket, gens: [&Obs; 2]) -> Result<(Matrix2<C64>, [f64; 2])> {
    tail_gate(psi)?;
    let d = psi.dim();
    if gens.iter().any(|g| g.dim() != d) {
        return Err(Error::invalid("generator and state dimensions differ"));
    }
    let gv: Vec<CVector> = gens.iter().map(|g| g.matrix() * psi.amplitudes()).collect();
    let means = [psi.amplitudes().dotc(&gv[0]).re, psi.amplitudes().dotc(&gv[1]).re];
    Ok((Matrix2::from_fn(|mu, nu| gv[mu].dotc(&gv[nu])), means))
}

/// `Q_μν = 4 Re Cov_ψ(G_μ, G_ν)`.
pub fn qfi_pure_cov(psi: &Ket, gens: [&Obs; 2]) -> Result<QfiMatrix> {
    let (x, m) = pure_moments(psi, gens)?;
    QfiMatrix::new(Matrix2::from_fn(|mu, nu| 4.0 * (x[(mu, nu)].re - m[mu] * m[nu])))
}

/// `D_μν = 4 Im⟨G_μ G_ν⟩` for a pure probe; the mean product is real and
/// drops out.
pub fn uhlmann_pure(psi: &Ket, gens: [&Obs; 2]) -> Result<UhlmannMatrix> {
    let (x, _) = pure_moments(psi, gens)?;
    UhlmannMatrix::new(x.map(|z| 4.0 * z.im))
}

/// `R = (4 det σ)^{-1/2}`, valid for pure probes.
pub fn r_pure_from_cm(sigma: &CovMat2) -> Result<RValue> {
    let det = sigma.det();
    if det.is_nan() || det < 0.25 - 1e-10 {
        return Err(Error::invalid(format!("det σ = {det} is below 1/4")));
    }
    RValue::new((4.0 * det).max(1.0).sqrt().recip())
}

/// Scalar `q` with `Q = q·1` for a Fock-diagonal probe,
/// `q = 2 Σ_n [(2n+1) p_n - 4(n+1) p_n p_{n+1} / (p_n + p_{n+1})]`.
pub fn qfi_fock_diagonal(probs: &[f64]) -> Result<f64> {
    check_weights_tol(probs.iter().copied(), 1e-10)?;
    let mut q = 0.0;
    for (n, &p) in probs.iter().enumerate() {
        let next = probs.get(n + 1).copied().unwrap_or(0.0);
        q += (2 * n + 1) as f64 * p;
        if p + next > 0.0 {
            q -= 4.0 * (n + 1) as f64 * p * next / (p + next);
        }
    }
    Ok(2.0 * q)
}

/// `C_Q(W) = Tr[W Q⁻¹] / M`.
pub fn scalar_bound(w: &WeightMatrix, q: &QfiMatrix, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("number of repetitions must be at least 1"));
    }
    let qinv = invert(q)?;
    Ok(((w.matrix() * qinv).trace() / m as f64).max(0.0))
}

/// `(C_Q, (1 + R) C_Q)`, the interval containing the Holevo bound.
pub fn holevo_sandwich(q: &QfiMatrix, d: &UhlmannMatrix, w: &WeightMatrix, m: u32) -> Result<(f64, f64)> {
    let lower = scalar_bound(w, q, m)?;
    let r = r_parameter(q, d)?;
    Ok((lower, (1.0 + r.get()) * lower))
}

/// `L = 2∂ρ = -2i(|Gψ⟩⟨ψ| - |ψ⟩⟨Gψ|)`.
pub fn sld_pure(psi: &Ket, g: &Obs) -> Result<Obs> {
    if g.dim() != psi.dim() {
        return Err(Error::invalid("generator and state dimensions differ"));
    }
    let v = psi.amplitudes();
    let gv = g.matrix() * v;
    let l = (&gv * v.adjoint() - v * gv.adjoint()) * (I * -2.0);
    Ok(Obs::from_trusted(l))
}

/// Eigen-decomposition of the rank-2 pure-state SLD.
#[derive(Debug, Clone)]
pub struct SldMeasurement {
    /// `(+v, -v)` with `v = 2 √Var_ψ(G)`
    pub eigenvalues: [f64; 2],
    pub vectors: [Ket; 2],
}

/// With `|ψ1⟩ = (G - ⟨G⟩)|ψ⟩ / √Var`, the SLD maps `ψ → -i v ψ1` and
/// `ψ1 → i v ψ`, so `(ψ ∓ iψ1)/√2` carry eigenvalues `±v`.
pub fn sld_measurement_pure(psi: &Ket, g: &Obs) -> Result<SldMeasurement> {
    if g.dim() != psi.dim() {
        return Err(Error::invalid("generator and state dimensions differ"));
    }
    let v = psi.amplitudes();
    let gv = g.matrix() * v;
    let mean = v.dotc(&gv).re;
    let centered = gv - v * re(mean);
    let var = centered.norm_squared();
    if var <= 1e-12 {
        return Err(Error::DegenerateInput(
            "probe is an eigenstate of the generator (zero variance)".into(),
        ));
    }
    let psi1 = centered / re(var.sqrt());
    let s = re(std::f64::consts::FRAC_1_SQRT_2);
    let plus = Ket::normalized((v - &psi1 * I) * s)?;
    let minus = Ket::normalized((v + &psi1 * I) * s)?;
    let ev = 2.0 * var.sqrt();
    Ok(SldMeasurement {
        eigenvalues: [ev, -ev],
        vectors: [plus, minus],
    })
}
