//! Two-parameter displacement model `e^{-ip0 x} e^{-ix0 p}`: SLDs, QFI
//! matrix, Uhlmann curvature, quantumness parameter and scalar bounds.
//!
//! Parameter order is `(x0, p0)`, generated by `(p, x)`. All derivatives are
//! taken at the origin.
//!
//! Conventions: `Q_μν = Re Tr[ρ L_μ L_ν]`, `D_μν = -(i/2) Tr[ρ [L_μ, L_ν]]`
//! (which equals `Im Tr[ρ L_μ L_ν]`) and `R = ‖i Q⁻¹ D‖_∞`.

mod closed;
mod sld;

pub use closed::{
    holevo_sandwich, qfi_fock_diagonal, qfi_pure_cov, r_parameter, r_pure_from_cm, scalar_bound, sld_measurement_pure,
    sld_pure, uhlmann_pure, SldMeasurement,
};
pub use sld::{model_derivative, qfi_from_slds, sld_set, solve_sld, uhlmann_from_slds, SldSet};

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{
    cm_from_moments, gaussian_qfi, omega, parameter_frame, purity_from_cm, to_rows, CovMat2, MeanVec,
};
use crate::hilbert::{quadrature_ops, tail_gate, Obs, Probe, Quadrature, State};
use crate::linalg::CMatrix;

/// Generators of `(x0, p0)`, in that order.
pub const GENERATORS: [Quadrature; 2] = [Quadrature::P, Quadrature::X];

/// Relative kernel threshold for SLD solves.
pub const DEFAULT_SUPPORT_CUTOFF: f64 = 1e-12;

/// Closed form vs numeric disagreement that fails strict mode.
pub const CROSS_CHECK_TOL: f64 = 1e-5;

/// Maximum disagreement between the two expressions for `R`.
pub const R_FORMULA_TOL: f64 = 1e-8;

fn scale(m: &Matrix2<f64>) -> f64 {
    m.abs().max().max(1.0)
}

/// Quantum Fisher information matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[[f64; 2]; 2]")]
pub struct QfiMatrix(Matrix2<f64>);

impl From<QfiMatrix> for [[f64; 2]; 2] {
    fn from(q: QfiMatrix) -> Self {
        to_rows(&q.0)
    }
}

impl QfiMatrix {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("QFI matrix has non-finite entries"));
        }
        let s = scale(&m);
        if (m[(0, 1)] - m[(1, 0)]).abs() > 1e-9 * s {
            return Err(Error::InternalInconsistency("QFI matrix is not symmetric".into()));
        }
        let m = (m + m.transpose()) * 0.5;
        let half_tr = 0.5 * m.trace();
        let min_eig = half_tr - (0.25 * (m[(0, 0)] - m[(1, 1)]).powi(2) + m[(0, 1)].powi(2)).sqrt();
        if min_eig < -1e-9 * s {
            return Err(Error::InternalInconsistency(format!(
                "QFI matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(QfiMatrix(m))
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }
}

/// Uhlmann curvature, real antisymmetric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[[f64; 2]; 2]")]
pub struct UhlmannMatrix(Matrix2<f64>);

impl From<UhlmannMatrix> for [[f64; 2]; 2] {
    fn from(d: UhlmannMatrix) -> Self {
        to_rows(&d.0)
    }
}

impl UhlmannMatrix {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("Uhlmann matrix has non-finite entries"));
        }
        let s = scale(&m);
        let defect = (m + m.transpose()).abs().max();
        if defect > 1e-9 * s {
            return Err(Error::InternalInconsistency(format!(
                "Uhlmann matrix is not antisymmetric (defect {defect:.3e})"
            )));
        }
        Ok(UhlmannMatrix((m - m.transpose()) * 0.5))
    }

    /// `D = c·Ω`
    pub fn from_d12(c: f64) -> Result<Self> {
        UhlmannMatrix::new(omega() * c)
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn d12(&self) -> f64 {
        self.0[(0, 1)]
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }
}

/// Quantumness parameter, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct RValue(f64);

impl RValue {
    pub fn new(r: f64) -> Result<Self> {
        if !(-1e-9..=1.0 + 1e-9).contains(&r) {
            return Err(Error::invalid(format!("R = {r} is outside [0, 1]")));
        }
        Ok(RValue(r.clamp(0.0, 1.0)))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Symmetric positive semi-definite weight matrix for scalar bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[[f64; 2]; 2]")]
pub struct WeightMatrix(Matrix2<f64>);

impl From<WeightMatrix> for [[f64; 2]; 2] {
    fn from(w: WeightMatrix) -> Self {
        to_rows(&w.0)
    }
}

impl WeightMatrix {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) || (m[(0, 1)] - m[(1, 0)]).abs() > 1e-12 * scale(&m) {
            return Err(Error::invalid("weight matrix must be real symmetric"));
        }
        let m = (m + m.transpose()) * 0.5;
        if m[(0, 0)] < 0.0 || m[(1, 1)] < 0.0 || m.determinant() < -1e-12 * scale(&m) {
            return Err(Error::invalid("weight matrix must be positive semi-definite"));
        }
        Ok(WeightMatrix(m))
    }

    pub fn identity() -> Self {
        WeightMatrix(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }
}

/// Probe plus the fixed displacement generators.
#[derive(Debug, Clone)]
pub struct DisplacementModel {
    pub probe: Probe,
    /// The probe is known to be Gaussian; enables the covariance-matrix
    /// closed forms as cross-checks.
    pub gaussian: bool,
}

impl DisplacementModel {
    pub fn new(probe: impl Into<Probe>) -> Self {
        DisplacementModel {
            probe: probe.into(),
            gaussian: false,
        }
    }

    pub fn gaussian(probe: impl Into<Probe>) -> Self {
        DisplacementModel {
            probe: probe.into(),
            gaussian: true,
        }
    }

    /// `(p, x)` as dense observables.
    pub fn generators(&self) -> Result<[Obs; 2]> {
        let ops = quadrature_ops(self.probe.dim())?;
        Ok([ops.p, ops.x])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    pub strict: bool,
    pub support_cutoff: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            strict: false,
            support_cutoff: DEFAULT_SUPPORT_CUTOFF,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Eigen-decomposition of the full density matrix.
    Full,
    /// Eigen-decomposition of the Gram matrix of a pure-state factorization.
    LowRank,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub closed_form: f64,
    pub numeric: f64,
    pub rel_dev: f64,
    pub passed: bool,
}

impl CrossCheck {
    fn new(name: &str, closed_form: f64, numeric: f64, scale: f64) -> Self {
        let rel_dev = (closed_form - numeric).abs() / scale.abs().max(f64::MIN_POSITIVE);
        CrossCheck {
            name: name.to_string(),
            closed_form,
            numeric,
            rel_dev,
            passed: rel_dev <= CROSS_CHECK_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub dim: usize,
    pub tail_mass: f64,
    pub tail_window: usize,
    pub support_rank: usize,
    pub support_cutoff: f64,
    pub route: Route,
    /// `|‖iQ⁻¹D‖_∞ - √(|det D|/det Q)|`
    pub r_formula_gap: f64,
    pub cross_checks: Vec<CrossCheck>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationReport {
    pub qfi: QfiMatrix,
    pub uhlmann: UhlmannMatrix,
    pub r: RValue,
    pub det_q: f64,
    pub mean: MeanVec,
    pub sigma: CovMat2,
    pub det_sigma: f64,
    pub purity: f64,
    pub energy: f64,
    /// `Tr[Q⁻¹]`, i.e. weight `1` and a single repetition.
    pub scalar_bound_cq: f64,
    /// `(1 + R)·C_Q`
    pub holevo_upper: f64,
    pub diagnostics: Diagnostics,
}

impl EstimationReport {
    /// Re-derives `R`, `det Q` and the bounds from the stored matrices.
    pub fn check_consistency(&self) -> Result<()> {
        let r = r_parameter(&self.qfi, &self.uhlmann)?.get();
        let mut problems = Vec::new();
        if (r - self.r.get()).abs() > R_FORMULA_TOL {
            problems.push(format!("stored R {} vs recomputed {r}", self.r.get()));
        }
        let det_q = self.qfi.det();
        if (det_q - self.det_q).abs() > 1e-12 * det_q.abs().max(1.0) {
            problems.push(format!("stored det Q {} vs recomputed {det_q}", self.det_q));
        }
        let (lower, upper) = holevo_sandwich(&self.qfi, &self.uhlmann, &WeightMatrix::identity(), 1)?;
        let tol = 1e-12 * lower.max(1.0);
        if (lower - self.scalar_bound_cq).abs() > tol || (upper - self.holevo_upper).abs() > tol * 2.0 {
            problems.push("stored scalar bounds do not match Q and D".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InternalInconsistency(problems.join("; ")))
        }
    }
}

/// Full pipeline: tail gate, SLDs, `Q`, `D`, `R`, bounds and closed-form
/// cross-checks.
pub fn analyze(model: &DisplacementModel, opts: &AnalyzeOptions) -> Result<EstimationReport> {
    let probe = &model.probe;
    let tail = tail_gate(probe)?;
    let mut warnings = Vec::new();
    if tail.warning {
        warnings.push(format!("tail mass {:.3e} in the top {} levels", tail.mass, tail.window));
    }

    let raw = match probe {
        Probe::Pure(k) => {
            let a = CMatrix::from_column_slice(k.dim(), 1, k.amplitudes().as_slice());
            sld::low_rank_route(&a, opts.support_cutoff)
        }
        Probe::Ensemble(e) => sld::low_rank_route(&e.factor(), opts.support_cutoff),
        Probe::Mixed(rho) => sld::full_route(rho, opts.support_cutoff),
    }?;
    let qfi = QfiMatrix::new(raw.q)?;
    let uhlmann = UhlmannMatrix::new(raw.d)?;
    let (r, r_formula_gap) = closed::r_parameter_with_gap(&qfi, &uhlmann)?;

    let moments = probe.moments();
    let (mean, sigma) = cm_from_moments(&moments)?;
    let purity = probe.purity();
    let (scalar_bound_cq, holevo_upper) = holevo_sandwich(&qfi, &uhlmann, &WeightMatrix::identity(), 1)?;

    let cross_checks = cross_checks(model, &qfi, &uhlmann, r, &sigma)?;
    let failed: Vec<&CrossCheck> = cross_checks.iter().filter(|c| !c.passed).collect();
    if !failed.is_empty() {
        let msg = failed
            .iter()
            .map(|c| {
                format!(
                    "{}: closed form {} vs numeric {} (rel {:.3e})",
                    c.name, c.closed_form, c.numeric, c.rel_dev
                )
            })
            .collect::<Vec<_>>()
            .join("; ");
        if opts.strict {
            return Err(Error::InternalInconsistency(msg));
        }
        warnings.push(msg);
    }

    let report = EstimationReport {
        qfi,
        uhlmann,
        r,
        det_q: qfi.det(),
        mean,
        sigma,
        det_sigma: sigma.det(),
        purity,
        energy: moments.n,
        scalar_bound_cq,
        holevo_upper,
        diagnostics: Diagnostics {
            dim: probe.dim(),
            tail_mass: tail.mass,
            tail_window: tail.window,
            support_rank: raw.support_rank,
            support_cutoff: opts.support_cutoff,
            route: raw.route,
            r_formula_gap,
            cross_checks,
            warnings,
        },
    };
    report.check_consistency()?;
    Ok(report)
}

fn cross_checks(
    model: &DisplacementModel,
    qfi: &QfiMatrix,
    uhlmann: &UhlmannMatrix,
    r: RValue,
    sigma: &CovMat2,
) -> Result<Vec<CrossCheck>> {
    let q = qfi.matrix();
    let qs = scale(q);
    let mut out = Vec::new();
    let push_matrix = |name: &str, reference: &Matrix2<f64>, out: &mut Vec<CrossCheck>| {
        for (i, j, label) in [(0, 0, "11"), (0, 1, "12"), (1, 1, "22")] {
            out.push(CrossCheck::new(
                &format!("{name}_{label}"),
                reference[(i, j)],
                q[(i, j)],
                qs,
            ));
        }
    };

    if let Probe::Pure(_) = &model.probe {
        // 4 Cov(p, x) in the (x0, p0) frame equals 4 J Ωᵀ σ Ω J
        let j = parameter_frame();
        let reference = j * omega().transpose() * sigma.matrix() * omega() * j * 4.0;
        push_matrix("qfi_pure_cov", &reference, &mut out);
        out.push(CrossCheck::new("uhlmann_pure_abs_d12", 2.0, uhlmann.d12().abs(), 2.0));
        out.push(CrossCheck::new(
            "r_pure_from_cm",
            r_pure_from_cm(sigma)?.get(),
            r.get(),
            1.0,
        ));
    }

    if let Some(pops) = fock_diagonal_populations(&model.probe) {
        let qd = qfi_fock_diagonal(&pops)?;
        push_matrix("qfi_fock_diagonal", &(Matrix2::identity() * qd), &mut out);
    }

    if model.gaussian {
        push_matrix("gaussian_qfi", gaussian_qfi(sigma)?.matrix(), &mut out);
        out.push(CrossCheck::new(
            "gaussian_r_purity",
            purity_from_cm(sigma)?,
            r.get(),
            1.0,
        ));
    }
    Ok(out)
}

/// Populations of a probe that is diagonal in the Fock basis, if it is.
fn fock_diagonal_populations(probe: &Probe) -> Option<Vec<f64>> {
    match probe {
        Probe::Mixed(rho) if rho.off_diagonal_max() == 0.0 => Some(rho.populations()),
        Probe::Pure(k) if k.amplitudes().iter().filter(|z| z.norm_sqr() > 0.0).count() == 1 => Some(k.populations()),
        _ => None,
    }
}
