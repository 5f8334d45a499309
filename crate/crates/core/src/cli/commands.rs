use rayon::prelude::*;
use serde::Serialize;

use super::record::{Annotation, Meta, RunRecord, QNG_THRESHOLD, WIGNER_THRESHOLD};
use super::spec::{squeezing_dim, StateKind, StateSpec, FOCK_FAMILY_DIM};
use crate::error::{Error, Result};
use crate::estimation::{analyze, qfi_fock_diagonal, AnalyzeOptions, DisplacementModel, EstimationReport};
use crate::gaussian::{squeeze, CovMat2};
use crate::hilbert::{fock, fock_diagonal, photon_added_thermal, squeezed_mixture, wigner_origin, State};
use crate::purification::{purify_cm, PurificationPlan};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub strict: bool,
}

impl RunOptions {
    fn analyze(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            strict: self.strict,
            ..Default::default()
        }
    }
}

fn rel_dev(value: f64, target: f64) -> f64 {
    (value - target).abs() / target.abs()
}

/// Evaluates every grid point independently; output order is grid order.
fn par_grid<T: Sync, R: Send>(grid: &[T], f: impl Fn(&T) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
    grid.par_iter().map(f).collect()
}

#[derive(Debug, Serialize)]
pub struct FockRow {
    pub n: usize,
    pub q11: f64,
    pub q22: f64,
    pub q12: f64,
    pub det_q: f64,
    pub r: f64,
    /// `Var(x0)·Var(p0)` at the QFI bound, `1/(4n+2)²`.
    pub var_product_bound: f64,
    pub q_closed: f64,
    pub r_closed: f64,
    pub passed: bool,
}

pub const FOCK_TOL: f64 = 1e-7;

pub fn repro_fock(n_max: usize, dim: Option<usize>, opts: &RunOptions) -> Result<RunRecord> {
    let d = dim.unwrap_or(FOCK_FAMILY_DIM);
    if n_max + 4 > d {
        return Err(Error::invalid(format!("n_max = {n_max} needs dim ≥ {}", n_max + 4)));
    }
    let grid: Vec<usize> = (0..=n_max).collect();
    let rows = par_grid(&grid, |&n| {
        let rep = analyze(&DisplacementModel::new(fock(n, d)?), &opts.analyze())?;
        let q = rep.qfi.matrix();
        let q_closed = (4 * n + 2) as f64;
        let r_closed = 1.0 / (2 * n + 1) as f64;
        let passed = rel_dev(q[(0, 0)], q_closed) <= FOCK_TOL
            && rel_dev(q[(1, 1)], q_closed) <= FOCK_TOL
            && (rep.r.get() - r_closed).abs() <= FOCK_TOL;
        Ok(FockRow {
            n,
            q11: q[(0, 0)],
            q22: q[(1, 1)],
            q12: q[(0, 1)],
            det_q: rep.det_q,
            r: rep.r.get(),
            var_product_bound: 1.0 / (q_closed * q_closed),
            q_closed,
            r_closed,
            passed,
        })
    })?;
    let passed = rows.iter().all(|r| r.passed);
    let meta = Meta::new(vec![d; grid.len()], opts.strict)
        .tolerance("q_rel", FOCK_TOL)
        .tolerance("r_abs", FOCK_TOL);
    RunRecord::new(
        "repro_fock",
        meta,
        &serde_json::json!({ "n_max": n_max }),
        &rows,
        passed,
    )
}

#[derive(Debug, Serialize)]
pub struct SqueezedMixtureRow {
    pub r: f64,
    pub dim: usize,
    pub det_q: f64,
    pub r_value: f64,
    pub det_q_target: f64,
    pub r_target: f64,
    pub det_q_rel_dev: f64,
    pub r_rel_dev: f64,
    pub report: EstimationReport,
}

pub const DEFAULT_SQUEEZE_GRID: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];

pub fn repro_squeezed_mixture(r_list: &[f64], dim: Option<usize>, opts: &RunOptions) -> Result<RunRecord> {
    if r_list.is_empty() || r_list.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::invalid("squeezing grid must be non-empty with finite r ≥ 0"));
    }
    let dims: Vec<usize> = r_list
        .iter()
        .map(|&r| dim.unwrap_or_else(|| squeezing_dim(r)))
        .collect();
    let grid: Vec<(f64, usize)> = r_list.iter().copied().zip(dims.iter().copied()).collect();
    let rows = par_grid(&grid, |&(r, d)| {
        let rep = analyze(&DisplacementModel::new(squeezed_mixture(r, d)?), &opts.analyze())?;
        let c = (2.0 * r).cosh();
        let (det_q_target, r_target) = (4.0 * c * c, 1.0 / c);
        Ok(SqueezedMixtureRow {
            r,
            dim: d,
            det_q: rep.det_q,
            r_value: rep.r.get(),
            det_q_target,
            r_target,
            det_q_rel_dev: rel_dev(rep.det_q, det_q_target),
            r_rel_dev: rel_dev(rep.r.get(), r_target),
            report: rep,
        })
    })?;
    // The targets are large-r asymptotics: deviations must shrink with r from r = 1 on.
    let mut tail: Vec<&SqueezedMixtureRow> = rows.iter().filter(|row| row.r >= 1.0).collect();
    tail.sort_by(|a, b| a.r.total_cmp(&b.r));
    let passed = tail
        .windows(2)
        .all(|w| w[1].det_q_rel_dev < w[0].det_q_rel_dev && w[1].r_rel_dev < w[0].r_rel_dev);
    let meta = Meta::new(dims, opts.strict);
    RunRecord::new(
        "repro_squeezed_mixture",
        meta,
        &serde_json::json!({ "r": r_list }),
        &rows,
        passed,
    )
}

#[derive(Debug, Serialize)]
pub struct VacuumOneRow {
    pub lambda: f64,
    pub q_closed: f64,
    pub q_formula: f64,
    pub q_sld: f64,
    pub wigner_origin: f64,
    pub quantum_non_gaussian: bool,
    pub wigner_negative: bool,
    pub passed: bool,
}

pub const VACUUM_ONE_TOL: f64 = 1e-7;

/// `k/(points-1)` for `k = 0..points`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..points).map(|k| k as f64 / (points - 1) as f64).collect(),
    }
}

fn annotations() -> Vec<Annotation> {
    vec![
        Annotation {
            name: "quantum_non_gaussian_threshold".into(),
            value: QNG_THRESHOLD,
            note: "one-photon weight above which (1-λ)|0⟩⟨0| + λ|1⟩⟨1| is quantum non-Gaussian; literature value, not computed".into(),
        },
        Annotation {
            name: "wigner_negative_threshold".into(),
            value: WIGNER_THRESHOLD,
            note: "one-photon weight above which W(0,0) < 0".into(),
        },
    ]
}

pub fn repro_vacuum_one(lambdas: &[f64], dim: Option<usize>, opts: &RunOptions) -> Result<RunRecord> {
    if lambdas.is_empty() || lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(Error::invalid("λ grid must be non-empty with values in [0, 1]"));
    }
    let d = dim.unwrap_or(FOCK_FAMILY_DIM);
    let rows = par_grid(lambdas, |&lambda| {
        let probs = [1.0 - lambda, lambda];
        let rho = fock_diagonal(&probs, d)?;
        let q_closed = qfi_fock_diagonal(&probs)?;
        let q_formula = 2.0 * (1.0 - 2.0 * lambda + 4.0 * lambda * lambda);
        let rep = analyze(&DisplacementModel::new(rho.clone()), &opts.analyze())?;
        let q_sld = rep.qfi.matrix()[(0, 0)];
        let passed = (q_closed - q_formula).abs() <= VACUUM_ONE_TOL && (q_sld - q_formula).abs() <= VACUUM_ONE_TOL;
        Ok(VacuumOneRow {
            lambda,
            q_closed,
            q_formula,
            q_sld,
            wigner_origin: wigner_origin(&rho),
            quantum_non_gaussian: lambda > QNG_THRESHOLD,
            wigner_negative: lambda > WIGNER_THRESHOLD,
            passed,
        })
    })?;
    let passed = rows.iter().all(|r| r.passed);
    let mut meta = Meta::new(vec![d; lambdas.len()], opts.strict).tolerance("q_abs", VACUUM_ONE_TOL);
    meta.annotations = annotations();
    RunRecord::new(
        "repro_vacuum_one",
        meta,
        &serde_json::json!({ "lambda": lambdas }),
        &rows,
        passed,
    )
}

#[derive(Debug, Serialize)]
pub struct PhotonAddedRow {
    pub lambda: f64,
    pub dim: usize,
    pub q_closed: f64,
    pub q_sld: f64,
    pub wigner_origin: f64,
    pub wigner_closed: f64,
    pub passed: bool,
}

pub const PAT_TOL: f64 = 1e-6;

pub fn repro_photon_added_thermal(lambdas: &[f64], dim: Option<usize>, opts: &RunOptions) -> Result<RunRecord> {
    if lambdas.is_empty() || lambdas.iter().any(|l| !(0.0..1.0).contains(l)) {
        return Err(Error::invalid("λ values must lie in [0, 1)"));
    }
    let dims: Vec<usize> = lambdas
        .iter()
        .map(|&l| dim.unwrap_or_else(|| StateSpec::new(StateKind::PhotonAddedThermal { lambda: l }).default_dim()))
        .collect();
    let grid: Vec<(f64, usize)> = lambdas.iter().copied().zip(dims.iter().copied()).collect();
    let rows = par_grid(&grid, |&(lambda, d)| {
        let rho = photon_added_thermal(lambda, d)?;
        let q_closed = qfi_fock_diagonal(&rho.populations())?;
        let rep = analyze(&DisplacementModel::new(rho.clone()), &opts.analyze())?;
        let q_sld = rep.qfi.matrix()[(0, 0)];
        let w = wigner_origin(&rho);
        Ok(PhotonAddedRow {
            lambda,
            dim: d,
            q_closed,
            q_sld,
            wigner_origin: w,
            wigner_closed: -(1.0 - lambda).powi(2) / (std::f64::consts::PI * (1.0 + lambda).powi(2)),
            passed: rel_dev(q_sld, q_closed) <= PAT_TOL && w < 0.0,
        })
    })?;
    let passed = rows.iter().all(|r| r.passed);
    let meta = Meta::new(dims, opts.strict).tolerance("q_rel", PAT_TOL);
    RunRecord::new(
        "repro_photon_added_thermal",
        meta,
        &serde_json::json!({ "lambda": lambdas }),
        &rows,
        passed,
    )
}

#[derive(Debug, Serialize)]
pub struct Amplitude {
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Debug, Serialize)]
pub struct PurifyRow {
    pub plan: PurificationPlan,
    /// Largest 16 amplitudes by magnitude, ties broken by Fock index.
    pub amplitudes: Vec<Amplitude>,
    pub cm_residual: f64,
    pub report: EstimationReport,
}

/// `64·e^{2r}` rounded up to a power of two, where `r` is the squeezing of
/// the Williamson symplectic.
pub fn purify_default_dim(sigma: &CovMat2) -> Result<usize> {
    let (s, _) = crate::gaussian::williamson_single(sigma)?;
    let r = crate::gaussian::euler_decompose(&s)?.r;
    let raw = 64.0 * (2.0 * r).exp();
    Ok(if raw > 1e6 {
        usize::MAX
    } else {
        (raw.ceil() as usize).next_power_of_two()
    })
}

pub fn purify(entries: &[f64], dim: Option<usize>, n_fock: Option<usize>, opts: &RunOptions) -> Result<RunRecord> {
    let sigma = CovMat2::from_slice(entries)?;
    if !crate::gaussian::physicality(&sigma) {
        return Err(Error::UnphysicalInput(format!(
            "covariance matrix violates the uncertainty relation (det = {})",
            sigma.det()
        )));
    }
    let d = match dim {
        Some(d) => d,
        None => purify_default_dim(&sigma)?,
    };
    let (psi, plan) = purify_cm(&sigma, d, n_fock)?;
    let mut amplitudes: Vec<Amplitude> = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, z)| Amplitude {
            n,
            re: z.re,
            im: z.im,
            abs: z.norm(),
        })
        .collect();
    amplitudes.sort_by(|a, b| b.abs.total_cmp(&a.abs).then(a.n.cmp(&b.n)));
    amplitudes.truncate(16);
    let report = analyze(&DisplacementModel::new(psi), &opts.analyze())?;
    let row = PurifyRow {
        cm_residual: plan.cm_residual,
        plan,
        amplitudes,
        report,
    };
    let meta = Meta::new(vec![d], opts.strict).tolerance("cm_residual", (10.0 * row.plan.tail_mass).max(1e-8));
    let input = serde_json::json!({ "sigma": entries, "n_fock": n_fock });
    RunRecord::new("purify", meta, &input, &[row], true)
}

/// Squeezed thermal covariance used by the validation suite.
pub(crate) fn squeezed_thermal(nu: f64, r: f64) -> Result<CovMat2> {
    let s = squeeze(r);
    CovMat2::new(s.transpose() * nu * s)
}

#[derive(Debug, Serialize)]
pub struct AnalyzeRow {
    pub spec: StateSpec,
    pub dim: usize,
    pub report: EstimationReport,
}

pub fn analyze_spec(spec: &StateSpec, dim: Option<usize>, opts: &RunOptions) -> Result<RunRecord> {
    let d = spec.resolve_dim(dim);
    let probe = spec.build(d)?;
    let model = DisplacementModel {
        probe,
        gaussian: spec.is_gaussian(),
    };
    let report = analyze(&model, &opts.analyze())?;
    let meta = Meta::new(vec![d], opts.strict).tolerance("cross_check_rel", crate::estimation::CROSS_CHECK_TOL);
    let row = AnalyzeRow {
        spec: spec.clone(),
        dim: d,
        report,
    };
    RunRecord::new("analyze", meta, spec, &[row], true)
}
