//! Symmetric logarithmic derivatives.

use nalgebra::{DVector, Matrix2};

use super::{QfiMatrix, Route, UhlmannMatrix, GENERATORS};
use crate::error::{Error, Result};
use crate::hilbert::{DensOp, Obs, Quadrature, State};
use crate::linalg::{hermitian_eigen, hermiticity_defect, hermitize, max_abs, re, CMatrix, C64, I};

/// SLDs for `x0` (`l1`) and `p0` (`l2`) in the Fock basis.
#[derive(Debug, Clone)]
pub struct SldSet {
    pub l1: Obs,
    pub l2: Obs,
    /// Number of eigenvalues of ρ above the cutoff.
    pub support_rank: usize,
    pub support_cutoff: f64,
}

impl SldSet {
    pub fn get(&self, mu: usize) -> &Obs {
        if mu == 0 {
            &self.l1
        } else {
            &self.l2
        }
    }
}

/// `∂ρ = -i[G, ρ]` at the origin of the covariant model.
pub fn model_derivative(rho: &DensOp, g: &Obs) -> Result<CMatrix> {
    if g.dim() != rho.dim() {
        return Err(Error::invalid(format!(
            "generator dimension {} does not match state dimension {}",
            g.dim(),
            rho.dim()
        )));
    }
    Ok(commutator_derivative(g.matrix() * rho.matrix()))
}

/// `-i(A - A†)` with `A = Gρ`, since `ρG = (Gρ)†`.
fn commutator_derivative(g_rho: CMatrix) -> CMatrix {
    hermitize(&((&g_rho - g_rho.adjoint()) * (-I)))
}

pub(crate) fn quadrature_derivative(rho: &CMatrix, q: Quadrature) -> CMatrix {
    commutator_derivative(q.left_mul(rho))
}

struct Eigenbasis {
    p: DVector<f64>,
    v: CMatrix,
    threshold: f64,
}

impl Eigenbasis {
    fn new(rho: &CMatrix, cutoff: f64) -> Result<Self> {
        if !cutoff.is_finite() || cutoff < 0.0 {
            return Err(Error::invalid(format!(
                "support cutoff {cutoff} must be finite and non-negative"
            )));
        }
        let eig = hermitian_eigen(rho)?;
        let pmax = eig.values.max();
        Ok(Eigenbasis {
            threshold: cutoff * pmax,
            p: eig.values,
            v: eig.vectors,
        })
    }

    fn rank(&self) -> usize {
        self.p.iter().filter(|&&p| p > self.threshold).count()
    }

    /// `L_jk = 2 B_jk / (p_j + p_k)` on the retained support, zero elsewhere.
    fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.p.len();
        CMatrix::from_fn(n, n, |j, k| {
            let s = self.p[j] + self.p[k];
            if s > self.threshold {
                b[(j, k)] * (2.0 / s)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// Solves `∂ρ = (Lρ + ρL)/2` in the eigenbasis of ρ. Components across the
/// kernel (relative `support_cutoff`) are set to zero.
pub fn solve_sld(rho: &DensOp, drho: &CMatrix, support_cutoff: f64) -> Result<Obs> {
    let d = rho.dim();
    if drho.nrows() != d || drho.ncols() != d {
        return Err(Error::invalid("derivative and state dimensions differ"));
    }
    if hermiticity_defect(drho) > 1e-10 * max_abs(drho).max(1.0) {
        return Err(Error::invalid("derivative is not Hermitian"));
    }
    let eig = Eigenbasis::new(rho.matrix(), support_cutoff)?;
    let b = eig.v.adjoint() * drho * &eig.v;
    let l = &eig.v * eig.solve(&b) * eig.v.adjoint();
    Ok(Obs::from_trusted(l))
}

/// Both SLDs of the displacement model from one eigen-decomposition.
pub fn sld_set(rho: &DensOp, support_cutoff: f64) -> Result<SldSet> {
    let eig = Eigenbasis::new(rho.matrix(), support_cutoff)?;
    let mut ls = GENERATORS.iter().map(|&q| {
        let b = eig.v.adjoint() * quadrature_derivative(rho.matrix(), q) * &eig.v;
        Obs::from_trusted(&eig.v * eig.solve(&b) * eig.v.adjoint())
    });
    let l1 = ls.next().expect("two generators");
    let l2 = ls.next().expect("two generators");
    Ok(SldSet {
        l1,
        l2,
        support_rank: eig.rank(),
        support_cutoff,
    })
}

/// `X_μν = Tr[ρ L_μ L_ν]`.
fn second_moments(rho: &DensOp, slds: &SldSet) -> Result<Matrix2<C64>> {
    let d = rho.dim();
    if slds.l1.dim() != d || slds.l2.dim() != d {
        return Err(Error::invalid("SLD and state dimensions differ"));
    }
    let rho_l = [rho.matrix() * slds.l1.matrix(), rho.matrix() * slds.l2.matrix()];
    Ok(Matrix2::from_fn(|mu, nu| {
        // Σ_ij (ρL_μ)_ij (L_ν)_ji, with (L_ν)_ji = conj((L_ν)_ij)
        rho_l[mu]
            .iter()
            .zip(slds.get(nu).matrix().iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }))
}

/// `Q_μν = Tr[ρ {L_μ, L_ν}]/2`.
pub fn qfi_from_slds(rho: &DensOp, slds: &SldSet) -> Result<QfiMatrix> {
    let x = second_moments(rho, slds)?;
    let sym = (x + x.transpose()) * re(0.5);
    let scale = sym.iter().fold(1.0f64, |a, z| a.max(z.norm()));
    if sym.iter().any(|z| z.im.abs() > 1e-9 * scale) {
        return Err(Error::InternalInconsistency(
            "QFI has a non-negligible imaginary part".into(),
        ));
    }
    QfiMatrix::new(sym.map(|z| z.re))
}

/// `D_μν = -(i/2) Tr[ρ [L_μ, L_ν]]`.
pub fn uhlmann_from_slds(rho: &DensOp, slds: &SldSet) -> Result<UhlmannMatrix> {
    let x = second_moments(rho, slds)?;
    let d = (x - x.transpose()) * C64::new(0.0, -0.5);
    let scale = d.iter().fold(1.0f64, |a, z| a.max(z.norm()));
    if d.iter().any(|z| z.im.abs() > 1e-9 * scale) {
        return Err(Error::InternalInconsistency("Uhlmann curvature is not real".into()));
    }
    UhlmannMatrix::new(d.map(|z| z.re))
}

/// Raw `Q` and `D` from one of the two SLD routes.
pub(crate) struct RouteOutput {
    pub q: Matrix2<f64>,
    pub d: Matrix2<f64>,
    pub support_rank: usize,
    pub route: Route,
}

fn split(x: Matrix2<C64>, route: Route, support_rank: usize) -> RouteOutput {
    RouteOutput {
        q: x.map(|z| z.re),
        d: x.map(|z| z.im),
        support_rank,
        route,
    }
}

/// Works entirely in the eigenbasis of ρ:
/// `L_jk = -2i G_jk (p_k - p_j)/(p_j + p_k)` with `G` rotated into that basis,
/// and `X_μν = Σ_jk p_j L^μ_jk conj(L^ν_jk)`.
pub(crate) fn full_route(rho: &DensOp, support_cutoff: f64) -> Result<RouteOutput> {
    let eig = Eigenbasis::new(rho.matrix(), support_cutoff)?;
    let n = eig.p.len();
    let l: Vec<CMatrix> = GENERATORS
        .iter()
        .map(|&q| {
            let g = eig.v.adjoint() * q.left_mul(&eig.v);
            let b = CMatrix::from_fn(n, n, |j, k| g[(j, k)] * (-I) * (eig.p[k] - eig.p[j]));
            eig.solve(&b)
        })
        .collect();
    let x = Matrix2::from_fn(|mu, nu| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            for j in 0..n {
                acc += l[mu][(j, k)] * l[nu][(j, k)].conj() * eig.p[j];
            }
        }
        acc
    });
    Ok(split(x, Route::Full, eig.rank()))
}

/// For `ρ = A A†` with few columns. The support of ρ is spanned by
/// `e_j = A v_j / √p_j` where `(p_j, v_j)` diagonalize `A†A`; the SLD
/// acting on `e_j` is
/// `Σ_k 2B_kj/(p_k + p_j) e_k + (2/p_j)(∂ρ e_j - Σ_k e_k B_kj)`,
/// `B_kj = ⟨e_k|∂ρ|e_j⟩`.
pub(crate) fn low_rank_route(a: &CMatrix, support_cutoff: f64) -> Result<RouteOutput> {
    let gram = a.adjoint() * a;
    let eig = Eigenbasis::new(&gram, support_cutoff)?;
    let keep: Vec<usize> = (0..eig.p.len()).filter(|&j| eig.p[j] > eig.threshold).collect();
    if keep.is_empty() {
        return Err(Error::DegenerateInput("state has no support".into()));
    }
    let p: Vec<f64> = keep.iter().map(|&j| eig.p[j]).collect();
    let k = keep.len();
    let mut e = CMatrix::zeros(a.nrows(), k);
    for (c, &j) in keep.iter().enumerate() {
        e.set_column(c, &((a * eig.v.column(j)) / re(p[c].sqrt())));
    }

    let z: Vec<CMatrix> = GENERATORS
        .iter()
        .map(|&q| {
            let ge = q.left_mul(&e);
            // ∂ρ e_j = -i(p_j G e_j - A A† G e_j)
            let mut y = ge.clone();
            for (j, mut col) in y.column_iter_mut().enumerate() {
                col *= re(p[j]);
            }
            y -= a * (a.adjoint() * &ge);
            y *= -I;
            let b = e.adjoint() * &y;
            let c = CMatrix::from_fn(k, k, |i, j| b[(i, j)] * (2.0 / (p[i] + p[j])));
            let mut w = y - &e * &b;
            for (j, mut col) in w.column_iter_mut().enumerate() {
                col *= re(2.0 / p[j]);
            }
            &e * c + w
        })
        .collect();
    let x = Matrix2::from_fn(|mu, nu| {
        (0..k)
            .map(|j| z[mu].column(j).dotc(&z[nu].column(j)) * p[j])
            .sum::<C64>()
    });
    Ok(split(x, Route::LowRank, k))
}
