//! Standard probe states.

use super::{check_weights, DensOp, Dim, Ensemble, Ket};
use crate::error::{Error, Result};
use crate::linalg::{re, CMatrix, CVector, C64};

/// Largest probability mass a constructor may drop when truncating.
const CONSTRUCTOR_TAIL: f64 = 1e-10;

fn truncated_ket(amps: CVector, what: &str) -> Result<Ket> {
    let kept = amps.norm_squared();
    let tail = (1.0 - kept).max(0.0);
    if tail >= CONSTRUCTOR_TAIL {
        return Err(Error::truncation(what, tail, amps.len()));
    }
    Ket::normalized(amps)
}

fn diagonal_state(probs: Vec<f64>, what: &str) -> Result<DensOp> {
    let d = probs.len();
    let kept: f64 = probs.iter().sum();
    let tail = (1.0 - kept).max(0.0);
    if tail >= CONSTRUCTOR_TAIL {
        return Err(Error::truncation(what, tail, d));
    }
    let diag = CVector::from_iterator(d, probs.iter().map(|p| re(p / kept)));
    Ok(DensOp::from_trusted(CMatrix::from_diagonal(&diag)))
}

/// Number state `|n⟩`.
pub fn fock(n: usize, d: usize) -> Result<Ket> {
    let d = Dim::new(d)?.get();
    if n >= d {
        return Err(Error::invalid(format!("Fock level {n} outside dimension {d}")));
    }
    let mut amps = CVector::zeros(d);
    amps[n] = re(1.0);
    Ket::new(amps)
}

/// Coherent state with amplitudes `∝ αⁿ/√(n!)`.
pub fn coherent(alpha: C64, d: usize) -> Result<Ket> {
    let d = Dim::new(d)?.get();
    let mut amps = CVector::zeros(d);
    let mut c = re((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..d {
        amps[n] = c;
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    truncated_ket(amps, "coherent state")
}

/// Squeezed vacuum.
///
/// Amplitudes `(-tanh r)ⁿ √((2n)!)/(2ⁿ n!) / √(cosh r)` on `|2n⟩`; positive `r`
/// squeezes `x`, giving the covariance matrix `½ diag(e^{-2r}, e^{2r})`.
pub fn squeezed_vacuum(r: f64, d: usize) -> Result<Ket> {
    let d = Dim::new(d)?.get();
    if !r.is_finite() {
        return Err(Error::invalid("squeezing must be finite"));
    }
    let t = r.tanh();
    let mut amps = CVector::zeros(d);
    let mut c = 1.0 / r.cosh().sqrt();
    let mut k = 0usize;
    while 2 * k < d {
        amps[2 * k] = re(c);
        // c_{2k+2} / c_{2k} = -tanh(r) √((2k+1)/(2k+2))
        c *= -t * (((2 * k + 1) as f64) / ((2 * k + 2) as f64)).sqrt();
        k += 1;
    }
    truncated_ket(amps, "squeezed vacuum")
}

/// Normalized linear combination `Σ c_i |ψ_i⟩`.
pub fn superpose(terms: &[(C64, Ket)]) -> Result<Ket> {
    let first = terms.first().ok_or_else(|| Error::invalid("empty superposition"))?;
    let d = first.1.amplitudes().len();
    let mut acc = CVector::zeros(d);
    for (c, k) in terms {
        if k.amplitudes().len() != d {
            return Err(Error::invalid("superposition terms have different dimensions"));
        }
        acc += k.amplitudes() * *c;
    }
    Ket::normalized(acc)
}

/// Convex combination `Σ w_i ρ_i`.
pub fn mix(terms: &[(f64, DensOp)]) -> Result<DensOp> {
    let first = terms.first().ok_or_else(|| Error::invalid("empty mixture"))?;
    let d = first.1.matrix().nrows();
    if terms.iter().any(|(_, r)| r.matrix().nrows() != d) {
        return Err(Error::invalid("mixture terms have different dimensions"));
    }
    check_weights(terms.iter().map(|(w, _)| *w))?;
    let mut acc = CMatrix::zeros(d, d);
    for (w, r) in terms {
        acc += r.matrix() * re(*w);
    }
    Ok(DensOp::from_trusted(acc))
}

/// Fock-diagonal state with the given populations (padded with zeros to `d`).
pub fn fock_diagonal(probs: &[f64], d: usize) -> Result<DensOp> {
    let d = Dim::new(d)?.get();
    if probs.len() > d {
        return Err(Error::invalid(format!(
            "{} populations exceed dimension {d}",
            probs.len()
        )));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::invalid("populations must be non-negative"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("populations sum to {total}, expected 1")));
    }
    let mut padded = probs.to_vec();
    padded.resize(d, 0.0);
    Ok(DensOp::from_trusted(CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        padded.into_iter().map(re),
    ))))
}

/// Thermal state with mean occupation `nbar`: `p_n = (1-λ)λⁿ`, `λ = n̄/(n̄+1)`.
pub fn thermal(nbar: f64, d: usize) -> Result<DensOp> {
    let d = Dim::new(d)?.get();
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::invalid(format!(
            "mean occupation must be non-negative, got {nbar}"
        )));
    }
    let lam = nbar / (nbar + 1.0);
    let probs = (0..d).map(|n| (1.0 - lam) * lam.powi(n as i32)).collect();
    diagonal_state(probs, "thermal state")
}

/// Photon-added thermal state: `p_n = n (1-λ)² λ^{n-1}`.
pub fn photon_added_thermal(lam: f64, d: usize) -> Result<DensOp> {
    let d = Dim::new(d)?.get();
    if !(0.0..1.0).contains(&lam) {
        return Err(Error::invalid(format!("lambda must lie in [0, 1), got {lam}")));
    }
    let probs = (0..d)
        .map(|n| {
            if n == 0 {
                0.0
            } else {
                n as f64 * (1.0 - lam).powi(2) * lam.powi(n as i32 - 1)
            }
        })
        .collect();
    diagonal_state(probs, "photon-added thermal state")
}

/// Balanced mixture `½|r⟩⟨r| + ½|-r⟩⟨-r|` of squeezed vacua, kept in
/// low-rank form.
pub fn squeezed_mixture(r: f64, d: usize) -> Result<Ensemble> {
    Ensemble::new(vec![(0.5, squeezed_vacuum(r, d)?), (0.5, squeezed_vacuum(-r, d)?)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::State;

    #[test]
    fn fock_out_of_range() {
        assert!(matches!(fock(8, 8), Err(Error::InvalidInput(_))));
        assert!(fock(7, 8).is_ok());
    }

    #[test]
    fn coherent_truncation() {
        assert!(matches!(coherent(re(4.0), 8), Err(Error::Truncation { .. })));
        let vac = coherent(re(0.0), 8).unwrap();
        assert_eq!(vac, fock(0, 8).unwrap());
    }

    #[test]
    fn squeezed_zero_is_vacuum() {
        let s = squeezed_vacuum(0.0, 8).unwrap();
        assert!((s.inner(&fock(0, 8).unwrap()).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn squeezed_needs_enough_levels() {
        // d = 64 keeps ~4e-9 of the r = 1 state beyond the cut.
        assert!(matches!(squeezed_vacuum(1.0, 64), Err(Error::Truncation { .. })));
        assert!(squeezed_vacuum(1.0, 160).is_ok());
    }

    #[test]
    fn squeezed_amplitudes_match_factorial_formula() {
        // Independent evaluation of √((2n)!)/(2ⁿ n!) through log-gamma sums.
        let r: f64 = 0.8;
        let s = squeezed_vacuum(r, 80).unwrap();
        let ln_fact = |m: usize| (1..=m).map(|k| (k as f64).ln()).sum::<f64>();
        for n in 0..10 {
            let mag = (0.5 * ln_fact(2 * n) - n as f64 * 2f64.ln() - ln_fact(n)).exp() * r.tanh().powi(n as i32)
                / r.cosh().sqrt();
            let expected = if n % 2 == 0 { mag } else { -mag };
            assert!((s.amplitudes()[2 * n].re - expected).abs() < 1e-12);
            assert_eq!(s.amplitudes()[2 * n + 1], re(0.0));
        }
    }

    #[test]
    fn superposition_of_cancelling_terms() {
        let v = fock(0, 4).unwrap();
        assert!(matches!(
            superpose(&[(re(1.0), v.clone()), (re(-1.0), v.clone())]),
            Err(Error::DegenerateInput(_))
        ));
        assert_eq!(superpose(&[(re(1.0), v.clone())]).unwrap(), v);
    }

    #[test]
    fn mix_weight_validation() {
        let v = fock(0, 4).unwrap().to_densop();
        assert!(matches!(
            mix(&[(0.6, v.clone()), (0.6, v.clone())]),
            Err(Error::InvalidInput(_))
        ));
        assert!(mix(&[(-0.5, v.clone()), (1.5, v.clone())]).is_err());
        assert_eq!(mix(&[(1.0, v.clone())]).unwrap(), v);
    }

    #[test]
    fn squeezed_mixture_purity() {
        let r = 1.0;
        let d = 200;
        let plus = squeezed_vacuum(r, d).unwrap();
        let minus = squeezed_vacuum(-r, d).unwrap();
        let rho = mix(&[(0.5, plus.to_densop()), (0.5, minus.to_densop())]).unwrap();
        let expected = 0.5 * (1.0 + plus.inner(&minus).norm_sqr());
        assert!((rho.purity() - expected).abs() < 1e-12);
        // ⟨r|-r⟩ = 1/√cosh(2r)
        assert!((plus.inner(&minus).norm() - 1.0 / (2.0 * r).cosh().sqrt()).abs() < 1e-9);
    }

    #[test]
    fn photon_added_thermal_populations() {
        let at_zero = photon_added_thermal(0.0, 8).unwrap();
        assert_eq!(at_zero, fock(1, 8).unwrap().to_densop());
        let half = photon_added_thermal(0.5, 64).unwrap();
        let p = half.populations();
        assert!((p[1] - 0.25).abs() < 1e-15);
        assert!((p[2] - 0.25).abs() < 1e-15);
        assert!(matches!(photon_added_thermal(0.99, 64), Err(Error::Truncation { .. })));
        assert!(matches!(photon_added_thermal(1.0, 64), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn fock_diagonal_validation() {
        assert!(fock_diagonal(&[0.5, 0.6], 4).is_err());
        assert!(fock_diagonal(&[0.5, -0.5, 1.0], 4).is_err());
        assert!(fock_diagonal(&[0.2; 5], 4).is_err());
        let rho = fock_diagonal(&[0.75, 0.25], 4).unwrap();
        assert_eq!(rho.populations(), vec![0.75, 0.25, 0.0, 0.0]);
    }
}
