use super::{Obs, State};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Tail mass above which derived quantities are refused.
pub const TAIL_FAIL: f64 = 1e-8;
/// Tail mass above which derived quantities carry a warning.
pub const TAIL_WARN: f64 = 1e-10;

/// `Tr[ρ A]` for Hermitian `A`.
pub fn expectation<S: State + ?Sized>(obs: &Obs, state: &S) -> Result<f64> {
    let v = state.expect(obs.matrix())?;
    if v.im.abs() > 1e-10 * v.re.abs().max(1.0) {
        return Err(Error::InternalInconsistency(format!(
            "expectation of a Hermitian operator has imaginary part {:.3e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// `E = Tr[ρ n]`
pub fn mean_energy<S: State + ?Sized>(state: &S) -> f64 {
    state.moments().n
}

/// Wigner function at the phase-space origin, `(1/π) Σ (-1)ⁿ ρ_nn`.
pub fn wigner_origin<S: State + ?Sized>(state: &S) -> f64 {
    state
        .populations()
        .iter()
        .enumerate()
        .map(|(n, p)| if n % 2 == 0 { *p } else { -*p })
        .sum::<f64>()
        / PI
}

/// Population of the top `k` Fock levels.
pub fn tail_mass<S: State + ?Sized>(state: &S, k: usize) -> Result<f64> {
    let pops = state.populations();
    let d = pops.len();
    if k == 0 || k > d {
        return Err(Error::invalid(format!("tail window {k} outside 1..={d}")));
    }
    Ok(pops[d - k..].iter().sum())
}

/// Number of top levels watched by [`tail_gate`]: 8, or `d/4` for tiny spaces.
pub fn tail_window(d: usize) -> usize {
    (d / 4).clamp(1, 8)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCheck {
    pub window: usize,
    pub mass: f64,
    pub warning: bool,
}

/// Refuses states with more than [`TAIL_FAIL`] population in the top
/// [`tail_window`] levels.
pub fn tail_gate<S: State + ?Sized>(state: &S) -> Result<TailCheck> {
    let d = state.dim();
    let window = tail_window(d);
    let mass = tail_mass(state, window)?;
    if mass > TAIL_FAIL {
        return Err(Error::truncation(
            format!("population {mass:.3e} in the top {window} levels"),
            mass,
            d,
        ));
    }
    Ok(TailCheck {
        window,
        mass,
        warning: mass > TAIL_WARN,
    })
}
