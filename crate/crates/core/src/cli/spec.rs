use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    coherent, fock, fock_diagonal, photon_added_thermal, squeezed_mixture, squeezed_vacuum, superpose, thermal, Probe,
};
use crate::linalg::C64;

/// One term `(re + i·im)|n⟩` of a Fock superposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockTerm {
    pub n: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum StateKind {
    Fock {
        n: usize,
    },
    Coherent {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Squeezed {
        r: f64,
    },
    FockSuperposition {
        terms: Vec<FockTerm>,
    },
    FockDiagonal {
        probs: Vec<f64>,
    },
    PhotonAddedThermal {
        lambda: f64,
    },
    SqueezedMixture {
        r: f64,
    },
    Thermal {
        nbar: f64,
    },
}

/// Probe description as read from a state file:
/// `{"kind": "squeezed", "params": {"r": 0.5}, "dim": 128}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    #[serde(flatten)]
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

pub const FOCK_FAMILY_DIM: usize = 64;

/// `32·e^{2|r|}` rounded up to a power of two, at least 64.
pub fn squeezing_dim(r: f64) -> usize {
    let raw = (32.0 * (2.0 * r.abs()).exp()).ceil();
    if !raw.is_finite() || raw > 1e6 {
        return usize::MAX;
    }
    (raw as usize).next_power_of_two().max(FOCK_FAMILY_DIM)
}

/// Levels needed for a geometric tail `λⁿ` to drop below 1e-16, plus slack.
fn geometric_dim(lambda: f64) -> usize {
    if lambda <= 0.0 {
        return FOCK_FAMILY_DIM;
    }
    if lambda >= 1.0 {
        return usize::MAX;
    }
    let n = (-16.0 * std::f64::consts::LN_10 / lambda.ln()).ceil() as usize + 16;
    n.next_power_of_two().max(FOCK_FAMILY_DIM)
}

impl StateSpec {
    pub fn new(kind: StateKind) -> Self {
        StateSpec { kind, dim: None }
    }

    /// Default truncation when neither the file nor the command line sets one.
    pub fn default_dim(&self) -> usize {
        let at_least = |n: usize| (n + 16).next_power_of_two().max(FOCK_FAMILY_DIM);
        match &self.kind {
            StateKind::Fock { n } => at_least(*n),
            StateKind::Coherent { re, im } => {
                let a2 = re * re + im * im;
                at_least((a2 + 10.0 * a2.sqrt()).ceil() as usize)
            }
            StateKind::Squeezed { r } | StateKind::SqueezedMixture { r } => squeezing_dim(*r),
            StateKind::FockSuperposition { terms } => at_least(terms.iter().map(|t| t.n).max().unwrap_or(0)),
            StateKind::FockDiagonal { probs } => at_least(probs.len()),
            StateKind::PhotonAddedThermal { lambda } => geometric_dim(*lambda),
            StateKind::Thermal { nbar } => geometric_dim(nbar / (1.0 + nbar)),
        }
    }

    /// Command-line override, then the file's `dim`, then the default.
    pub fn resolve_dim(&self, cli: Option<usize>) -> usize {
        cli.or(self.dim).unwrap_or_else(|| self.default_dim())
    }

    /// Whether the state is Gaussian, which enables the covariance-matrix
    /// cross-checks in the analysis.
    pub fn is_gaussian(&self) -> bool {
        match &self.kind {
            StateKind::Fock { n } => *n == 0,
            StateKind::Coherent { .. } | StateKind::Squeezed { .. } | StateKind::Thermal { .. } => true,
            _ => false,
        }
    }

    pub fn build(&self, d: usize) -> Result<Probe> {
        Ok(match &self.kind {
            StateKind::Fock { n } => fock(*n, d)?.into(),
            StateKind::Coherent { re, im } => coherent(C64::new(*re, *im), d)?.into(),
            StateKind::Squeezed { r } => squeezed_vacuum(*r, d)?.into(),
            StateKind::FockSuperposition { terms } => {
                if terms.is_empty() {
                    return Err(Error::invalid("fock_superposition needs at least one term"));
                }
                let kets = terms
                    .iter()
                    .map(|t| Ok((C64::new(t.re, t.im), fock(t.n, d)?)))
                    .collect::<Result<Vec<_>>>()?;
                superpose(&kets)?.into()
            }
            StateKind::FockDiagonal { probs } => fock_diagonal(probs, d)?.into(),
            StateKind::PhotonAddedThermal { lambda } => photon_added_thermal(*lambda, d)?.into(),
            StateKind::SqueezedMixture { r } => squeezed_mixture(*r, d)?.into(),
            StateKind::Thermal { nbar } => thermal(*nbar, d)?.into(),
        })
    }
}
