//! Multiparameter estimation of phase-space displacements with single-mode
//! bosonic probes, in a truncated Fock basis.
//!
//! ```
//! use qdisp::estimation::{analyze, AnalyzeOptions, DisplacementModel};
//! use qdisp::hilbert::fock;
//!
//! let report = analyze(&DisplacementModel::new(fock(1, 32)?), &AnalyzeOptions::default())?;
//! assert!((report.qfi.matrix()[(0, 0)] - 6.0).abs() < 1e-9);
//! assert!((report.r.get() - 1.0 / 3.0).abs() < 1e-9);
//! # Ok::<(), qdisp::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod estimation;
pub mod gaussian;
pub mod hilbert;
pub mod linalg;
pub mod purification;

pub use error::{Error, Result};
