//! Reproduction harness and generic analysis front end behind the `qdisp`
//! binary.

mod commands;
mod record;
mod spec;
mod validate;

pub use commands::{
    analyze_spec, purify, purify_default_dim, repro_fock, repro_photon_added_thermal, repro_squeezed_mixture,
    repro_vacuum_one, uniform_grid, RunOptions, DEFAULT_SQUEEZE_GRID,
};
pub use record::{Annotation, Format, Meta, RunRecord, QNG_THRESHOLD, TOOL_VERSION, WIGNER_THRESHOLD};
pub use spec::{squeezing_dim, FockTerm, StateKind, StateSpec, FOCK_FAMILY_DIM};
pub use validate::{render_table, run_validation, validation_record, CheckResult, Level};
