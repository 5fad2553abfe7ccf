//! Job specs, the analysis pipeline and JSON reports for the `thetapencil` binary.

pub mod check;
pub mod run;
pub mod spec;

pub use check::{check_report, CheckError, CheckOutcome};
pub use run::{render, run, RunOptions, RunOutcome};
pub use spec::{parse_spec, JobSpec, SpecError, Stage};

/// Process exit codes.
pub mod exit {
    /// Every stage ran and every certificate passed.
    pub const OK: u8 = 0;
    /// A certificate failed, a stage errored, or `check` could not reproduce a certificate.
    pub const FAILED: u8 = 1;
    /// The spec or report could not be read or is invalid.
    pub const INVALID: u8 = 2;
}
