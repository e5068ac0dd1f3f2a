//! Configuration, initial data, output files and the experiments behind the
//! command-line interface.

pub mod config;
pub mod presets;
pub mod run;
pub mod snapshot;
pub mod sweep;

pub use config::{parse_config, ModelKind, RunConfig};
pub use presets::{make_initial, InitialState, Preset};
pub use run::{hookean_consistency, run, ConsistencyOutcome, RunOutcome};
pub use sweep::{sweep, SweepRow, Variation};

use crate::error::Error;

/// Process exit status for an error: 2 for a CFL breach, 3 for overflow,
/// 1 for everything else (configuration and I/O).
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::CflViolation { .. } => 2,
        Error::NonFinite { .. } => 3,
        _ => 1,
    }
}

/// Exit status when a verification reports a failure.
pub const VERIFICATION_FAILED: i32 = 4;
