//! Command layer: matrix file I/O, run reports, and the trial-suite runner
//! used by the `idemlab` binary and the integration tests.

pub mod commands;
pub mod io;
pub mod trials;

pub use commands::{
    classify_matrix, cmd_decompose, cmd_hardy, cmd_pipeline_nrr, cmd_trials, hardy_matrix,
    CommandReport, ExitClass,
};
pub use io::{parse_matrix, spectrum_csv, MatrixFile};
pub use trials::{run_suite, Suite, SuiteReport};
