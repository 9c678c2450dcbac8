//! Config files, output formats and the `run`, `verify` and `compare`
//! commands built on `kinvlasov-core`.

pub mod config_file;
pub mod error;
pub mod output;
pub mod run;
pub mod verify;

pub use config_file::{parse_config, render_config};
pub use error::{CliError, LocatedViolation, Result};
pub use run::{compare, compare_command, run, run_command, RunSummary};
