//! Configuration-driven runner for `qrdyn-core`: JSON configs in, PGM/PPM
//! images, CSV tables and a JSON summary out.

pub mod config;
pub mod pnm;
pub mod report;
pub mod run;

pub use config::{Job, MapSpec, RunConfig};
pub use pnm::ImageField;
pub use run::{run, run_file, RunError, RunSummary};
