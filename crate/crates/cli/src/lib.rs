//! Configuration-driven refinement studies and verification suites for
//! the coupled FEM-BEM solver, with CSV and Matrix Market output.

pub mod config;
pub mod export;
pub mod study;

pub use config::{CaseName, ConfigError, Mode, StudyConfig};
pub use study::{run_one, run_study, run_study_runs, RunResult, StudyOutcome, StudyRow, CSV_COLUMNS};
