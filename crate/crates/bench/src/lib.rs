//! Scenario registry, batch runner and CSV/report output for the
//! wall-collision safety experiments.

pub mod config;
pub mod csv_io;
pub mod registry;
pub mod report;
pub mod runner;
pub mod verify;

use std::path::{Path, PathBuf};

pub use config::ConfigFile;
pub use csv_io::{emit_csv, parse_csv, read_csv, rows, write_csv, CsvRow, HEADER};
pub use registry::{lookup, registry, Expectations, IcExpectation, Scenario};
pub use runner::{run, summarize, IcOutcome, IcRun, IcSummary, Overrides, RunSummary};
pub use verify::{evaluate, verify, Check, VerifyReport};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(cbf_core::SimError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}

impl BenchError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, source: csv::Error) -> Self {
        Self::Csv {
            path: path.to_owned(),
            source,
        }
    }

    /// Usage-type errors map to exit status 2.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Self::UnknownScenario(_)
                | Self::Config(_)
                | Self::Sim(cbf_core::SimError::InvalidConfig(_))
        )
    }
}
