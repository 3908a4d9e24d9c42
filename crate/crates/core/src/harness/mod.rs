//! Experiment campaigns: force-gauge characterization, curve fitting,
//! lock scenario scripts and jump-trial batches.

mod characterize;
mod config;
mod fit;
mod jump;
mod locktest;
mod peak;
mod stats;

pub use characterize::{characterize, read_samples, write_samples, CharacterizeOptions, CharacterizationRun, GaugeSample};
pub use config::{load_config, resolve_spine, HarnessConfig, JumpSection, LockSection, PreprocessSection, SpineSource};
pub use fit::{polyfit2, preprocess, FilterReport, FitResult};
pub use jump::{comparison_table, derive_trial_seed, jump_experiment, JumpExperiment, ModeSummary, TrialRecord};
pub use locktest::{locktest, LockScenario, LockScenarioRun};
pub use peak::{peak_report, PeakReport};
pub use stats::BoxStats;

use thiserror::Error;

/// Version tag written into every JSON document the harness emits.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] crate::spine::ModelError),
    #[error(transparent)]
    Lock(#[from] crate::lock::LockError),
    #[error(transparent)]
    Sim(#[from] crate::sim::SimFault),
    #[error("data: {0}")]
    Data(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
