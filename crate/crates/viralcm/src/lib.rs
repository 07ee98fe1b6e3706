//! Experiment orchestration on top of `viralcm-core`: TOML configuration,
//! replicated runs in parallel, aggregate reports and their file formats.

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{ConfigError, DistributionSpec, ExperimentConfig, Tolerances};
pub use experiment::{run, RunError};
pub use report::{AggregateReport, Check, Command, ReplicateStats, Summary, TheoryBlock};
