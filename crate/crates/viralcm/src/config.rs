//! Experiment configuration, read from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};
use viralcm_core::{DegreeError, DegreeSequence, JointDegreeDistribution};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("invalid distribution: {0}")]
    Distribution(#[from] DegreeError),
}

/// Degree law: a thinned Poisson family or an explicit table of
/// `[receivers, transmitters, probability]` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    ThinnedPoisson { mu: f64, q: f64, cutoff: u32 },
    Table { rows: Vec<(u32, u32, f64)> },
}

impl Default for DistributionSpec {
    fn default() -> Self {
        DistributionSpec::ThinnedPoisson { mu: 4.0, q: 0.5, cutoff: 30 }
    }
}

impl DistributionSpec {
    pub fn build(&self) -> Result<JointDegreeDistribution, DegreeError> {
        match self {
            DistributionSpec::ThinnedPoisson { mu, q, cutoff } => JointDegreeDistribution::thinned_poisson(*mu, *q, *cutoff),
            DistributionSpec::Table { rows } => JointDegreeDistribution::from_table(rows.iter().copied()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionChoice {
    Forward,
    Reverse,
    #[default]
    Both,
}

impl DirectionChoice {
    pub fn forward(self) -> bool {
        matches!(self, DirectionChoice::Forward | DirectionChoice::Both)
    }

    pub fn reverse(self) -> bool {
        matches!(self, DirectionChoice::Reverse | DirectionChoice::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Mu,
    #[default]
    Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { parameter: SweepParameter::Q, values: (1..=9).map(|i| f64::from(i) / 10.0).collect() }
    }
}

/// Tolerances for `--check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Mean component fractions against their predictions.
    pub component_fraction: f64,
    /// Largest share of sampled vertices whose class is contradicted.
    pub violation_rate: f64,
    /// Bound on `|C(x) △ C(x')| / n` for two large sources.
    pub pair_divergence: f64,
    /// Share of pairs that must respect `pair_divergence`.
    pub pair_pass_rate: f64,
    /// Bound on the largest sampled `|C(x)| / n` when subcritical.
    pub subcritical_fraction: f64,
    pub fluid: f64,
    pub window_time: f64,
    pub window_size: f64,
    /// Share of replicates in which the window must match.
    pub window_pass_rate: f64,
    pub duality: f64,
    pub survival: f64,
    /// Oracle agreement, in binomial standard deviations.
    pub oracle_sigmas: f64,
    pub extinction_consistency: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            component_fraction: 0.015,
            violation_rate: 0.02,
            pair_divergence: 0.01,
            pair_pass_rate: 0.98,
            subcritical_fraction: 0.01,
            fluid: 0.02,
            window_time: 0.05,
            window_size: 0.015,
            window_pass_rate: 0.9,
            duality: 0.05,
            survival: 0.01,
            oracle_sigmas: 4.0,
            extinction_consistency: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    pub n: usize,
    pub replicates: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    /// Worker threads; `None` uses every core. Results do not depend on it.
    pub threads: Option<usize>,
    pub sample_size: usize,
    pub pairs: usize,
    pub tautology_pairs: usize,
    pub watch: Option<Vec<(u32, u32)>>,
    pub watch_all: bool,
    pub direction: DirectionChoice,
    pub literal_reverse: bool,
    pub max_generations: usize,
    pub gw_reps: usize,
    pub population_cap: u64,
    /// Explicit `(receivers, transmitters)` list for the `oracle` command.
    pub degrees: Option<Vec<(u32, u32)>>,
    pub oracle_draws: usize,
    pub sweep: SweepSpec,
    /// Write one trajectory file per replicate when an output directory is set.
    pub trajectories: bool,
    /// Write the sampled multigraph of each replicate as an edge list.
    pub edge_list: bool,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            distribution: DistributionSpec::default(),
            n: 100_000,
            replicates: 20,
            master_seed: 0,
            epsilon: 0.05,
            threads: None,
            sample_size: 200,
            pairs: 50,
            tautology_pairs: 20,
            watch: None,
            watch_all: false,
            direction: DirectionChoice::Both,
            literal_reverse: false,
            max_generations: 50,
            gw_reps: 100_000,
            population_cap: 1000,
            degrees: None,
            oracle_draws: 100_000,
            sweep: SweepSpec::default(),
            trajectories: true,
            edge_list: false,
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: &str| Err(ConfigError::Invalid(msg.to_string()));
        if self.n == 0 {
            return invalid("n must be at least 1");
        }
        if self.replicates == 0 {
            return invalid("replicates must be at least 1");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return invalid("epsilon must lie strictly between 0 and 1");
        }
        if self.threads == Some(0) {
            return invalid("threads must be at least 1");
        }
        if self.gw_reps == 0 || self.max_generations == 0 {
            return invalid("gw_reps and max_generations must be at least 1");
        }
        if let Some(d) = &self.degrees {
            DegreeSequence::from_pairs(d.clone()).map_err(|e| ConfigError::Invalid(format!("degrees: {e}")))?;
        }
        self.distribution.build()?;
        Ok(())
    }
}
