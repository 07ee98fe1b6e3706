//! Aggregate reports and the formats they are written in.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use viralcm_core::{Direction, EnhancedMultigraph, ExplorationTrace, MomentSummary, TheoryPrediction};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Theory,
    Simulate,
    Explore,
    Duality,
    Oracle,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Theory => "theory",
            Command::Simulate => "simulate",
            Command::Explore => "explore",
            Command::Duality => "duality",
            Command::Oracle => "oracle",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryBlock {
    pub moments: MomentSummary,
    pub criticality_margin: f64,
    pub supercritical: bool,
    /// Absent when the law is not supercritical.
    pub prediction: Option<TheoryPrediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateStats {
    pub index: usize,
    pub seed: u64,
    pub stats: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; zero for a single replicate.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { mean, sd, min, max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub command: Command,
    pub config: ExperimentConfig,
    pub theory: TheoryBlock,
    /// One entry per replicate for the sampled pipelines; empty for single-shot ones.
    pub replicates: Vec<ReplicateStats>,
    pub aggregate: BTreeMap<String, Summary>,
    /// Results of single-shot pipelines.
    pub values: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl AggregateReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Fills `aggregate` from the replicate statistics.
    pub fn summarize(&mut self) {
        let mut columns: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for r in &self.replicates {
            for (k, v) in &r.stats {
                columns.entry(k).or_default().push(*v);
            }
        }
        self.aggregate = columns.into_iter().map(|(k, v)| (k.to_string(), Summary::of(&v))).collect();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "command: {}", self.command.name());
        let _ = writeln!(s, "distribution: {:?}", c.distribution);
        let _ = writeln!(s, "n = {}  replicates = {}  master_seed = {}  epsilon = {}", c.n, c.replicates, c.master_seed, c.epsilon);
        let t = &self.theory;
        let _ = writeln!(
            s,
            "lambda = {:.6}  lambda_r = {:.6}  lambda_t = {:.6}  E[D_t D] = {:.6}  margin = {:.6}  supercritical = {}",
            t.moments.lambda, t.moments.lambda_r, t.moments.lambda_t, t.moments.e_dt_d, t.criticality_margin, t.supercritical
        );
        if let Some(p) = &t.prediction {
            let _ = writeln!(s, "xi = {:.9}  xi_bar = {:.9}", p.forward_root, p.reverse_root);
            let _ = writeln!(s, "tau = {:.9}  tau_bar = {:.9}", p.forward_horizon, p.reverse_horizon);
            let _ = writeln!(s, "influenced_fraction = {:.9}", p.influenced_fraction);
            let _ = writeln!(s, "pioneer_fraction = {:.9}", p.pioneer_fraction);
            let _ = writeln!(s, "p_ext = {:.9}  p_ext_tilde = {:.9}", p.extinction, p.subtree_extinction);
        }
        if !self.values.is_empty() {
            let _ = writeln!(s, "\nvalues:");
            for (k, v) in &self.values {
                let _ = writeln!(s, "  {k} = {v}");
            }
        }
        if !self.aggregate.is_empty() {
            let _ = writeln!(s, "\n{:<32} {:>14} {:>14} {:>14} {:>14}", "statistic", "mean", "sd", "min", "max");
            for (k, a) in &self.aggregate {
                let _ = writeln!(s, "{k:<32} {:>14.6} {:>14.6} {:>14.6} {:>14.6}", a.mean, a.sd, a.min, a.max);
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(s, "\nchecks:");
            for ch in &self.checks {
                let _ = writeln!(s, "  [{}] {}: {}", if ch.passed { "PASS" } else { "FAIL" }, ch.name, ch.detail);
            }
        }
        s
    }
}

/// One row per recorded event.
pub fn write_trajectory(trace: &ExplorationTrace, out: &mut impl Write) -> io::Result<()> {
    match trace.direction {
        Direction::Forward => {
            writeln!(out, "t,L,R,S_T,A_T,sleeping")?;
            for e in &trace.events {
                writeln!(out, "{},{},{},{},{},{}", e.t, e.living, e.receivers, e.sleeping, e.active, e.sleeping_vertices)?;
            }
        }
        Direction::Reverse => {
            writeln!(out, "t,L,S,A,sleeping")?;
            for e in &trace.events {
                writeln!(out, "{},{},{},{},{}", e.t, e.living, e.sleeping, e.active, e.sleeping_vertices)?;
            }
        }
    }
    Ok(())
}

/// `u v tu tv` per edge, where `tu` is 1 when `u`'s half-edge is a transmitter.
pub fn write_edge_list(graph: &EnhancedMultigraph, out: &mut impl Write) -> io::Result<()> {
    for (u, v, tu, tv) in graph.edge_list() {
        writeln!(out, "{u} {v} {} {}", u8::from(tu), u8::from(tv))?;
    }
    Ok(())
}

pub fn write_file(path: &Path, f: impl FnOnce(&mut io::BufWriter<std::fs::File>) -> io::Result<()>) -> io::Result<()> {
    let mut w = io::BufWriter::new(std::fs::File::create(path)?);
    f(&mut w)?;
    w.flush()
}
