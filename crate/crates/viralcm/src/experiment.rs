//! Replicated pipelines and their aggregation.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use viralcm_core::exploration::{big_window, fluid_deviation, fluid_deviation_until, FluidDeviation};
use viralcm_core::oracle::{enumerate, gw_survival, GwOptions, OracleError};
use viralcm_core::propagation::{
    bow_tie, classify_with, duality_stats_with, sample_large_pair_divergence, tautology_check, tautology_check_all,
};
use viralcm_core::rng::replicate_seed;
use viralcm_core::theory::{predict, DEFAULT_TOL};
use viralcm_core::{
    DegreeSequence, Direction, EnhancedMultigraph, ExplorationOptions, GraphError, JointDegreeDistribution, TheoryError,
};

use crate::config::{ConfigError, DistributionSpec, ExperimentConfig, SweepParameter};
use crate::report::{write_edge_list, write_file, write_trajectory, AggregateReport, Check, Command, ReplicateStats, TheoryBlock};

/// Exhaustive pair checks are used up to this many vertices.
pub const EXHAUSTIVE_TAUTOLOGY_LIMIT: usize = 2000;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("replicate {index}: {message}")]
    Replicate { index: usize, message: String },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("{0}")]
    Unsupported(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

type Stats = BTreeMap<String, f64>;

struct Context<'a> {
    config: &'a ExperimentConfig,
    dist: JointDegreeDistribution,
    theory: TheoryBlock,
    out: Option<&'a Path>,
}

fn theory_block(dist: &JointDegreeDistribution) -> TheoryBlock {
    let prediction = predict(dist, DEFAULT_TOL).ok();
    TheoryBlock {
        moments: dist.moments(),
        criticality_margin: dist.criticality_margin(),
        supercritical: prediction.is_some(),
        prediction,
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_string(), passed, detail }
}

/// Runs `command` under `config`. Per-replicate files go to `out` when given.
pub fn run(config: &ExperimentConfig, command: Command, out: Option<&Path>) -> Result<AggregateReport, RunError> {
    config.validate()?;
    let dist = config.distribution.build().map_err(ConfigError::from)?;
    let ctx = Context { config, theory: theory_block(&dist), dist, out };
    let mut report = AggregateReport {
        command,
        config: config.clone(),
        theory: ctx.theory.clone(),
        replicates: Vec::new(),
        aggregate: BTreeMap::new(),
        values: BTreeMap::new(),
        checks: Vec::new(),
    };
    match command {
        Command::Theory => theory_checks(&ctx, &mut report),
        Command::Sweep => sweep(&ctx, &mut report)?,
        Command::Oracle => oracle(&ctx, &mut report)?,
        Command::Simulate | Command::Duality | Command::Explore => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads.unwrap_or(0)).build()?;
            let replicates = pool.install(|| {
                (0..config.replicates)
                    .into_par_iter()
                    .map(|index| {
                        let seed = replicate_seed(config.master_seed, index as u64);
                        let stats = match command {
                            Command::Simulate => simulate_replicate(&ctx, index, seed),
                            Command::Duality => duality_replicate(&ctx, seed),
                            _ => explore_replicate(&ctx, index, seed),
                        }
                        .map_err(|message| RunError::Replicate { index, message })?;
                        Ok(ReplicateStats { index, seed, stats })
                    })
                    .collect::<Result<Vec<_>, RunError>>()
            })?;
            report.replicates = replicates;
            report.summarize();
            match command {
                Command::Simulate => simulate_checks(&ctx, &mut report),
                Command::Duality => duality_checks(&ctx, &mut report),
                _ => explore_checks(&ctx, &mut report),
            }
        }
    }
    Ok(report)
}

fn sample_graph(ctx: &Context<'_>, seed: u64) -> Result<(DegreeSequence, EnhancedMultigraph), String> {
    let seq = DegreeSequence::sample(&ctx.dist, ctx.config.n, seed).map_err(|e: GraphError| e.to_string())?;
    let graph = EnhancedMultigraph::uniform_matching(&seq, seed);
    Ok((seq, graph))
}

fn io_err(e: std::io::Error) -> String {
    format!("output: {e}")
}

fn simulate_replicate(ctx: &Context<'_>, index: usize, seed: u64) -> Result<Stats, String> {
    let cfg = ctx.config;
    let (seq, mg) = sample_graph(ctx, seed)?;
    if let (Some(dir), true) = (ctx.out, cfg.edge_list) {
        write_file(&dir.join(format!("graph_r{index:03}.txt")), |w| write_edge_list(&mg, w)).map_err(io_err)?;
    }
    let ms = mg.stats();
    let g = mg.influence_digraph();
    let bt = bow_tie(&g);
    let r = classify_with(&g, &bt, cfg.epsilon, cfg.sample_size, seed);
    let divergence = sample_large_pair_divergence(&g, &bt, cfg.pairs, seed);
    let n = cfg.n as f64;
    let sample = cfg.sample_size.max(1) as f64;
    let mut s = Stats::new();
    s.insert("c_star_fraction".into(), r.c_star_size as f64 / n);
    s.insert("c_bar_star_fraction".into(), r.c_bar_star_size as f64 / n);
    s.insert("core_fraction".into(), r.core_size as f64 / n);
    s.insert("large_fraction".into(), r.count_large as f64 / n);
    s.insert("small_fraction".into(), r.count_small as f64 / n);
    s.insert("large_bar_fraction".into(), r.count_large_bar as f64 / n);
    s.insert("violation_rate".into(), r.sample_violations as f64 / sample);
    s.insert("violation_rate_bar".into(), r.sample_violations_bar as f64 / sample);
    s.insert("max_sampled_forward_fraction".into(), r.max_sampled_forward_fraction);
    s.insert("max_sampled_backward_fraction".into(), r.max_sampled_backward_fraction);
    s.insert("pairs_drawn".into(), divergence.len() as f64);
    s.insert(
        "pairs_within_tolerance".into(),
        divergence.iter().filter(|&&d| d < cfg.tolerances.pair_divergence).count() as f64,
    );
    s.insert("pair_divergence_max".into(), divergence.iter().copied().fold(0.0, f64::max));
    s.insert("tautology_violations".into(), tautology_check(&g, cfg.tautology_pairs, seed) as f64);
    s.insert("self_loops".into(), ms.self_loops as f64);
    s.insert("multi_edges".into(), ms.multi_edges as f64);
    s.insert("d_max".into(), f64::from(ms.d_max));
    s.insert("parity_fixed".into(), f64::from(u8::from(seq.parity_vertex().is_some())));
    Ok(s)
}

fn duality_replicate(ctx: &Context<'_>, seed: u64) -> Result<Stats, String> {
    let cfg = ctx.config;
    let (_, mg) = sample_graph(ctx, seed)?;
    let g = mg.influence_digraph();
    let bt = bow_tie(&g);
    let r = classify_with(&g, &bt, cfg.epsilon, cfg.sample_size, seed);
    let d = duality_stats_with(&g, &bt, cfg.epsilon, &r);
    let n = cfg.n as f64;
    let (violations, checked) = if cfg.n <= EXHAUSTIVE_TAUTOLOGY_LIMIT {
        (tautology_check_all(&g), cfg.n * cfg.n)
    } else {
        (tautology_check(&g, cfg.tautology_pairs, seed), cfg.tautology_pairs)
    };
    let mut s = Stats::new();
    s.insert("has_big_components".into(), f64::from(u8::from(d.has_big_components)));
    s.insert("theorem5_lhs".into(), d.theorem5_lhs);
    s.insert("corollary6_lhs".into(), d.corollary6_lhs);
    s.insert("exact_large_fraction".into(), d.exact_count_large as f64 / n);
    s.insert("exact_small_fraction".into(), d.exact_count_small as f64 / n);
    s.insert("exact_large_bar_fraction".into(), d.exact_count_large_bar as f64 / n);
    s.insert("exact_small_bar_fraction".into(), d.exact_count_small_bar as f64 / n);
    s.insert("c_star_fraction".into(), r.c_star_size as f64 / n);
    s.insert("c_bar_star_fraction".into(), r.c_bar_star_size as f64 / n);
    s.insert("tautology_violations".into(), violations as f64);
    s.insert("tautology_pairs_checked".into(), checked as f64);
    Ok(s)
}

fn deviation_stats(s: &mut Stats, prefix: &str, dev: &FluidDeviation, windowed: bool) {
    let mut watched_max: f64 = 0.0;
    for e in &dev.entries {
        if e.observable.windowed() && !windowed {
            continue;
        }
        let v = e.checked();
        if matches!(e.observable, viralcm_core::Observable::Watched(..)) {
            watched_max = watched_max.max(v);
        }
        s.insert(format!("{prefix}dev_{}", e.observable.label(dev.direction)), v);
    }
    if windowed {
        s.insert(format!("{prefix}dev_V_max"), watched_max);
    }
}

fn explore_replicate(ctx: &Context<'_>, index: usize, seed: u64) -> Result<Stats, String> {
    let cfg = ctx.config;
    let seq = DegreeSequence::sample(&ctx.dist, cfg.n, seed).map_err(|e| e.to_string())?;
    let options = ExplorationOptions {
        watch: Some(cfg.watch.clone().unwrap_or_else(|| ctx.dist.top_cells(viralcm_core::exploration::DEFAULT_WATCH))),
        watch_all: cfg.watch_all,
        stride: None,
        literal_reverse: cfg.literal_reverse,
    };
    let prediction = ctx.theory.prediction.as_ref();
    let deviation = |trace: &viralcm_core::ExplorationTrace| match prediction {
        Some(p) => fluid_deviation(trace, &ctx.dist, p),
        None => fluid_deviation_until(trace, &ctx.dist, f64::INFINITY),
    };
    let mut s = Stats::new();
    s.insert("d_max".into(), f64::from(seq.max_degree()));
    for (dir, enabled) in [(Direction::Forward, cfg.direction.forward()), (Direction::Reverse, cfg.direction.reverse())] {
        if !enabled {
            continue;
        }
        let (trace, prefix, tag) = match dir {
            Direction::Forward => (viralcm_core::run_forward(&seq, seed, &options), "fwd_", "forward"),
            Direction::Reverse => (viralcm_core::run_reverse(&seq, seed, &options), "rev_", "reverse"),
        };
        if let (Some(out), true) = (ctx.out, cfg.trajectories) {
            write_file(&out.join(format!("explore_{tag}_r{index:03}.csv")), |w| write_trajectory(&trace, w))
                .map_err(io_err)?;
        }
        let dev = deviation(&trace).map_err(|e| e.to_string())?;
        deviation_stats(&mut s, prefix, &dev, prediction.is_some());
        s.insert(format!("{prefix}restarts"), trace.restarts.len() as f64);
        s.insert(format!("{prefix}end_time"), trace.end_time);
        match dir {
            Direction::Forward => {
                s.insert("fwd_posthoc_pairs".into(), trace.posthoc_pairs as f64);
                if let Some(p) = prediction {
                    let w = big_window(&trace, p).map_err(|e| e.to_string())?;
                    s.insert("window_t1".into(), w.t1);
                    s.insert("window_t2".into(), w.t2);
                    s.insert("c_double_prime_fraction".into(), w.c_double_prime_size as f64 / cfg.n as f64);
                }
            }
            Direction::Reverse => {
                s.insert("rev_unpaired".into(), trace.unpaired.len() as f64);
            }
        }
    }
    Ok(s)
}

fn column<'r>(report: &'r AggregateReport, key: &'r str) -> impl Iterator<Item = f64> + 'r {
    report.replicates.iter().filter_map(move |r| r.stats.get(key).copied())
}

fn theory_checks(ctx: &Context<'_>, report: &mut AggregateReport) {
    if let Some(p) = &ctx.theory.prediction {
        let diff = (p.subtree_extinction - p.reverse_root).abs();
        let tol = ctx.config.tolerances.extinction_consistency;
        report.checks.push(check(
            "extinction_matches_reverse_root",
            diff <= tol,
            format!("|p_ext_tilde - xi_bar| = {diff:.3e} (tolerance {tol:e})"),
        ));
    }
}

fn simulate_checks(ctx: &Context<'_>, report: &mut AggregateReport) {
    let tol = &ctx.config.tolerances;
    let mut checks = Vec::new();
    let mean = |k: &str| report.aggregate.get(k).map_or(f64::NAN, |s| s.mean);
    let max = |k: &str| column(report, k).fold(0.0, f64::max);
    match &ctx.theory.prediction {
        Some(p) => {
            let m = mean("c_star_fraction");
            checks.push(check(
                "influenced_component",
                (m - p.influenced_fraction).abs() <= tol.component_fraction,
                format!("mean |C*|/n = {m:.6}, predicted {:.6} ± {}", p.influenced_fraction, tol.component_fraction),
            ));
            let m = mean("large_fraction");
            checks.push(check(
                "pioneer_fraction",
                (m - p.pioneer_fraction).abs() <= tol.component_fraction,
                format!("mean large sources/n = {m:.6}, predicted {:.6} ± {}", p.pioneer_fraction, tol.component_fraction),
            ));
            let worst = max("violation_rate").max(max("violation_rate_bar"));
            checks.push(check(
                "classification_violations",
                worst <= tol.violation_rate,
                format!("worst sampled violation rate {worst:.4} (limit {})", tol.violation_rate),
            ));
            let drawn: f64 = column(report, "pairs_drawn").sum();
            let within: f64 = column(report, "pairs_within_tolerance").sum();
            let rate = if drawn > 0.0 { within / drawn } else { 0.0 };
            checks.push(check(
                "unique_big_component",
                rate >= tol.pair_pass_rate,
                format!("{within}/{drawn} large pairs below {} divergence (need {})", tol.pair_divergence, tol.pair_pass_rate),
            ));
        }
        None => {
            let worst = max("max_sampled_forward_fraction");
            checks.push(check(
                "no_large_source",
                worst < tol.subcritical_fraction,
                format!("largest sampled |C(x)|/n = {worst:.6} (limit {})", tol.subcritical_fraction),
            ));
        }
    }
    let t: f64 = column(report, "tautology_violations").sum();
    checks.push(check("tautology", t == 0.0, format!("{t} violations")));
    report.checks = checks;
}

fn duality_checks(ctx: &Context<'_>, report: &mut AggregateReport) {
    let tol = ctx.config.tolerances.duality;
    let mut checks = Vec::new();
    for key in ["theorem5_lhs", "corollary6_lhs"] {
        let worst = column(report, key).fold(0.0, f64::max);
        checks.push(check(key, worst <= tol, format!("worst replicate {worst:.6} (limit {tol})")));
    }
    let t: f64 = column(report, "tautology_violations").sum();
    checks.push(check("tautology", t == 0.0, format!("{t} violations")));
    report.checks = checks;
}

fn explore_checks(ctx: &Context<'_>, report: &mut AggregateReport) {
    let tol = &ctx.config.tolerances;
    let literal = ctx.config.literal_reverse;
    let mut worst: Option<(String, f64)> = None;
    for r in &report.replicates {
        for (k, &v) in &r.stats {
            if k.contains("dev_") && !(literal && k.starts_with("rev_")) && worst.as_ref().is_none_or(|w| v > w.1) {
                worst = Some((k.clone(), v));
            }
        }
    }
    let mut checks = Vec::new();
    if let Some((key, v)) = worst {
        checks.push(check("fluid_limits", v < tol.fluid, format!("worst deviation {v:.6} in {key} (limit {})", tol.fluid)));
    }
    if let (Some(p), true) = (&ctx.theory.prediction, ctx.config.direction.forward()) {
        let hits = report
            .replicates
            .iter()
            .filter(|r| {
                let t2 = r.stats["window_t2"];
                let size = r.stats["c_double_prime_fraction"];
                (t2 - p.forward_horizon).abs() <= tol.window_time && (size - p.influenced_fraction).abs() <= tol.window_size
            })
            .count();
        let need = (tol.window_pass_rate * report.replicates.len() as f64).ceil() as usize;
        checks.push(check(
            "big_window",
            hits >= need,
            format!("{hits}/{} replicates with T2 within {} of {:.6} and |C''|/n within {} (need {need})", report.replicates.len(), tol.window_time, p.forward_horizon, tol.window_size),
        ));
    }
    report.checks = checks;
}

fn oracle(ctx: &Context<'_>, report: &mut AggregateReport) -> Result<(), RunError> {
    let cfg = ctx.config;
    let tol = &cfg.tolerances;
    let v = &mut report.values;
    if let Some(degrees) = &cfg.degrees {
        let seq = DegreeSequence::from_pairs(degrees.clone()).map_err(|e| ConfigError::Invalid(format!("degrees: {e}")))?;
        let exact = enumerate(&seq)?;
        let n = exact.n;
        v.insert("matchings".into(), exact.matchings as f64);
        v.insert("duality_holds".into(), f64::from(u8::from(exact.duality_holds())));
        for x in 0..n {
            v.insert(format!("expected_forward_size_{x}"), exact.expected_forward_size(x));
            v.insert(format!("expected_backward_size_{x}"), exact.expected_backward_size(x));
            for y in 0..n {
                v.insert(format!("reach_{x}_{y}"), exact.reach_probability(x, y));
            }
        }
        let hits = (0..cfg.oracle_draws as u64)
            .into_par_iter()
            .fold(
                || vec![0u64; n * n],
                |mut acc, i| {
                    let g = EnhancedMultigraph::uniform_matching(&seq, replicate_seed(cfg.master_seed, i)).influence_digraph();
                    for x in 0..n {
                        for y in viralcm_core::forward_set(&g, x as u32) {
                            acc[x * n + y as usize] += 1;
                        }
                    }
                    acc
                },
            )
            .reduce(|| vec![0u64; n * n], |a, b| a.iter().zip(&b).map(|(p, q)| p + q).collect());
        let draws = cfg.oracle_draws as f64;
        let (mut worst_sigma, mut mismatches) = (0.0f64, 0usize);
        for x in 0..n {
            for y in 0..n {
                let p = exact.reach_probability(x, y);
                let f = hits[x * n + y] as f64 / draws;
                let sd = (p * (1.0 - p) / draws).sqrt();
                if sd == 0.0 {
                    mismatches += usize::from(f != p);
                } else {
                    worst_sigma = worst_sigma.max((f - p).abs() / sd);
                }
            }
        }
        v.insert("empirical_worst_sigma".into(), worst_sigma);
        v.insert("empirical_exact_mismatches".into(), mismatches as f64);
        report.checks.push(check(
            "matching_frequencies",
            worst_sigma <= tol.oracle_sigmas && mismatches == 0 && exact.duality_holds(),
            format!("worst {worst_sigma:.3} sd over {} draws, {mismatches} deterministic mismatches", cfg.oracle_draws),
        ));
    }
    let options = GwOptions { max_generations: cfg.max_generations, reps: cfg.gw_reps, population_cap: cfg.population_cap };
    let survival = gw_survival(&ctx.dist, options, replicate_seed(cfg.master_seed, 0))?;
    v.insert("gw_survival".into(), survival);
    let target = ctx.theory.prediction.map_or(0.0, |p| 1.0 - p.extinction);
    v.insert("one_minus_p_ext".into(), target);
    let ok = if ctx.theory.supercritical { (survival - target).abs() <= tol.survival } else { survival <= tol.survival };
    report.checks.push(check(
        "branching_survival",
        ok,
        format!("simulated {survival:.6} vs 1 - p_ext = {target:.6} (tolerance {})", tol.survival),
    ));
    Ok(())
}

fn sweep(ctx: &Context<'_>, report: &mut AggregateReport) -> Result<(), RunError> {
    let DistributionSpec::ThinnedPoisson { mu, q, cutoff } = ctx.config.distribution else {
        return Err(RunError::Unsupported("sweep needs the thinned_poisson family".into()));
    };
    let spec = &ctx.config.sweep;
    let mut first_super = None;
    for &value in &spec.values {
        let (m, qq) = match spec.parameter {
            SweepParameter::Mu => (value, q),
            SweepParameter::Q => (mu, value),
        };
        let dist = JointDegreeDistribution::thinned_poisson(m, qq, cutoff).map_err(ConfigError::from)?;
        let block = theory_block(&dist);
        let key = |name: &str| format!("{}={value:.4}/{name}", if spec.parameter == SweepParameter::Mu { "mu" } else { "q" });
        report.values.insert(key("margin"), block.criticality_margin);
        report.values.insert(key("supercritical"), f64::from(u8::from(block.supercritical)));
        if let Some(p) = block.prediction {
            first_super.get_or_insert(value);
            report.values.insert(key("xi"), p.forward_root);
            report.values.insert(key("xi_bar"), p.reverse_root);
            report.values.insert(key("influenced_fraction"), p.influenced_fraction);
            report.values.insert(key("pioneer_fraction"), p.pioneer_fraction);
        }
    }
    if let Some(v) = first_super {
        report.values.insert("first_supercritical".into(), v);
    }
    Ok(())
}
