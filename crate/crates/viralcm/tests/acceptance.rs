//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Reference values for the default thinned-Poisson(4, 0.5, 30) family come from
//! the scalar recursion rho = 1 - exp(-2 rho): xi = 1 - rho / 2, xi_bar = 1 - rho,
//! and both component fractions equal rho.

use std::process::ExitCode;
use std::time::Instant;

use viralcm::config::DistributionSpec;
use viralcm::{run, AggregateReport, Command, ExperimentConfig};
use viralcm_core::theory::DEFAULT_TOL;
use viralcm_core::{enumerate, predict, run_forward, DegreeSequence, ExplorationOptions, JointDegreeDistribution};

const XI: f64 = 0.60159393498999;
const XI_BAR: f64 = 0.20318786997998006;
const FRACTION: f64 = 0.7968121300200199;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn base() -> ExperimentConfig {
    ExperimentConfig { n: 100_000, replicates: 20, master_seed: 2024, epsilon: 0.05, ..Default::default() }
}

fn column(r: &AggregateReport, key: &str) -> Vec<f64> {
    r.replicates.iter().map(|x| x.stats[key]).collect()
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn theory_solver() -> Outcome {
    let start = Instant::now();
    let d = JointDegreeDistribution::thinned_poisson(4.0, 0.5, 30).unwrap();
    let p = predict(&d, DEFAULT_TOL).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (e1, e2) = ((p.forward_root - XI).abs(), (p.reverse_root - XI_BAR).abs());
    outcome(
        e1 <= 1e-4 && e2 <= 1e-4 && secs < 1.0,
        format!("xi = {:.9} (err {e1:.1e}), xi_bar = {:.9} (err {e2:.1e}), {secs:.3}s", p.forward_root, p.reverse_root),
    )
}

fn supercritical_components(results: &mut Vec<(usize, &'static str, Outcome)>) {
    let start = Instant::now();
    let r = run(&base(), Command::Simulate, None).unwrap();
    let secs = start.elapsed().as_secs_f64();

    let mean = r.aggregate["c_star_fraction"].mean;
    results.push((
        2,
        "influenced component size",
        outcome(
            (mean - FRACTION).abs() <= 0.015 && secs < 60.0,
            format!("mean |C*|/n = {mean:.6} vs {FRACTION:.6} ± 0.015 over 20 replicates, {secs:.1}s"),
        ),
    ));

    let large = column(&r, "large_fraction");
    let worst_gap = large.iter().map(|v| (v - FRACTION).abs()).fold(0.0, f64::max);
    let worst_violation = max(&column(&r, "violation_rate"));
    results.push((
        3,
        "pioneer fraction",
        outcome(
            worst_gap <= 0.015 && worst_violation <= 0.02,
            format!(
                "mean large/n = {:.6}, worst replicate off by {worst_gap:.6}; worst violation rate {worst_violation:.3} at sample 200",
                r.aggregate["large_fraction"].mean
            ),
        ),
    ));

    let drawn: f64 = column(&r, "pairs_drawn").iter().sum();
    let within: f64 = column(&r, "pairs_within_tolerance").iter().sum();
    results.push((
        4,
        "uniqueness of the big component",
        outcome(
            drawn > 0.0 && within / drawn >= 0.98,
            format!("{within}/{drawn} pairs with |C(x) △ C(x')|/n < 0.01; largest {:.2e}", max(&column(&r, "pair_divergence_max"))),
        ),
    ));
}

fn subcritical_null() -> Outcome {
    let cfg = ExperimentConfig {
        distribution: DistributionSpec::ThinnedPoisson { mu: 4.0, q: 0.2, cutoff: 30 },
        ..base()
    };
    let r = run(&cfg, Command::Simulate, None).unwrap();
    let worst = max(&column(&r, "max_sampled_forward_fraction"));
    outcome(worst < 0.01, format!("largest sampled |C(x)|/n over 20 replicates = {worst:.2e}"))
}

fn explorations(results: &mut Vec<(usize, &'static str, Outcome)>) {
    let r = run(&base(), Command::Explore, None).unwrap();
    let mut worst = (String::new(), 0.0f64);
    for rep in &r.replicates {
        for (k, &v) in &rep.stats {
            if k.contains("dev_") && v > worst.1 {
                worst = (format!("{k} (replicate {})", rep.index), v);
            }
        }
    }
    results.push((
        6,
        "fluid limits",
        outcome(worst.1 < 0.02, format!("worst deviation {:.5} in {}", worst.1, worst.0)),
    ));

    let tau = r.theory.prediction.unwrap().forward_horizon;
    let t2 = column(&r, "window_t2");
    let size = column(&r, "c_double_prime_fraction");
    let hits = t2.iter().zip(&size).filter(|(t, s)| (**t - tau).abs() <= 0.05 && (**s - FRACTION).abs() <= 0.015).count();
    results.push((
        7,
        "big window",
        outcome(
            hits >= 18,
            format!(
                "{hits}/20 replicates; T2 in [{:.4}, {:.4}] vs tau = {tau:.4}; |C''|/n in [{:.4}, {:.4}]",
                t2.iter().copied().fold(f64::INFINITY, f64::min),
                max(&t2),
                size.iter().copied().fold(f64::INFINITY, f64::min),
                max(&size)
            ),
        ),
    ));
}

fn duality_statistics() -> Outcome {
    let r = run(&base(), Command::Duality, None).unwrap();
    let t5 = max(&column(&r, "theorem5_lhs"));
    let c6 = max(&column(&r, "corollary6_lhs"));
    let big = column(&r, "has_big_components").iter().all(|&b| b == 1.0);
    outcome(big && t5 <= 0.05 && c6 <= 0.05, format!("worst theorem5_lhs = {t5:.2e}, worst corollary6_lhs = {c6:.2e}"))
}

fn oracle_equivalence() -> Outcome {
    let sequences: [&[(u32, u32)]; 6] = [
        &[(0, 1), (1, 0)],
        &[(0, 2), (1, 0), (1, 0)],
        &[(1, 1), (1, 1), (0, 2)],
        &[(2, 1), (0, 1), (1, 0), (0, 3)],
        &[(0, 3), (1, 1), (2, 0), (0, 1), (2, 0)],
        &[(1, 2), (2, 1), (0, 2), (1, 1)],
    ];
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for (i, degrees) in sequences.iter().enumerate() {
        let cfg = ExperimentConfig { degrees: Some(degrees.to_vec()), oracle_draws: 100_000, gw_reps: 1, ..base() };
        let r = run(&cfg, Command::Oracle, None).unwrap();
        worst = worst.max(r.values["empirical_worst_sigma"]);
        if !r.checks.iter().find(|c| c.name == "matching_frequencies").unwrap().passed {
            failed.push(i);
        }
    }
    // Matching induced by the forward exploration on four half-edges.
    let seq = DegreeSequence::from_pairs(vec![(0, 1), (1, 1), (1, 0)]).unwrap();
    let exact = enumerate(&seq).unwrap();
    let runs = 100_000u64;
    let mut counts = [0u64; 3];
    for seed in 0..runs {
        let tr = run_forward(&seq, seed, &ExplorationOptions::default());
        counts[tr.induced_multigraph(&seq).unwrap().partner()[0] as usize - 1] += 1;
    }
    let p = 1.0 / exact.matchings as f64;
    let sd = (runs as f64 * p * (1.0 - p)).sqrt();
    let induced_sigma = counts.iter().map(|&c| (c as f64 - runs as f64 * p).abs() / sd).fold(0.0, f64::max);
    outcome(
        failed.is_empty() && induced_sigma <= 4.0,
        format!(
            "worst pair {worst:.2} sd over 6 sequences x 1e5 matchings (failed: {failed:?}); induced matching {counts:?}, worst {induced_sigma:.2} sd"
        ),
    )
}

fn branching_consistency() -> Outcome {
    let cfg = ExperimentConfig { gw_reps: 100_000, max_generations: 50, ..base() };
    let r = run(&cfg, Command::Oracle, None).unwrap();
    let p = r.theory.prediction.unwrap();
    let sim = r.values["gw_survival"];
    let gap = (sim - (1.0 - p.extinction)).abs();
    let consistency = (p.subtree_extinction - XI_BAR).abs();
    outcome(
        gap <= 0.01 && consistency <= 1e-8,
        format!("survival {sim:.5} vs 1 - p_ext = {:.5}; |p_ext_tilde - xi_bar| = {consistency:.1e}", 1.0 - p.extinction),
    )
}

fn tautology() -> Outcome {
    let cfg = ExperimentConfig { n: 1000, replicates: 10, ..base() };
    let r = run(&cfg, Command::Duality, None).unwrap();
    let violations: f64 = column(&r, "tautology_violations").iter().sum();
    let checked: f64 = column(&r, "tautology_pairs_checked").iter().sum();
    outcome(violations == 0.0 && checked == 1e7, format!("{violations} violations over {checked} ordered pairs (10 seeds)"))
}

fn determinism() -> Outcome {
    let cfg = |threads| ExperimentConfig { n: 20_000, replicates: 4, threads: Some(threads), ..base() };
    let mut same = true;
    for command in [Command::Simulate, Command::Explore, Command::Duality] {
        let a = run(&cfg(1), command, None).unwrap();
        let b = run(&cfg(1), command, None).unwrap();
        let mut c = run(&cfg(3), command, None).unwrap();
        c.config.threads = Some(1);
        same &= a.to_json() == b.to_json() && a.to_json() == c.to_json();
    }
    outcome(same, "simulate, explore and duality reports byte-identical across reruns and 1 vs 3 threads".into())
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &'static str, Outcome)> = Vec::new();
    results.push((1, "theory solver", theory_solver()));
    supercritical_components(&mut results);
    results.push((5, "subcritical null", subcritical_null()));
    explorations(&mut results);
    results.push((8, "duality statistics", duality_statistics()));
    results.push((9, "oracle equivalence", oracle_equivalence()));
    results.push((10, "branching consistency", branching_consistency()));
    results.push((11, "tautology", tautology()));
    results.push((12, "determinism", determinism()));
    results.sort_by_key(|r| r.0);

    let mut failures = 0;
    for (id, name, o) in &results {
        println!("{} {id:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", results.len() - failures, results.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
