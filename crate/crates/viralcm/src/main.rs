use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use viralcm::report::write_file;
use viralcm::{run, Command, ConfigError, ExperimentConfig, RunError};

const EXIT_CONFIG: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "viralcm", version, about = "Influence propagation on the enhanced configuration model")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    replicates: Option<usize>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for report.json, summary.txt and per-replicate files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Exit with status 2 when a tolerance check fails.
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Roots, horizons, fractions and extinction probabilities.
    Theory,
    /// Sample graphs; measure the big components and the small/large classification.
    Simulate,
    /// Run the forward and reverse explorations against their fluid limits.
    Explore,
    /// Exact large-source sets and the duality statistics.
    Duality,
    /// Exhaustive enumeration for a tiny sequence and branching-process simulation.
    Oracle {
        /// Degree list as `r,t;r,t;...`, e.g. `0,2;1,0;1,0`.
        #[arg(long)]
        degrees: Option<String>,
    },
    /// Criticality and predictions across a parameter range.
    Sweep,
}

fn parse_degrees(text: &str) -> Result<Vec<(u32, u32)>, String> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (r, t) = pair.split_once(',').ok_or_else(|| format!("expected `r,t`, got `{pair}`"))?;
            let parse = |s: &str| s.trim().parse::<u32>().map_err(|e| format!("`{s}`: {e}"));
            Ok((parse(r)?, parse(t)?))
        })
        .collect()
}

fn configure(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.master_seed = s;
    }
    if let Some(n) = cli.n {
        config.n = n;
    }
    if let Some(r) = cli.replicates {
        config.replicates = r;
    }
    if let Some(e) = cli.epsilon {
        config.epsilon = e;
    }
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    if let Sub::Oracle { degrees: Some(d) } = &cli.command {
        config.degrees = Some(parse_degrees(d).map_err(|e| ConfigError::Invalid(format!("--degrees: {e}")))?);
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let config = match configure(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let command = match cli.command {
        Sub::Theory => Command::Theory,
        Sub::Simulate => Command::Simulate,
        Sub::Explore => Command::Explore,
        Sub::Duality => Command::Duality,
        Sub::Oracle { .. } => Command::Oracle,
        Sub::Sweep => Command::Sweep,
    };
    if let Some(dir) = &cli.out {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let report = match run(&config, command, cli.out.as_deref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let text = report.to_text();
    let json = report.to_json();
    match cli.format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{json}"),
    }
    if let Some(dir) = &cli.out {
        let written = write_file(&dir.join("report.json"), |w| std::io::Write::write_all(w, json.as_bytes()))
            .and_then(|()| write_file(&dir.join("summary.txt"), |w| std::io::Write::write_all(w, text.as_bytes())));
        if let Err(e) = written {
            eprintln!("error: {}", RunError::Io(e));
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    if cli.check && !report.all_passed() {
        return ExitCode::from(EXIT_CHECK_FAILED);
    }
    ExitCode::SUCCESS
}
