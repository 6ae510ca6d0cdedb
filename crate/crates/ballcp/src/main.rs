use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use ballcp::config::ExperimentConfig;
use ballcp::driver;

#[derive(Parser)]
#[command(
    name = "ballcp",
    about = "Dilations, positivity certificates, and component factorizations \
             for analytic maps on algebra balls",
    version
)]
struct Cli {
    /// TOML configuration file; flags below override its fields
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Master seed for every randomized sample set
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Numerical tolerance for certificates and residual checks
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Highest homogeneous degree to extract or lift
    #[arg(long, global = true, value_name = "N")]
    degree_cap: Option<usize>,

    /// Number of randomized trials for sampled falsifiers
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Builtin function to analyze; run the catalog subcommand for names
    #[arg(long, global = true, value_name = "NAME")]
    function: Option<String>,

    /// Write the report to this file in addition to stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Print elapsed wall time to stderr
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the kernel dilation of a table function and test uniqueness
    Gns,
    /// Dilate an analytic function through the interior scaling grid
    Dilate,
    /// Split a function into homogeneous components and certify each
    Decompose,
    /// Lift components through the enveloping algebra to symmetric powers
    Factorize,
    /// Certify or refute complete positivity of a linear map
    Cpcheck,
    /// Fit a nonnegative coefficient series to interval samples
    #[command(name = "interval-fit")]
    IntervalFit,
    /// Reproduce the separating and non-dilatable counterexamples
    Counterexamples,
    /// Check that symmetric power images determine linear factors
    Universality,
    /// List the builtin functions and maps
    Catalog,
}

impl Command {
    fn to_driver(&self) -> driver::Subcommand {
        match self {
            Command::Gns => driver::Subcommand::Gns,
            Command::Dilate => driver::Subcommand::Dilate,
            Command::Decompose => driver::Subcommand::Decompose,
            Command::Factorize => driver::Subcommand::Factorize,
            Command::Cpcheck => driver::Subcommand::Cpcheck,
            Command::IntervalFit => driver::Subcommand::IntervalFit,
            Command::Counterexamples => driver::Subcommand::Counterexamples,
            Command::Universality => driver::Subcommand::Universality,
            Command::Catalog => driver::Subcommand::Catalog,
        }
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, ballcp::Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.tol = tol;
    }
    if let Some(cap) = cli.degree_cap {
        cfg.degree_cap = cap;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(function) = &cli.function {
        cfg.function = Some(function.clone());
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let report = match driver::run(cli.command.to_driver(), &cfg) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.timing {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    let text = report.render();
    print!("{text}");
    if let Some(path) = &cfg.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("could not write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
