use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use symplectic_density::harness::{self, ExperimentConfig, OutputFormat, Report};
use symplectic_density::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "sdens", version, about = "One-level density experiments for quadratic character families")]
struct Cli {
    /// Plain `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Family: even | 8d.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Family bound; repeat for a grid.
    #[arg(long = "x", global = true, num_args = 1..)]
    x: Vec<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    sigma: Option<f64>,
    /// Test function: fejer | fejer2.
    #[arg(long, global = true)]
    testfn: Option<String>,
    #[arg(long = "quad-tol", global = true, allow_hyphen_values = true)]
    quad_tol: Option<f64>,
    /// Truncation radius of the tau integrals.
    #[arg(long = "quad-T", global = true, allow_hyphen_values = true)]
    quad_t: Option<f64>,
    #[arg(long = "prime-limit", global = true)]
    prime_limit: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv | summary.
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Family sizes over the grid.
    Sieve,
    /// Counting checks for the family and its multiples of small primes.
    Counting,
    /// Ratios-side prediction.
    Predict,
    /// Explicit-formula side.
    Explicit,
    /// Both sides, their gap and its decay fit.
    Compare,
    /// Gauss-type sum table.
    Gauss {
        #[arg(long, default_value_t = 101)]
        kmax: u64,
        #[arg(long, default_value_t = 100)]
        mmax: u64,
    },
    /// Mean-square character-sum statistic.
    Jutila {
        #[arg(long, default_value_t = 1000)]
        n: u64,
    },
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = &cli.family {
        cfg.set("family", v)?;
    }
    if !cli.x.is_empty() {
        cfg.set("x", &cli.x.join(","))?;
    }
    if let Some(v) = cli.sigma {
        cfg.set("sigma", &v.to_string())?;
    }
    if let Some(v) = &cli.testfn {
        cfg.set("testfn", v)?;
    }
    if let Some(v) = cli.quad_tol {
        cfg.set("quad_tol", &v.to_string())?;
    }
    if let Some(v) = cli.quad_t {
        cfg.set("quad_t", &v.to_string())?;
    }
    if let Some(v) = &cli.prime_limit {
        cfg.set("prime_limit", v)?;
    }
    if let Some(v) = &cli.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = &cli.format {
        cfg.set("format", v)?;
    }
    Ok(cfg)
}

fn emit(report: &Report, cfg: &ExperimentConfig) -> Result<()> {
    match report.emit(cfg)? {
        Some(text) => std::io::stdout().write_all(text.as_bytes())?,
        None => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = build_config(cli)?;
    match &cli.command {
        Command::Sieve => emit(&harness::run_sieve(&cfg)?, &cfg),
        Command::Counting => emit(&harness::run_counting(&cfg)?, &cfg),
        Command::Predict => emit(&harness::run_predict(&cfg)?, &cfg),
        Command::Explicit => emit(&harness::run_explicit(&cfg)?, &cfg),
        Command::Compare => emit(&harness::run_compare(&cfg)?.to_report(), &cfg),
        Command::Jutila { n } => emit(&harness::run_jutila(&cfg, *n)?, &cfg),
        Command::Gauss { kmax, mmax } => {
            let (table, report) = harness::run_gauss(*kmax, *mmax)?;
            let mut buf = Vec::new();
            if cfg.format == OutputFormat::Csv {
                table.write_csv(&mut buf)?;
            }
            buf.extend(report.render(cfg.format).into_bytes());
            match &cfg.out {
                Some(p) => std::fs::write(p, buf).map_err(Error::from),
                None => std::io::stdout().write_all(&buf).map_err(Error::from),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
