//! Command-line front end: run games, run validator suites, emit CSV/JSON.
//!
//! Exit codes: 0 success (all checks pass), 1 validation failure, 2 usage
//! error, 3 numerical failure.

use clap::{Args, Parser, Subcommand};
use online_sdp::harness::{
    bench_csv_text, execute_bench, execute_run, run_suite, write_artifacts, RunConfig, SUITES,
};
use online_sdp::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "online-sdp", version, about = "FTRL over PSD matrices: games, bounds, validators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one online game and write its per-round CSV and JSON summary.
    Run(RunArgs),
    /// Run a numerical validation suite.
    Validate(ValidateArgs),
    /// Regret-versus-horizon scaling study with a log-log slope fit.
    Bench(BenchArgs),
}

/// Flags mirror the run configuration one-to-one; `--config` supplies a TOML
/// file with the same keys, and explicit flags override the file.
#[derive(Args, Clone)]
struct RunArgs {
    /// logdet-main | frobenius | entropic | logdet-general | vector | maxcut | gambling | cf
    #[arg(long)]
    problem: Option<String>,
    /// Optional TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Decision order N for the matrix games.
    #[arg(long)]
    order: Option<usize>,
    /// Node/team count for maxcut and gambling.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, short = 'T')]
    horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    noise: Option<f64>,
    /// frobenius | entropic | logdet | burg
    #[arg(long)]
    reg: Option<String>,
    /// `auto` or a positive number.
    #[arg(long)]
    eta: Option<String>,
    /// `auto` or a positive number.
    #[arg(long)]
    epsilon: Option<String>,
    /// iid | adaptive
    #[arg(long)]
    adversary: Option<String>,
    /// exact | convex | none
    #[arg(long)]
    comparator: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    g1: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    gamma_inf: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    trace_cap: Option<f64>,
    /// absolute | squared (collaborative filtering)
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    ratings_file: Option<PathBuf>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

impl RunArgs {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            problem: self.problem.clone(),
            order: self.order,
            nodes: self.nodes,
            rows: self.rows,
            cols: self.cols,
            rank: self.rank,
            horizon: self.horizon,
            seed: self.seed,
            noise: self.noise,
            reg: self.reg.clone(),
            eta: self.eta.clone(),
            epsilon: self.epsilon.clone(),
            adversary: self.adversary.clone(),
            comparator: self.comparator.clone(),
            beta: self.beta,
            tau: self.tau,
            g1: self.g1,
            rho: self.rho,
            gamma2: self.gamma2,
            gamma_inf: self.gamma_inf,
            gamma1: self.gamma1,
            sigma: self.sigma,
            trace_cap: self.trace_cap,
            loss: self.loss.clone(),
            ratings_file: self.ratings_file.clone(),
            c1: self.c1,
            c2: self.c2,
            out_csv: self.out_csv.clone(),
            out_json: self.out_json.clone(),
        }
    }

    fn resolve(&self) -> Result<online_sdp::harness::ResolvedRun, Error> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            config = config.merged_with(RunConfig::from_toml_file(path)?);
        }
        config.merged_with(self.to_config()).resolve()
    }
}

#[derive(Args)]
struct ValidateArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Sample count override (default per suite).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Ascending comma-separated horizons, e.g. 256,512,1024.
    #[arg(long, value_delimiter = ',')]
    horizons: Vec<usize>,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParam(_)
        | Error::UnknownSuite(_)
        | Error::UnknownVariant(_)
        | Error::ComparatorSizeCap(..)
        | Error::RatingsParse { .. }
        | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let artifacts = execute_run(&cfg)?;
            write_artifacts(&cfg, &artifacts)?;
            println!(
                "{} T={} seed={} final_regret={:.6e} bound={:.6e} ratio={:.4}",
                cfg.problem.name(),
                cfg.horizon,
                cfg.seed,
                artifacts.summary.final_regret,
                artifacts.summary.bound,
                artifacts.summary.ratio,
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(args) => {
            let reports = match run_suite(&args.suite, args.samples, args.seed) {
                Ok(reports) => reports,
                Err(Error::UnknownSuite(name)) => {
                    eprintln!(
                        "error: unknown suite `{name}`; valid suites: {}",
                        SUITES.join(", ")
                    );
                    return Ok(ExitCode::from(EXIT_USAGE));
                }
                Err(other) => return Err(other),
            };
            let mut all_pass = true;
            for report in &reports {
                println!("{report}");
                all_pass &= report.pass();
            }
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            })
        }
        Command::Bench(args) => {
            let cfg = args.run.resolve()?;
            let bench = execute_bench(&cfg, &args.horizons)?;
            print!("{}", bench_csv_text(&bench));
            match bench.slope {
                Some(slope) => println!("# loglog_slope={slope:.6}"),
                None => println!("# loglog_slope=undefined (non-positive regret observed)"),
            }
            if let Some(path) = &cfg.out_csv {
                std::fs::write(path, bench_csv_text(&bench))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
