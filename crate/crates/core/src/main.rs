use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gauss_kuzmin::experiments::{self, ExperimentConfig, GkStart, OutputFormat};
use gauss_kuzmin::report::ReportRecord;
use gauss_kuzmin::Error;

#[derive(Parser, Debug)]
#[command(
    name = "gauss-kuzmin",
    version,
    about = "Continued-fraction and Gauss-Kuzmin experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 4096)]
    grid: usize,
    #[arg(long, global = true, default_value_t = 25)]
    iters: usize,
    #[arg(long, global = true, default_value_t = 10_000)]
    imax: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the experiment's tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Size of the worker pool (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact expansion of a rational in (0, 1], given as p/q or a decimal.
    Expand {
        x: String,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
    },
    /// First-digit and conditional second-digit frequencies.
    DigitLaw,
    /// Gauss-Kuzmin recursion on distribution functions.
    Gk {
        #[arg(long, value_enum, default_value_t = Start::Uniform)]
        start: Start,
    },
    /// Empirical distribution of the n-th Gauss-map iterate.
    EmpiricalGk {
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// Convergence rate of the transfer operator at two grid sizes.
    Operator,
    /// Invariance of the Gauss measure.
    Invariance,
    /// Contraction coefficients and the fixed-point experiment.
    Contraction,
    /// Uniform ergodicity diagnostic.
    Epsilon,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Start {
    Uniform,
    Quadratic,
    Gauss,
    Discontinuous,
}

impl From<Start> for GkStart {
    fn from(s: Start) -> Self {
        match s {
            Start::Uniform => GkStart::Uniform,
            Start::Quadratic => GkStart::Quadratic,
            Start::Gauss => GkStart::Gauss,
            Start::Discontinuous => GkStart::Discontinuous,
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let cfg = ExperimentConfig {
        seed: cli.seed,
        samples: cli.samples,
        grid: cli.grid,
        iters: cli.iters,
        i_max: cli.imax,
        format: match cli.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
        out: cli.out.clone(),
        tol: cli.tol,
    };
    let result = match &cli.command {
        Command::Expand { x, n_max } => cfg.validate().and_then(|_| experiments::expand(x, *n_max)),
        Command::DigitLaw => experiments::digit_law(&cfg),
        Command::Gk { start } => experiments::gk(&cfg, (*start).into()),
        Command::EmpiricalGk { n } => experiments::empirical_gk(&cfg, *n),
        Command::Operator => experiments::operator(&cfg),
        Command::Invariance => experiments::invariance(&cfg),
        Command::Contraction => experiments::contraction(&cfg),
        Command::Epsilon => experiments::epsilon(&cfg),
    };
    match result {
        Ok(report) => match emit(&report, &cfg) {
            Ok(()) => {
                eprintln!("{}", report.summary());
                ExitCode::from(if report.pass { 0 } else { EXIT_FAIL })
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_FAIL)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Domain(_) | Error::Parse(_) => EXIT_USAGE,
                _ => EXIT_FAIL,
            })
        }
    }
}

fn emit(report: &ReportRecord, cfg: &ExperimentConfig) -> io::Result<()> {
    let text = match cfg.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(&report.to_json()).map_err(io::Error::other)?;
            s.push('\n');
            s
        }
    };
    match &cfg.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
