use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use homlab::cli::{run, StageError};
use homlab::io::config::{parse_config_with, Overrides};
use homlab::io::report::Metadata;
use homlab::Error;

/// Random conductance experiments on the periodic lattice.
///
/// Settings come from flags, then the `--config` JSON document, then defaults.
#[derive(Debug, Parser)]
#[command(name = "homlab", version)]
struct Args {
    /// corrector | green | check-green-bounds | homogenize | moments |
    /// variance-scan | sg-check | sg-p-check | decay | probe-stationarity
    command: Option<String>,

    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Side length; a comma-separated list for moments and variance-scan.
    #[arg(long = "L", value_delimiter = ',')]
    side: Option<Vec<usize>>,

    /// Dimension.
    #[arg(long)]
    d: Option<usize>,

    /// Ellipticity constant of the ensemble.
    #[arg(long)]
    lambda: Option<f64>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    samples: Option<usize>,

    /// Moment exponent.
    #[arg(long)]
    p: Option<f64>,

    /// Spectral-gap exponents, comma-separated.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,

    /// JSON report path; the CSV table goes next to it. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
}

fn fail(err: StageError) -> ExitCode {
    eprintln!("{}", serde_json::to_string_pretty(&err.to_report()).unwrap_or_else(|_| err.to_string()));
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                return fail(StageError {
                    stage: "config",
                    source: Error::Io(e),
                })
            }
        },
        None => "{}".to_string(),
    };
    let overrides = Overrides {
        command: args.command,
        d: args.d,
        sides: args.side,
        lambda: args.lambda,
        seed: args.seed,
        samples: args.samples,
        p: args.p,
        q: args.q,
        out: args.out,
        threads: args.threads,
    };
    let cfg = match parse_config_with(&text, &overrides) {
        Ok(c) => c,
        Err(source) => return fail(StageError { stage: "config", source }),
    };

    let threads = cfg
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            return fail(StageError {
                stage: "threads",
                source: Error::InvalidArgument(e.to_string()),
            })
        }
    };
    let output = match pool.install(|| run(&cfg)) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    match output.write(&Metadata::collect(threads)) {
        Ok(Some(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(source) => fail(StageError { stage: "report", source }),
    }
}
