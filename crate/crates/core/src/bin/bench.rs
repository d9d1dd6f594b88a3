//! `bench`: run experiments, emit synthetic datasets, report on distributions.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use partial_knn::bench::{self, BenchError, ExperimentConfig, RunOptions};
use partial_knn::distribution::parse_distribution;
use partial_knn::theory::theory_report;

#[derive(Parser)]
#[command(name = "bench", version, about = "Partial-label nearest-neighbor experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment and write results.csv and summary.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-example predictions.csv.
        #[arg(long)]
        dump_predictions: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Record wall-clock times instead of writing 0.
        #[arg(long)]
        timing: bool,
        /// Use 100 repetitions regardless of the config.
        #[arg(long)]
        full_reps: bool,
    },
    /// Write the dataset a config generates as CSV.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstructibility, alignment and advantage report for a distribution file.
    Theory {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        advantage_cap: f64,
        /// Random probes per bag-generation process.
        #[arg(long, default_value_t = 1000)]
        probes: usize,
        /// Write per-atom advantage witnesses here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Run { config, out, dump_predictions, threads, timing, full_reps } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if full_reps {
                cfg.repetitions = bench::FULL_REPETITIONS;
            }
            if let Some(n) = threads {
                if n == 0 {
                    return Err(BenchError::Config("--threads must be at least 1".into()));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| BenchError::Config(e.to_string()))?;
            }
            let output = bench::run(&cfg, RunOptions { timing, predictions: dump_predictions })?;
            bench::emit(&output, &out, dump_predictions)?;
            for s in &output.summary {
                println!(
                    "{:<8} noise={:<8} error={} ± {} (n={})",
                    s.method.name(),
                    bench::format_sig(s.noise),
                    bench::format_sig(s.mean_error),
                    bench::format_sig(s.std_error),
                    s.n_reps
                );
            }
        }
        Command::Synth { config, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let data = bench::generate(&cfg)?;
            let file = std::fs::File::create(&out)?;
            data.write_csv(file)?;
        }
        Command::Theory { dist, advantage_cap, probes, csv } => {
            let text = std::fs::read_to_string(&dist).map_err(partial_knn::Error::from)?;
            let d = parse_distribution(&text)?;
            let report = theory_report(&d, advantage_cap, probes).map_err(|e| match e {
                partial_knn::Error::InvalidParameter(msg) => BenchError::Config(msg),
                other => BenchError::Data(other),
            })?;
            print!("{}", report.to_key_value());
            if let Some(path) = csv {
                std::fs::write(path, report.advantage_csv())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
