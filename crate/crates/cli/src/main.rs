use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mlcoal::harness::{self, exit_code, Experiment, ExperimentConfig, Format};
use mlcoal::montecarlo::Exec;
use mlcoal::Error;

/// Experiments comparing the Bolthausen–Sznitman block-counting process with
/// the Mittag–Leffler process.
#[derive(Parser, Debug)]
#[command(name = "mlcoal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Exact moments of the scaled chain against Mittag–Leffler moments.
    ConvergeMoments,
    /// Two-sample KS distance between the scaled chain and the limit law.
    ConvergeDist,
    /// Finite-dimensional joint moments, exact and Monte Carlo.
    Fdd,
    /// Chapman–Kolmogorov defects of the kernel and of the exact chain.
    CkCheck,
    /// Sup-norm distance between the chain and limit semigroups on monomials.
    SemigroupCompare,
    /// Subordinator representation of the Mittag–Leffler law.
    SubordinatorCheck,
    /// Small-time estimates of the generator coefficients.
    GeneratorCheck,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::ConvergeMoments => Experiment::ConvergeMoments,
            Command::ConvergeDist => Experiment::ConvergeDist,
            Command::Fdd => Experiment::Fdd,
            Command::CkCheck => Experiment::CkCheck,
            Command::SemigroupCompare => Experiment::SemigroupCompare,
            Command::SubordinatorCheck => Experiment::SubordinatorCheck,
            Command::GeneratorCheck => Experiment::GeneratorCheck,
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration; its `experiment` must match the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo replicates.
    #[arg(long, global = true)]
    replicates: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Working precision of the exact transition laws.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

fn resolve(cli: &Cli) -> mlcoal::Result<ExperimentConfig> {
    let experiment = cli.command.experiment();
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(path) => {
            let cfg = harness::load_config(path)?;
            if cfg.experiment != experiment {
                return Err(Error::Config(format!(
                    "config is for `{}` but the subcommand is `{experiment}`",
                    cfg.experiment
                )));
            }
            cfg
        }
        None => ExperimentConfig::default_for(experiment),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(r) = c.replicates {
        cfg.replicates = r;
    }
    if let Some(out) = &c.out {
        cfg.output_path = Some(out.to_string_lossy().into_owned());
    }
    if let Some(f) = &c.format {
        cfg.format = f.parse::<Format>()?;
    }
    if let Some(bits) = c.precision_bits {
        cfg.precision_bits = bits;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("mlcoal: {e}");
            return ExitCode::from(exit_code::CONFIG as u8);
        }
    };
    let outcome = harness::run(&cfg, Exec::from_jobs(cli.common.jobs));
    let code = harness::exit_code_for(&outcome);
    match outcome {
        Ok(result) => {
            if let Err(e) = harness::write_results(&result, &cfg) {
                eprintln!("mlcoal: {e}");
                return ExitCode::from(exit_code::FAILURE as u8);
            }
            eprintln!("{}", result.summary());
        }
        Err(e) => eprintln!("mlcoal: {e}"),
    }
    ExitCode::from(code as u8)
}
