use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fdrlearn::harness::{self, Experiment, ExperimentConfig};
use fdrlearn::learners::{self, Criterion, LearnResult, ObjectiveSpec};
use fdrlearn::model::{Dataset, HypothesisClass};
use fdrlearn::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ABSTAIN: u8 = 3;
const EXIT_TOO_LARGE: u8 = 4;

#[derive(Parser)]
#[command(name = "fdrlearn", version, about = "Classifier learning under FDR/FNDR criteria")]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; overrides the config file.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deviation-bound violation frequencies over a fixed class.
    BoundCheck(RunArgs),
    /// Regret of the penalized rule across sample sizes.
    Consistency(RunArgs),
    /// Guarantee checks for a constrained rule.
    Constrained(RunArgs),
    /// Fit one rule to a CSV dataset.
    Learn(LearnArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving records.csv and summary.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lambda,
    Fdr,
    Np,
    Pr,
}

#[derive(clap::Args)]
struct LearnArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Confidence; defaults to 1/n² in lambda mode.
    #[arg(long)]
    delta: Option<f64>,
    /// Histogram level; defaults to the schedule level for the sample size.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct LearnOutput<'a> {
    tool_version: &'a str,
    n: usize,
    k: u32,
    spec: ObjectiveSpec,
    #[serde(flatten)]
    result: &'a LearnResult,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::TooLarge(_) => EXIT_TOO_LARGE,
                Error::Io(_) => EXIT_FAILURE,
                _ => EXIT_CONFIG,
            })
        }
    }
}

fn dispatch(cli: Cli) -> fdrlearn::Result<u8> {
    let experiment = match &cli.command {
        Command::BoundCheck(_) => Experiment::BoundCheck,
        Command::Consistency(_) => Experiment::Consistency,
        Command::Constrained(_) => Experiment::ConstrainedCheck,
        Command::Learn(args) => return learn(args),
    };
    let (Command::BoundCheck(args) | Command::Consistency(args) | Command::Constrained(args)) = &cli.command else {
        unreachable!("learn handled above")
    };
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if cfg.experiment != experiment {
        return Err(Error::Config(format!(
            "config describes a {} experiment, not {}",
            cfg.experiment.name(),
            experiment.name()
        )));
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = Some(workers);
    }
    let report = harness::run(&cfg)?;
    report.write_to_dir(&args.out)?;
    eprintln!(
        "{}: {} records in {:.2}s -> {}",
        experiment.name(),
        report.records.len(),
        report.wall_clock_seconds,
        args.out.display()
    );
    Ok(0)
}

fn learn(args: &LearnArgs) -> fdrlearn::Result<u8> {
    let data = Dataset::read_csv_path(&args.data)?;
    let n = data.len();
    let schedule = learners::make_schedule(n, data.dim())?;
    let k = args.k.unwrap_or(schedule.k_n);
    let class = HypothesisClass::histogram(k, data.dim())?;
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| Error::Config(format!("--{name} is required for this mode")));
    let spec = match args.mode {
        Mode::Lambda => ObjectiveSpec::weighted(
            need("lambda", args.lambda)?,
            args.delta.unwrap_or(schedule.delta_n),
            schedule.admissibility(),
        ),
        Mode::Fdr => ObjectiveSpec::constrained(Criterion::Fdr { alpha: need("alpha", args.alpha)? }, need("delta", args.delta)?),
        Mode::Np => {
            ObjectiveSpec::constrained(Criterion::NeymanPearson { alpha: need("alpha", args.alpha)? }, need("delta", args.delta)?)
        }
        Mode::Pr => {
            ObjectiveSpec::constrained(Criterion::PrecisionRecall { beta: need("beta", args.beta)? }, need("delta", args.delta)?)
        }
    };
    let result = learners::solve(&class, &data, &spec)?;
    let out = LearnOutput { tool_version: harness::TOOL_VERSION, n, k, spec, result: &result };
    std::fs::write(&args.out, serde_json::to_string_pretty(&out)? + "\n")?;
    Ok(if result.abstained { EXIT_ABSTAIN } else { 0 })
}
