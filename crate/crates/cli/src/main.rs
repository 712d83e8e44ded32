use std::path::PathBuf;
use std::process::ExitCode;

use adadgs::benchmarks::list_functions;
use adadgs::harness::{presets, run_experiment, AdaDgsSection, BaselineSection, OptimizerKind, RunOverrides, RunSection};
use adadgs::optimizer::{InitialFrame, RadiusUpdate};
use adadgs::Execution;
use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Benchmark runner for the AdaDGS optimizer and its baselines.
#[derive(Parser)]
#[command(name = "adadgs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-trial experiment.
    Run(Box<RunArgs>),
    /// List the benchmark functions.
    List,
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    func: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// adadgs, es_bpop, nesterov or fd.
    #[arg(long)]
    optimizer: Option<OptimizerKind>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trials run concurrently.
    #[arg(long, env = "ADADGS_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_enum)]
    execution: Option<ExecutionArg>,

    #[arg(long, help_heading = "AdaDGS")]
    order: Option<usize>,
    #[arg(long, help_heading = "AdaDGS")]
    l_max: Option<f64>,
    #[arg(long, help_heading = "AdaDGS")]
    l_min: Option<f64>,
    #[arg(long, help_heading = "AdaDGS")]
    contraction: Option<f64>,
    /// Line-search candidates.
    #[arg(long, help_heading = "AdaDGS")]
    points: Option<usize>,
    #[arg(long, help_heading = "AdaDGS")]
    sigma0: Option<f64>,
    /// Initial radius as a multiple of the domain width.
    #[arg(long, help_heading = "AdaDGS")]
    sigma0_widths: Option<f64>,
    #[arg(long, help_heading = "AdaDGS")]
    gamma: Option<f64>,
    #[arg(long, help_heading = "AdaDGS")]
    max_iters: Option<usize>,
    #[arg(long, help_heading = "AdaDGS")]
    reset_interval: Option<usize>,
    #[arg(long, value_enum, help_heading = "AdaDGS")]
    radius_update: Option<RadiusArg>,
    #[arg(long, value_enum, help_heading = "AdaDGS")]
    initial_frame: Option<FrameArg>,
    #[arg(long, help_heading = "AdaDGS")]
    skip_zero_node: Option<bool>,

    #[arg(long, help_heading = "Baselines")]
    lr: Option<f64>,
    #[arg(long, help_heading = "Baselines")]
    sigma_or_h: Option<f64>,
    #[arg(long, help_heading = "Baselines")]
    population: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecutionArg {
    Sequential,
    Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum RadiusArg {
    Distance,
    LearningRate,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Identity,
    Random,
}

impl RunArgs {
    fn overrides(&self) -> RunOverrides {
        RunOverrides {
            run: RunSection {
                func: self.func.clone(),
                dim: self.dim,
                optimizer: self.optimizer,
                trials: self.trials,
                budget: self.budget,
                seed: self.seed,
                out: self.out.clone(),
                preset: self.preset.clone(),
                workers: self.workers,
                execution: self.execution.map(|e| match e {
                    ExecutionArg::Sequential => Execution::Sequential,
                    ExecutionArg::Parallel => Execution::Parallel,
                }),
            },
            adadgs: AdaDgsSection {
                order: self.order,
                l_max: self.l_max,
                l_min: self.l_min,
                contraction: self.contraction,
                points: self.points,
                sigma0: self.sigma0,
                sigma0_widths: self.sigma0_widths,
                gamma: self.gamma,
                max_iters: self.max_iters,
                reset_interval: self.reset_interval,
                radius_update: self.radius_update.map(|r| match r {
                    RadiusArg::Distance => RadiusUpdate::Distance,
                    RadiusArg::LearningRate => RadiusUpdate::LearningRate,
                }),
                initial_frame: self.initial_frame.map(|f| match f {
                    FrameArg::Identity => InitialFrame::Identity,
                    FrameArg::Random => InitialFrame::Random,
                }),
                skip_zero_node: self.skip_zero_node,
            },
            baseline: BaselineSection {
                lr: self.lr,
                sigma_or_h: self.sigma_or_h,
                population: self.population,
            },
        }
    }
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let base = match &args.config {
        Some(path) => RunOverrides::from_file(path)?,
        None => RunOverrides::default(),
    };
    let spec = base.overlaid_with(&args.overrides()).into_spec()?;
    let dir = spec.run_dir();
    let summary = run_experiment(&spec).with_context(|| format!("experiment failed; partial output in {}", dir.display()))?;
    for t in &summary.per_trial {
        println!(
            "trial {:>3}  f_best {:<24e} evals {:>9}  {}",
            t.trial, t.f_best, t.evals, t.termination
        );
    }
    let s = &summary.final_f_best;
    println!(
        "{} d={} {}: median {:e}  mean {:e}  std {:e}  min {:e}  max {:e}  (optimum {})",
        summary.function,
        summary.dim,
        summary.optimizer.name(),
        s.median,
        s.mean,
        s.std,
        s.min,
        s.max,
        summary.optimum
    );
    println!("results written to {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(*args),
        Command::List => {
            println!("{:<16} {:<24} optimum", "name", "domain");
            for f in list_functions() {
                println!("{:<16} {:<24} {}", f.name, format!("[{}, {}]^d", f.lower, f.upper), f.optimum);
            }
            Ok(())
        }
        Command::Presets => {
            for p in presets() {
                println!("{:<14} d={:<5} trials={:<3} {}", p.name, p.dim, p.trials, p.description);
            }
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
