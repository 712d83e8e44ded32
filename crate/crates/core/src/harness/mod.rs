//! Multi-trial experiment runner.
//!
//! Each trial draws its own rotation, optimum location, starting point and
//! optimizer seed from the master seed and the trial index, so trials can run
//! in any order (or concurrently) and still produce identical files.
//!
//! Output layout under `out_dir/<func>_<dim>_<optimizer>/`:
//! `trial_<k>.csv`, `summary.json`, `manifest.json`.

mod config;
mod preset;
mod summary;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use config::{AdaDgsSection, BaselineSection, RunOverrides, RunSection};
pub use preset::{preset, presets, Preset, PRESET_NAMES};
pub use summary::{aggregate, checkpoint_grid, Checkpoint, Stats, CHECKPOINTS};

pub use crate::trace::{Trace, TraceRow, CSV_HEADER};

use crate::baselines::{baseline_minimize, BaselineConfig, BaselineMethod};
use crate::benchmarks::{make_benchmark, BaseFunction};
use crate::error::{Error, Result};
use crate::optimizer::{minimize_with, AdaDgsConfig, MinimizeResult, Termination};
use crate::parallel::Execution;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    #[default]
    Adadgs,
    EsBpop,
    Nesterov,
    Fd,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Adadgs => "adadgs",
            OptimizerKind::EsBpop => "es_bpop",
            OptimizerKind::Nesterov => "nesterov",
            OptimizerKind::Fd => "fd",
        }
    }

    fn baseline(self) -> Option<BaselineMethod> {
        match self {
            OptimizerKind::Adadgs => None,
            OptimizerKind::EsBpop => Some(BaselineMethod::EsBpop),
            OptimizerKind::Nesterov => Some(BaselineMethod::Nesterov),
            OptimizerKind::Fd => Some(BaselineMethod::Fd),
        }
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            OptimizerKind::Adadgs,
            OptimizerKind::EsBpop,
            OptimizerKind::Nesterov,
            OptimizerKind::Fd,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown optimizer '{s}'")))
    }
}

/// Baseline settings left unset fall back to [`BaselineConfig::new`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BaselineOverrides {
    pub learning_rate: Option<f64>,
    pub sigma_or_h: Option<f64>,
    pub population: Option<usize>,
    pub max_iterations: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub function: String,
    pub dim: usize,
    pub optimizer: OptimizerKind,
    pub trials: usize,
    /// Evaluation cap per trial.
    pub budget: u64,
    pub seed: u64,
    pub preset: Option<String>,
    pub adadgs: AdaDgsConfig,
    pub baseline: BaselineOverrides,
    pub out_dir: PathBuf,
    /// Concurrent trials; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Batch evaluation policy inside each trial.
    pub execution: Execution,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            function: String::new(),
            dim: 10,
            optimizer: OptimizerKind::Adadgs,
            trials: 20,
            budget: 0,
            seed: 0,
            preset: None,
            adadgs: AdaDgsConfig {
                max_iterations: usize::MAX,
                ..AdaDgsConfig::default()
            },
            baseline: BaselineOverrides::default(),
            out_dir: PathBuf::from("results"),
            workers: None,
            execution: Execution::default(),
        }
    }
}

/// Seeds owned by one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSeeds {
    pub benchmark: u64,
    pub start: u64,
    pub optimizer: u64,
}

impl TrialSeeds {
    pub fn derive(master: u64, trial: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master);
        rng.set_stream(trial as u64);
        TrialSeeds {
            benchmark: rng.next_u64(),
            start: rng.next_u64(),
            optimizer: rng.next_u64(),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        BaseFunction::from_str(&self.function)?;
        if self.dim < 2 {
            return Err(Error::Config(format!("dim must be at least 2, got {}", self.dim)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn run_name(&self) -> String {
        format!("{}_{}_{}", self.function, self.dim, self.optimizer.name())
    }

    pub fn run_dir(&self) -> PathBuf {
        self.out_dir.join(self.run_name())
    }

    fn adadgs_config(&self, seed: u64) -> AdaDgsConfig {
        AdaDgsConfig {
            budget: self.budget,
            seed,
            ..self.adadgs.clone()
        }
    }

    fn baseline_config(&self, method: BaselineMethod, seed: u64) -> BaselineConfig {
        let mut cfg = BaselineConfig::new(method);
        if let Some(v) = self.baseline.learning_rate {
            cfg.learning_rate = v;
        }
        if let Some(v) = self.baseline.sigma_or_h {
            cfg.sigma_or_h = v;
        }
        cfg.population = self.baseline.population;
        cfg.max_iterations = self.baseline.max_iterations.unwrap_or(usize::MAX);
        cfg.budget = self.budget;
        cfg.seed = seed;
        cfg
    }

    /// Runs a single trial without touching the filesystem.
    pub fn run_trial(&self, trial: usize) -> Result<TrialOutcome> {
        let seeds = TrialSeeds::derive(self.seed, trial);
        let bench = make_benchmark(&self.function, self.dim, seeds.benchmark)?;
        let domain = bench.domain();
        let x0 = domain.sample(1.0, &mut ChaCha8Rng::seed_from_u64(seeds.start));
        let f = bench.into_objective().with_execution(self.execution);

        let result = match self.optimizer.baseline() {
            None => {
                let settings = self.adadgs_config(seeds.optimizer).resolve(&domain)?;
                minimize_with(&f, &x0, &settings)?
            }
            Some(method) => baseline_minimize(&f, &x0, &self.baseline_config(method, seeds.optimizer))?,
        };
        if f.evals() != result.evals {
            return Err(Error::Config(format!(
                "evaluation accounting mismatch: objective saw {}, optimizer reported {}",
                f.evals(),
                result.evals
            )));
        }
        Ok(TrialOutcome { trial, seeds, result })
    }
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seeds: TrialSeeds,
    pub result: MinimizeResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub seeds: TrialSeeds,
    pub file: String,
    pub f_initial: f64,
    pub f_best: f64,
    pub evals: u64,
    pub iterations: usize,
    pub termination: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub function: String,
    pub dim: usize,
    pub optimizer: OptimizerKind,
    pub trials: usize,
    pub budget: u64,
    pub optimum: f64,
    /// Statistics of the final `f_best` across trials.
    pub final_f_best: Stats,
    pub checkpoints: Vec<Checkpoint>,
    pub per_trial: Vec<TrialSummary>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    complete: bool,
    error: Option<String>,
    spec: &'a ExperimentSpec,
    resolved: serde_json::Value,
    trials: Vec<ManifestTrial>,
}

#[derive(Serialize)]
struct ManifestTrial {
    trial: usize,
    seeds: TrialSeeds,
    file: String,
}

fn trial_file(trial: usize) -> String {
    format!("trial_{trial}.csv")
}

/// Writes via a temporary sibling and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let write = || -> std::io::Result<()> {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()
    };
    write().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn write_manifest(spec: &ExperimentSpec, dir: &Path, complete: bool, error: Option<String>) -> Result<()> {
    let resolved = match spec.optimizer.baseline() {
        None => {
            let bench = make_benchmark(&spec.function, spec.dim, TrialSeeds::derive(spec.seed, 0).benchmark)?;
            serde_json::to_value(spec.adadgs_config(0).resolve(&bench.domain())?)
        }
        Some(m) => serde_json::to_value(spec.baseline_config(m, 0)),
    }
    .map_err(|e| Error::Config(e.to_string()))?;
    let manifest = Manifest {
        complete,
        error,
        spec,
        resolved,
        trials: (0..spec.trials)
            .map(|t| ManifestTrial {
                trial: t,
                seeds: TrialSeeds::derive(spec.seed, t),
                file: trial_file(t),
            })
            .collect(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    write_atomic(&dir.join("manifest.json"), text.as_bytes())
}

fn run_and_write(spec: &ExperimentSpec, dir: &Path, trial: usize) -> Result<TrialOutcome> {
    let outcome = spec.run_trial(trial)?;
    let mut csv = Vec::new();
    outcome
        .result
        .trace
        .write_csv(trial, &mut csv)
        .expect("writing to memory cannot fail");
    write_atomic(&dir.join(trial_file(trial)), &csv)?;
    if let Termination::EvaluationFailed(msg) = &outcome.result.termination {
        return Err(Error::Evaluation {
            index: 0,
            message: format!("trial {trial}: {msg}"),
        });
    }
    Ok(outcome)
}

fn run_trials(spec: &ExperimentSpec, dir: &Path) -> Result<Vec<Result<TrialOutcome>>> {
    let job = || crate::parallel::map_indexed(spec.trials, Execution::Parallel, |t| run_and_write(spec, dir, t));
    #[cfg(feature = "parallel")]
    if let Some(n) = spec.workers {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
        return Ok(pool.install(job));
    }
    Ok(job())
}

/// Summarizes finished trials.
pub fn summarize(spec: &ExperimentSpec, outcomes: &[TrialOutcome]) -> ExperimentSummary {
    let traces: Vec<&Trace> = outcomes.iter().map(|o| &o.result.trace).collect();
    let finals: Vec<f64> = outcomes.iter().map(|o| o.result.f_best).collect();
    let optimum = BaseFunction::from_str(&spec.function)
        .map(|f| f.optimum().value(spec.dim))
        .unwrap_or(f64::NAN);
    ExperimentSummary {
        function: spec.function.clone(),
        dim: spec.dim,
        optimizer: spec.optimizer,
        trials: spec.trials,
        budget: spec.budget,
        optimum,
        final_f_best: Stats::of(&finals),
        checkpoints: aggregate(&traces, spec.budget),
        per_trial: outcomes
            .iter()
            .map(|o| TrialSummary {
                trial: o.trial,
                seeds: o.seeds,
                file: trial_file(o.trial),
                f_initial: o.result.trace.rows()[0].f_best,
                f_best: o.result.f_best,
                evals: o.result.evals,
                iterations: o.result.trace.len() - 1,
                termination: match &o.result.termination {
                    Termination::MaxIterations => "max-iterations".into(),
                    Termination::BudgetExhausted => "budget-exhausted".into(),
                    Termination::EvaluationFailed(m) => format!("evaluation-failed: {m}"),
                },
            })
            .collect(),
    }
}

/// Runs every trial, writing one CSV per trial, `summary.json` and
/// `manifest.json`. On failure the files written so far are kept and the
/// manifest is left marked incomplete.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    let dir = spec.run_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_manifest(spec, &dir, false, None)?;

    let results = run_trials(spec, &dir)?;
    let mut outcomes = Vec::with_capacity(results.len());
    let mut first_error = None;
    for r in results {
        match r {
            Ok(o) => outcomes.push(o),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        write_manifest(spec, &dir, false, Some(e.to_string()))?;
        return Err(e);
    }

    let summary = summarize(spec, &outcomes);
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Config(e.to_string()))?;
    write_atomic(&dir.join("summary.json"), text.as_bytes())?;
    write_manifest(spec, &dir, true, None)?;
    Ok(summary)
}
