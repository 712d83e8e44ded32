//! Layered run configuration: preset, then config file, then command line.
//!
//! The file is TOML with three sections. Keys are the long CLI flag names:
//!
//! ```toml
//! [run]
//! func = "ackley"
//! dim = 100
//! optimizer = "adadgs"
//! budget = 300000
//!
//! [adadgs]
//! gamma = 0.0
//! contraction = 0.9
//! points = 200
//!
//! [baseline]
//! lr = 0.01
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::preset::preset;
use super::{BaselineOverrides, ExperimentSpec, OptimizerKind};
use crate::error::{Error, Result};
use crate::optimizer::{AdaDgsConfig, InitialFrame, RadiusUpdate};
use crate::parallel::Execution;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunSection {
    pub func: Option<String>,
    pub dim: Option<usize>,
    pub optimizer: Option<OptimizerKind>,
    pub trials: Option<usize>,
    pub budget: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub preset: Option<String>,
    pub workers: Option<usize>,
    pub execution: Option<Execution>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AdaDgsSection {
    pub order: Option<usize>,
    pub l_max: Option<f64>,
    pub l_min: Option<f64>,
    pub contraction: Option<f64>,
    pub points: Option<usize>,
    pub sigma0: Option<f64>,
    pub sigma0_widths: Option<f64>,
    pub gamma: Option<f64>,
    pub max_iters: Option<usize>,
    pub reset_interval: Option<usize>,
    pub radius_update: Option<RadiusUpdate>,
    pub initial_frame: Option<InitialFrame>,
    pub skip_zero_node: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct BaselineSection {
    pub lr: Option<f64>,
    pub sigma_or_h: Option<f64>,
    pub population: Option<usize>,
}

/// A partial run configuration; every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunOverrides {
    pub run: RunSection,
    pub adadgs: AdaDgsSection,
    pub baseline: BaselineSection,
}

macro_rules! overlay {
    ($dst:expr, $src:expr; $($field:ident),* $(,)?) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl RunOverrides {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Values set in `higher` win.
    pub fn overlaid_with(mut self, higher: &RunOverrides) -> Self {
        overlay!(self.run, higher.run; func, dim, optimizer, trials, budget, seed, out, preset, workers, execution);
        overlay!(self.adadgs, higher.adadgs; order, l_max, l_min, contraction, points, sigma0,
            sigma0_widths, gamma, max_iters, reset_interval, radius_update, initial_frame, skip_zero_node);
        overlay!(self.baseline, higher.baseline; lr, sigma_or_h, population);
        self
    }

    /// Builds the experiment: preset (if named) first, then these overrides.
    /// `func` and `budget` are required.
    pub fn into_spec(self) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::default();
        if let Some(name) = &self.run.preset {
            let p = preset(name)?;
            spec.dim = p.dim;
            spec.trials = p.trials;
            spec.adadgs = AdaDgsConfig {
                max_iterations: spec.adadgs.max_iterations,
                ..p.adadgs
            };
            spec.preset = Some(p.name.to_string());
        }
        let r = self.run;
        spec.function = r.func.ok_or_else(|| Error::Config("missing required 'func'".into()))?;
        spec.budget = r.budget.ok_or_else(|| Error::Config("missing required 'budget'".into()))?;
        if let Some(v) = r.dim {
            spec.dim = v;
        }
        if let Some(v) = r.optimizer {
            spec.optimizer = v;
        }
        if let Some(v) = r.trials {
            spec.trials = v;
        }
        if let Some(v) = r.seed {
            spec.seed = v;
        }
        if let Some(v) = r.out {
            spec.out_dir = v;
        }
        spec.workers = r.workers;
        if let Some(v) = r.execution {
            spec.execution = v;
        }

        let a = self.adadgs;
        let c = &mut spec.adadgs;
        if let Some(v) = a.order {
            c.order = v;
        }
        if a.l_max.is_some() {
            c.l_max = a.l_max;
        }
        if a.l_min.is_some() {
            c.l_min = a.l_min;
        }
        if a.contraction.is_some() {
            c.contraction = a.contraction;
        }
        if a.points.is_some() {
            c.line_search_points = a.points;
        }
        // an explicit l_min beats a preset's point count when a contraction is set
        if a.l_min.is_some() && a.points.is_none() && c.contraction.is_some() {
            c.line_search_points = None;
        }
        if a.sigma0.is_some() {
            c.sigma0 = a.sigma0;
        }
        if let Some(v) = a.sigma0_widths {
            c.sigma0_widths = v;
        }
        if let Some(v) = a.gamma {
            c.gamma = v;
        }
        if let Some(v) = a.max_iters {
            c.max_iterations = v;
        }
        if let Some(v) = a.reset_interval {
            c.reset_interval = v;
        }
        if let Some(v) = a.radius_update {
            c.radius_update = v;
        }
        if let Some(v) = a.initial_frame {
            c.initial_frame = v;
        }
        if let Some(v) = a.skip_zero_node {
            c.skip_zero_node = v;
        }

        spec.baseline = BaselineOverrides {
            learning_rate: self.baseline.lr,
            sigma_or_h: self.baseline.sigma_or_h,
            population: self.baseline.population,
            max_iterations: a.max_iters,
        };
        spec.validate()?;
        Ok(spec)
    }
}
