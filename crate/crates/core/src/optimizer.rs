//! The AdaDGS loop: a DGS gradient, a full log-spaced line search along it,
//! a smoothing radius that follows the accepted step, and random re-orientation
//! of the smoothing frame when progress stalls.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{Domain, Objective};
use crate::error::{Error, Result};
use crate::gradient::{dgs_gradient, norm, stencil_size, Frame};
use crate::quadrature::{gauss_hermite_rule, QuadratureRule};
use crate::trace::{Trace, TraceRow};

pub const DEFAULT_ORDER: usize = 5;
pub const DEFAULT_GAMMA: f64 = 0.001;
/// Default `L_min / L_max`.
pub const DEFAULT_MIN_DISTANCE_RATIO: f64 = 0.005;
pub const DEFAULT_RESET_INTERVAL: usize = 10;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;
/// Gradients at or below this norm cannot be normalized.
pub const DEGENERATE_NORM: f64 = 1e-12;
/// Floor of the denominator in the relative-change trigger.
pub const RELATIVE_CHANGE_FLOOR: f64 = 1e-12;
/// Repeated stalls halve the radius; it never drops below this.
pub const MIN_SIGMA: f64 = f64::MIN_POSITIVE;

/// Which length the radius is averaged with after a line search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusUpdate {
    /// The accepted step length `L_max * rho^J`.
    #[default]
    Distance,
    /// The learning rate `L_max * rho^J / |g|`.
    LearningRate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialFrame {
    #[default]
    Identity,
    Random,
}

/// User-facing AdaDGS settings. `None` fields take defaults that depend on the
/// objective's search domain; see [`AdaDgsConfig::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaDgsConfig {
    /// Gauss–Hermite order.
    pub order: usize,
    /// Longest line-search step. Default: domain diagonal.
    pub l_max: Option<f64>,
    /// Shortest line-search step. Default: `0.005 * l_max`, or derived from
    /// `contraction` when that and `line_search_points` are both set.
    pub l_min: Option<f64>,
    /// Ratio between consecutive line-search steps.
    pub contraction: Option<f64>,
    /// Candidates per line search. Default: `max(12, round(0.05 * order * d))`.
    pub line_search_points: Option<usize>,
    /// Initial radius. Default: `sigma0_widths * domain width`.
    pub sigma0: Option<f64>,
    pub sigma0_widths: f64,
    /// Relative-change threshold for random exploration; 0 disables it.
    pub gamma: f64,
    pub max_iterations: usize,
    /// Evaluation cap, including the initial evaluation.
    pub budget: u64,
    /// Minimum number of iterations between two exploration resets.
    pub reset_interval: usize,
    pub radius_update: RadiusUpdate,
    pub initial_frame: InitialFrame,
    pub skip_zero_node: bool,
    pub seed: u64,
}

impl Default for AdaDgsConfig {
    fn default() -> Self {
        AdaDgsConfig {
            order: DEFAULT_ORDER,
            l_max: None,
            l_min: None,
            contraction: None,
            line_search_points: None,
            sigma0: None,
            sigma0_widths: 1.0,
            gamma: DEFAULT_GAMMA,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            budget: u64::MAX,
            reset_interval: DEFAULT_RESET_INTERVAL,
            radius_update: RadiusUpdate::default(),
            initial_frame: InitialFrame::default(),
            skip_zero_node: true,
            seed: 0,
        }
    }
}

/// Fully determined AdaDGS settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub order: usize,
    pub l_max: f64,
    pub l_min: f64,
    pub line_search_points: usize,
    pub sigma0: f64,
    pub gamma: f64,
    pub max_iterations: usize,
    pub budget: u64,
    pub reset_interval: usize,
    pub radius_update: RadiusUpdate,
    pub initial_frame: InitialFrame,
    pub skip_zero_node: bool,
    pub seed: u64,
}

impl Settings {
    /// `rho = (l_min / l_max)^(1 / (S - 1))`.
    pub fn contraction(&self) -> f64 {
        contraction(self.l_max, self.l_min, self.line_search_points)
    }
}

fn contraction(l_max: f64, l_min: f64, points: usize) -> f64 {
    (l_min / l_max).powf(1.0 / (points - 1) as f64)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl AdaDgsConfig {
    pub fn resolve(&self, domain: &Domain) -> Result<Settings> {
        let d = domain.dim();
        // a single node sits at zero and carries no slope information
        if self.order < 2 || self.order > crate::quadrature::MAX_ORDER {
            return Err(Error::invalid(format!(
                "Gauss-Hermite order must be in 2..={}, got {}",
                crate::quadrature::MAX_ORDER,
                self.order
            )));
        }
        let l_max = positive("l_max", self.l_max.unwrap_or_else(|| domain.diagonal()))?;

        let (l_min, points) = match (self.contraction, self.l_min, self.line_search_points) {
            (Some(_), Some(_), Some(_)) => {
                return Err(Error::invalid(
                    "contraction, l_min and line_search_points cannot all be set",
                ))
            }
            (Some(rho), l_min, None) => {
                if !(rho > 0.0 && rho < 1.0) {
                    return Err(Error::invalid(format!("contraction must be in (0, 1), got {rho}")));
                }
                let l_min = positive("l_min", l_min.unwrap_or(DEFAULT_MIN_DISTANCE_RATIO * l_max))?;
                let steps = ((l_min / l_max).ln() / rho.ln()).round().max(1.0) as usize;
                (l_max * rho.powi(steps as i32), steps + 1)
            }
            (Some(rho), None, Some(points)) => {
                if !(rho > 0.0 && rho < 1.0) {
                    return Err(Error::invalid(format!("contraction must be in (0, 1), got {rho}")));
                }
                if points < 2 {
                    return Err(Error::invalid("line search needs at least 2 points"));
                }
                (l_max * rho.powi(points as i32 - 1), points)
            }
            (None, l_min, points) => {
                let l_min = positive("l_min", l_min.unwrap_or(DEFAULT_MIN_DISTANCE_RATIO * l_max))?;
                let points = points
                    .unwrap_or_else(|| 12.max((0.05 * (self.order * d) as f64).round() as usize));
                (l_min, points)
            }
        };
        if !(l_min > 0.0 && l_min < l_max) {
            return Err(Error::invalid(format!("need 0 < l_min < l_max, got {l_min} and {l_max}")));
        }
        if points < 2 {
            return Err(Error::invalid("line search needs at least 2 points"));
        }
        let sigma0 = positive(
            "sigma0",
            self.sigma0.unwrap_or_else(|| self.sigma0_widths * domain.width()),
        )?;
        if !(self.gamma >= 0.0) {
            return Err(Error::invalid(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if self.budget == 0 {
            return Err(Error::invalid("budget must be at least 1"));
        }
        Ok(Settings {
            order: self.order,
            l_max,
            l_min,
            line_search_points: points,
            sigma0,
            gamma: self.gamma,
            max_iterations: self.max_iterations,
            budget: self.budget,
            reset_interval: self.reset_interval,
            radius_update: self.radius_update,
            initial_frame: self.initial_frame,
            skip_zero_node: self.skip_zero_node,
            seed: self.seed,
        })
    }
}

/// Step lengths `l_max * rho^j` for `j = 0..points`, longest first.
pub fn candidate_distances(l_max: f64, l_min: f64, points: usize) -> Vec<f64> {
    let rho = contraction(l_max, l_min, points);
    (0..points)
        .map(|j| (l_max * rho.powi(j as i32)).clamp(l_min, l_max))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineSearchOutcome {
    /// Winning candidate `J`, or `None` when no candidate beat the incumbent.
    pub index: Option<usize>,
    pub step_distance: f64,
    /// `step_distance / |g|`.
    pub learning_rate: f64,
    pub x_new: Vec<f64>,
    pub f_new: f64,
    pub evals_used: u64,
}

/// Full log-spaced line search along `-g / |g|`.
///
/// All `points` candidates are evaluated. The lowest wins, ties going to the
/// smaller index (longer step). The incumbent `(x, f_x)` is kept unless some
/// candidate is strictly better.
pub fn line_search(
    f: &Objective,
    x: &[f64],
    f_x: f64,
    g: &[f64],
    l_max: f64,
    l_min: f64,
    points: usize,
) -> Result<LineSearchOutcome> {
    if !(l_min > 0.0 && l_min < l_max && l_max.is_finite()) || points < 2 {
        return Err(Error::invalid("line search needs 0 < l_min < l_max and at least 2 points"));
    }
    if g.len() != x.len() {
        return Err(Error::invalid("gradient and point dimensions differ"));
    }
    let g_norm = norm(g);
    if !(g_norm > DEGENERATE_NORM) {
        return Err(Error::DegenerateGradient { norm: g_norm });
    }
    let direction: Vec<f64> = g.iter().map(|v| v / g_norm).collect();
    let distances = candidate_distances(l_max, l_min, points);
    let candidate = |j: usize, buf: &mut Vec<f64>| {
        buf.extend(x.iter().zip(&direction).map(|(a, u)| a - distances[j] * u));
    };
    let values = f.eval_generated(points, candidate)?;

    let mut best = 0;
    for (j, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = j;
        }
    }
    let evals_used = points as u64;
    if values[best] < f_x {
        let mut x_new = Vec::with_capacity(x.len());
        candidate(best, &mut x_new);
        Ok(LineSearchOutcome {
            index: Some(best),
            step_distance: distances[best],
            learning_rate: distances[best] / g_norm,
            x_new,
            f_new: values[best],
            evals_used,
        })
    } else {
        Ok(LineSearchOutcome {
            index: None,
            step_distance: 0.0,
            learning_rate: 0.0,
            x_new: x.to_vec(),
            f_new: f_x,
            evals_used,
        })
    }
}

/// Mean of the previous radius and the last step.
pub fn sigma_update(sigma_prev: f64, step: f64) -> f64 {
    (0.5 * (sigma_prev + step)).max(MIN_SIGMA)
}

/// Haar-distributed orthonormal frame: QR of a Gaussian matrix with the signs
/// of `R`'s diagonal folded back into `Q`.
pub fn random_rotation<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Frame> {
    if dim == 0 {
        return Err(Error::invalid("rotation dimension must be positive"));
    }
    let gaussian = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    Frame::from_matrix_unchecked(&q)
}

/// Mutable state of one AdaDGS run.
#[derive(Clone, Debug)]
pub struct OptimizerState {
    pub x: Vec<f64>,
    pub sigma: f64,
    pub frame: Frame,
    /// Completed iterations.
    pub t: usize,
    pub evals: u64,
    pub f_current: f64,
    pub f_best: f64,
    pub x_best: Vec<f64>,
    pub last_reset: Option<usize>,
    rng: ChaCha8Rng,
}

impl OptimizerState {
    /// Evaluates `x0` (one query) and sets up the initial frame and radius.
    pub fn initialize(f: &Objective, x0: &[f64], settings: &Settings) -> Result<Self> {
        if x0.len() != f.dim() || x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("initial point must be finite and match the objective"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        let frame = match settings.initial_frame {
            InitialFrame::Identity => Frame::identity(x0.len()),
            InitialFrame::Random => random_rotation(x0.len(), &mut rng)?,
        };
        let f0 = f.eval(x0)?;
        Ok(OptimizerState {
            x: x0.to_vec(),
            sigma: settings.sigma0,
            frame,
            t: 0,
            evals: 1,
            f_current: f0,
            f_best: f0,
            x_best: x0.to_vec(),
            last_reset: None,
            rng,
        })
    }

    fn reset_allowed(&self, interval: usize) -> bool {
        self.last_reset.is_none_or(|r| self.t - r >= interval)
    }

    fn explore(&mut self, settings: &Settings) -> Result<()> {
        self.frame = random_rotation(self.x.len(), &mut self.rng)?;
        self.sigma = settings.sigma0;
        self.last_reset = Some(self.t);
        Ok(())
    }

    pub fn row(&self, step: f64) -> TraceRow {
        TraceRow {
            iteration: self.t,
            evals: self.evals,
            f_current: self.f_current,
            f_best: self.f_best,
            sigma: self.sigma,
            step,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub line_search_index: Option<usize>,
    pub step_distance: f64,
    pub learning_rate: f64,
    pub gradient_norm: f64,
    pub evals_used: u64,
    /// Frame re-drawn and radius reset during this step.
    pub explored: bool,
}

/// Queries needed for one full iteration.
pub fn iteration_cost(dim: usize, rule: &QuadratureRule, settings: &Settings) -> u64 {
    stencil_size(dim, rule, settings.skip_zero_node) + settings.line_search_points as u64
}

/// Advances `state` by one iteration. Returns `Ok(None)` without touching the
/// objective when the remaining budget cannot cover a full iteration.
pub fn adadgs_step(
    f: &Objective,
    state: &mut OptimizerState,
    settings: &Settings,
    rule: &QuadratureRule,
) -> Result<Option<StepReport>> {
    if state.evals.saturating_add(iteration_cost(state.x.len(), rule, settings)) > settings.budget {
        return Ok(None);
    }
    let grad = dgs_gradient(f, &state.x, &state.frame, state.sigma, rule, settings.skip_zero_node)?;
    state.evals += grad.evals_used;
    let g_norm = norm(&grad.vector);

    let search = line_search(
        f,
        &state.x,
        state.f_current,
        &grad.vector,
        settings.l_max,
        settings.l_min,
        settings.line_search_points,
    );
    let outcome = match search {
        Ok(o) => o,
        Err(Error::DegenerateGradient { .. }) => {
            let explored = state.reset_allowed(settings.reset_interval);
            if explored {
                state.explore(settings)?;
            } else {
                state.sigma = sigma_update(state.sigma, 0.0);
            }
            state.t += 1;
            return Ok(Some(StepReport {
                line_search_index: None,
                step_distance: 0.0,
                learning_rate: 0.0,
                gradient_norm: g_norm,
                evals_used: grad.evals_used,
                explored,
            }));
        }
        Err(e) => return Err(e),
    };
    state.evals += outcome.evals_used;

    let f_prev = state.f_current;
    state.x = outcome.x_new;
    state.f_current = outcome.f_new;
    if state.f_current < state.f_best {
        state.f_best = state.f_current;
        state.x_best.clone_from(&state.x);
    }
    let step = match settings.radius_update {
        RadiusUpdate::Distance => outcome.step_distance,
        RadiusUpdate::LearningRate => outcome.learning_rate,
    };
    state.sigma = sigma_update(state.sigma, step);

    let relative = (state.f_current - f_prev).abs() / f_prev.abs().max(RELATIVE_CHANGE_FLOOR);
    let explored = relative < settings.gamma && state.reset_allowed(settings.reset_interval);
    if explored {
        state.explore(settings)?;
    }
    state.t += 1;
    Ok(Some(StepReport {
        line_search_index: outcome.index,
        step_distance: outcome.step_distance,
        learning_rate: outcome.learning_rate,
        gradient_norm: g_norm,
        evals_used: grad.evals_used + outcome.evals_used,
        explored,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "reason", content = "detail")]
pub enum Termination {
    MaxIterations,
    BudgetExhausted,
    /// An objective query failed; the trace holds everything up to the failure.
    EvaluationFailed(String),
}

#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub x_final: Vec<f64>,
    pub evals: u64,
    pub trace: Trace,
    pub termination: Termination,
}

/// Runs AdaDGS from `x0` until the iteration cap or evaluation budget.
pub fn adadgs_minimize(f: &Objective, x0: &[f64], cfg: &AdaDgsConfig) -> Result<MinimizeResult> {
    let settings = cfg.resolve(f.domain())?;
    minimize_with(f, x0, &settings)
}

pub fn minimize_with(f: &Objective, x0: &[f64], settings: &Settings) -> Result<MinimizeResult> {
    let rule = gauss_hermite_rule(settings.order)?;
    let mut state = OptimizerState::initialize(f, x0, settings)?;
    let mut trace = Trace::new();
    trace.push(state.row(0.0));

    let termination = loop {
        if state.t >= settings.max_iterations {
            break Termination::MaxIterations;
        }
        match adadgs_step(f, &mut state, settings, &rule) {
            Ok(Some(report)) => trace.push(state.row(report.step_distance)),
            Ok(None) => break Termination::BudgetExhausted,
            Err(e @ Error::Evaluation { .. }) => break Termination::EvaluationFailed(e.to_string()),
            Err(e) => return Err(e),
        }
    };
    Ok(MinimizeResult {
        x_best: state.x_best,
        f_best: state.f_best,
        x_final: state.x,
        evals: state.evals,
        trace,
        termination,
    })
}
