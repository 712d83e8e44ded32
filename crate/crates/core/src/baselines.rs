//! Reference optimizers: big-population Gaussian-smoothing ES, Nesterov–Spokoiny
//! random search and central finite-difference gradient descent.
//!
//! None of these query the iterate itself on every step, so their traces report
//! the best sample of each iteration as `f_current`, and `f_best`/`x_best`
//! track the best point ever queried.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::benchmarks::Objective;
use crate::error::{Error, Result};
use crate::gradient::{gs_mc_gradient, norm};
use crate::optimizer::{MinimizeResult, Termination, DEFAULT_MAX_ITERATIONS, DEFAULT_ORDER};
use crate::trace::{Trace, TraceRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMethod {
    EsBpop,
    Nesterov,
    Fd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    pub learning_rate: f64,
    /// Smoothing radius for ES, difference step for Nesterov and FD.
    pub sigma_or_h: f64,
    /// ES population; defaults to `5 * d` (the AdaDGS stencil size at the
    /// default order), rounded up to even when antithetic.
    pub population: Option<usize>,
    pub antithetic: bool,
    pub budget: u64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl BaselineConfig {
    pub fn new(method: BaselineMethod) -> Self {
        let (learning_rate, sigma_or_h) = match method {
            BaselineMethod::EsBpop => (0.01, 0.1),
            BaselineMethod::Nesterov => (1e-3, 1e-4),
            BaselineMethod::Fd => (0.01, 1e-5),
        };
        BaselineConfig {
            method,
            learning_rate,
            sigma_or_h,
            population: None,
            antithetic: true,
            budget: u64::MAX,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: 0,
        }
    }

    pub fn population_for(&self, dim: usize) -> usize {
        let n = self.population.unwrap_or(DEFAULT_ORDER * dim).max(1);
        if self.antithetic {
            n + n % 2
        } else {
            n
        }
    }

    /// Queries spent per iteration.
    pub fn iteration_cost(&self, dim: usize) -> u64 {
        match self.method {
            BaselineMethod::EsBpop => self.population_for(dim) as u64,
            BaselineMethod::Nesterov => 2,
            BaselineMethod::Fd => 2 * dim as u64,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if !(self.sigma_or_h.is_finite() && self.sigma_or_h > 0.0) {
            return Err(Error::invalid("sigma / difference step must be positive"));
        }
        if self.population == Some(0) {
            return Err(Error::invalid("population must be positive"));
        }
        if self.budget == 0 {
            return Err(Error::invalid("budget must be at least 1"));
        }
        Ok(())
    }
}

/// Central-difference gradient `(F(x + h e_i) - F(x - h e_i)) / 2h`.
/// Samples are evaluated as one batch ordered `+e_0, -e_0, +e_1, ...`; the
/// returned values follow that order.
pub fn fd_gradient(f: &Objective, x: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = x.len();
    let values = f.eval_generated(2 * d, |k, buf| {
        buf.extend_from_slice(x);
        buf[k / 2] += if k.is_multiple_of(2) { h } else { -h };
    })?;
    let grad = values.chunks_exact(2).map(|p| (p[0] - p[1]) / (2.0 * h)).collect();
    Ok((grad, values))
}

/// Forward-difference directional derivative `(F(x + h u) - F(x)) / h`,
/// with `F(x)` and `F(x + h u)` evaluated as one batch.
pub fn forward_directional(f: &Objective, x: &[f64], u: &[f64], h: f64) -> Result<(f64, [f64; 2])> {
    let values = f.eval_generated(2, |k, buf| {
        let s = if k == 0 { 0.0 } else { h };
        buf.extend(x.iter().zip(u).map(|(a, b)| a + s * b));
    })?;
    Ok(((values[1] - values[0]) / h, [values[0], values[1]]))
}

struct Iterate {
    x_new: Vec<f64>,
    best_value: f64,
    best_point: Vec<f64>,
}

fn run<S>(f: &Objective, x0: &[f64], cfg: &BaselineConfig, mut step: S) -> Result<MinimizeResult>
where
    S: FnMut(&[f64], &mut ChaCha8Rng) -> Result<Iterate>,
{
    cfg.validate()?;
    if x0.len() != f.dim() || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial point must be finite and match the objective"));
    }
    let cost = cfg.iteration_cost(x0.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f0 = f.eval(x0)?;
    let mut evals = 1u64;
    let mut x = x0.to_vec();
    let (mut f_best, mut x_best) = (f0, x0.to_vec());
    let mut trace = Trace::new();
    trace.push(TraceRow {
        iteration: 0,
        evals,
        f_current: f0,
        f_best,
        sigma: cfg.sigma_or_h,
        step: 0.0,
    });

    let mut t = 0;
    let termination = loop {
        if t >= cfg.max_iterations {
            break Termination::MaxIterations;
        }
        if evals.saturating_add(cost) > cfg.budget {
            break Termination::BudgetExhausted;
        }
        let it = match step(&x, &mut rng) {
            Ok(it) => it,
            Err(e @ Error::Evaluation { .. }) => break Termination::EvaluationFailed(e.to_string()),
            Err(e) => return Err(e),
        };
        evals += cost;
        t += 1;
        if it.best_value < f_best {
            f_best = it.best_value;
            x_best = it.best_point;
        }
        let moved: Vec<f64> = it.x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        x = it.x_new;
        trace.push(TraceRow {
            iteration: t,
            evals,
            f_current: it.best_value,
            f_best,
            sigma: cfg.sigma_or_h,
            step: norm(&moved),
        });
    };
    Ok(MinimizeResult {
        x_best,
        f_best,
        x_final: x,
        evals,
        trace,
        termination,
    })
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = k;
        }
    }
    best
}

fn descend(x: &[f64], lr: f64, g: &[f64]) -> Vec<f64> {
    x.iter().zip(g).map(|(a, b)| a - lr * b).collect()
}

/// ES with a big population: `x <- x - lr * gs_mc_gradient(x)`.
pub fn es_bpop_minimize(f: &Objective, x0: &[f64], cfg: &BaselineConfig) -> Result<MinimizeResult> {
    let n = cfg.population_for(x0.len());
    let sigma = cfg.sigma_or_h;
    run(f, x0, cfg, |x, rng| {
        let g = gs_mc_gradient(f, x, sigma, n, cfg.antithetic, rng)?;
        let k = argmin(&g.values);
        Ok(Iterate {
            x_new: descend(x, cfg.learning_rate, &g.vector),
            best_value: g.values[k],
            best_point: g.sample_point(x, sigma, k),
        })
    })
}

/// Nesterov–Spokoiny random search with a forward-difference oracle:
/// `x <- x - lr * F'(x, u) u`, `u ~ N(0, I)`.
pub fn nesterov_minimize(f: &Objective, x0: &[f64], cfg: &BaselineConfig) -> Result<MinimizeResult> {
    let h = cfg.sigma_or_h;
    run(f, x0, cfg, |x, rng| {
        let u: Vec<f64> = (0..x.len()).map(|_| rng.sample(StandardNormal)).collect();
        let (slope, [at_x, at_probe]) = forward_directional(f, x, &u, h)?;
        let x_new: Vec<f64> = descend(x, cfg.learning_rate * slope, &u);
        let (best_value, best_point) = if at_probe < at_x {
            (at_probe, x.iter().zip(&u).map(|(a, b)| a + h * b).collect())
        } else {
            (at_x, x.to_vec())
        };
        Ok(Iterate {
            x_new,
            best_value,
            best_point,
        })
    })
}

/// Gradient descent on central finite differences.
pub fn fd_minimize(f: &Objective, x0: &[f64], cfg: &BaselineConfig) -> Result<MinimizeResult> {
    let h = cfg.sigma_or_h;
    run(f, x0, cfg, |x, _| {
        let (g, values) = fd_gradient(f, x, h)?;
        let k = argmin(&values);
        let mut best_point = x.to_vec();
        best_point[k / 2] += if k.is_multiple_of(2) { h } else { -h };
        Ok(Iterate {
            x_new: descend(x, cfg.learning_rate, &g),
            best_value: values[k],
            best_point,
        })
    })
}

pub fn baseline_minimize(f: &Objective, x0: &[f64], cfg: &BaselineConfig) -> Result<MinimizeResult> {
    match cfg.method {
        BaselineMethod::EsBpop => es_bpop_minimize(f, x0, cfg),
        BaselineMethod::Nesterov => nesterov_minimize(f, x0, cfg),
        BaselineMethod::Fd => fd_minimize(f, x0, cfg),
    }
}
