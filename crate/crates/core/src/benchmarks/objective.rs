use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Execution};

/// Axis-aligned box used as the initial search region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid("domain bounds must be non-empty and of equal length"));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo >= hi)
        {
            return Err(Error::invalid("domain bounds must be finite with lower < upper"));
        }
        Ok(Domain { lower, upper })
    }

    pub fn hypercube(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Largest per-coordinate extent.
    pub fn width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
    }

    /// Euclidean length of the box diagonal.
    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Uniform sample from the box shrunk about its centre by `fraction`
    /// (`fraction = 1` samples the full box).
    pub fn sample<R: Rng + ?Sized>(&self, fraction: f64, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| {
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo) * fraction;
                mid - half + 2.0 * half * rng.random::<f64>()
            })
            .collect()
    }
}

/// The raw function behind an [`Objective`].
pub trait ObjectiveFn: Send + Sync {
    fn evaluate(&self, x: &[f64]) -> Result<f64>;

    /// Whether concurrent calls are allowed. Implementations that serialize
    /// access internally should return `false` so batches run in order.
    fn concurrent(&self) -> bool {
        true
    }
}

impl<F> ObjectiveFn for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self(x))
    }
}

/// A counted black-box loss. Every query made through it is tallied, and
/// non-finite results are reported as evaluation failures.
pub struct Objective {
    label: String,
    domain: Domain,
    func: Arc<dyn ObjectiveFn>,
    evals: AtomicU64,
    execution: Execution,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("evals", &self.evals())
            .field("execution", &self.execution)
            .finish()
    }
}

impl Objective {
    pub fn new(label: impl Into<String>, domain: Domain, func: Arc<dyn ObjectiveFn>) -> Self {
        Objective {
            label: label.into(),
            domain,
            func,
            evals: AtomicU64::new(0),
            execution: Execution::default(),
        }
    }

    pub fn from_fn<F>(label: impl Into<String>, domain: Domain, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, domain, Arc::new(f))
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Cumulative number of queries.
    pub fn evals(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.evals.fetch_add(1, Ordering::Relaxed);
        checked(self.func.evaluate(x), 0)
    }

    pub fn eval_batch(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        for p in points {
            self.check_dim(p)?;
        }
        self.eval_generated(points.len(), |k, buf| buf.extend_from_slice(&points[k]))
    }

    /// Evaluates `n` points produced on demand by `fill(k, buf)`, which writes
    /// point `k` into an empty buffer. Results come back in index order; the
    /// first failing index (in index order) is reported.
    pub fn eval_generated<G>(&self, n: usize, fill: G) -> Result<Vec<f64>>
    where
        G: Fn(usize, &mut Vec<f64>) + Sync + Send,
    {
        let exec = if self.func.concurrent() {
            self.execution
        } else {
            Execution::Sequential
        };
        let dim = self.dim();
        let results = map_indexed(n, exec, |k| {
            let mut buf = Vec::with_capacity(dim);
            fill(k, &mut buf);
            debug_assert_eq!(buf.len(), dim);
            checked(self.func.evaluate(&buf), k)
        });
        self.evals.fetch_add(n as u64, Ordering::Relaxed);
        results.into_iter().collect()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "point has dimension {}, objective '{}' expects {}",
                x.len(),
                self.label,
                self.dim()
            )));
        }
        Ok(())
    }
}

fn checked(value: Result<f64>, index: usize) -> Result<f64> {
    match value {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(Error::Evaluation {
            index,
            message: format!("objective returned non-finite value {v}"),
        }),
        Err(e) => Err(e.at_index(index)),
    }
}
