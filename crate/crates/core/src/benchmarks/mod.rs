//! Benchmark objectives: the twelve test functions under a random rotation and
//! shift, the counted [`Objective`] wrapper, and an external-process adapter.

mod functions;
mod objective;
mod subprocess;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use functions::{
    eval_base, BaseFunction, Optimum, STYBLINSKI_TANG_ARGMIN, STYBLINSKI_TANG_MIN_PER_DIM,
    STYBLINSKI_TANG_QUOTED_PER_DIM,
};
pub use objective::{Domain, Objective, ObjectiveFn};
pub use subprocess::{subprocess_objective, SubprocessCommand};

use crate::error::{Error, Result};
use crate::gradient::Frame;
use crate::optimizer::random_rotation;

/// Fraction of each coordinate interval (about its centre) from which the
/// optimum location is drawn.
pub const OPTIMUM_REGION: f64 = 0.8;

/// A base function evaluated at `z = R (x - c)`.
///
/// The shift `c` is chosen so that `x_opt` maps onto the base function's
/// minimizer `z*`: `c = x_opt - R^T z*`. For functions minimized at the origin
/// this is just `c = x_opt`.
#[derive(Clone, Debug)]
pub struct TransformedBenchmark {
    base: BaseFunction,
    rotation: Option<Frame>,
    shift: Vec<f64>,
    x_opt: Vec<f64>,
}

impl TransformedBenchmark {
    /// `rotation = None` means the identity.
    pub fn new(base: BaseFunction, rotation: Option<Frame>, x_opt: Vec<f64>) -> Result<Self> {
        let d = x_opt.len();
        if d == 0 || x_opt.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("optimum location must be finite and non-empty"));
        }
        if rotation.as_ref().is_some_and(|r| r.dim() != d) {
            return Err(Error::invalid("rotation dimension does not match optimum location"));
        }
        let z_star = vec![base.minimizer_coordinate(); d];
        let back = match &rotation {
            Some(r) => transpose_apply(r, &z_star),
            None => z_star,
        };
        let shift = x_opt.iter().zip(&back).map(|(a, b)| a - b).collect();
        Ok(TransformedBenchmark {
            base,
            rotation,
            shift,
            x_opt,
        })
    }

    /// Identity rotation with zero shift, so that evaluation equals the base
    /// function bit for bit.
    pub fn untransformed(base: BaseFunction, dim: usize) -> Result<Self> {
        Self::new(base, None, vec![base.minimizer_coordinate(); dim])
    }

    pub fn base(&self) -> BaseFunction {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.x_opt.len()
    }

    pub fn rotation(&self) -> Option<&Frame> {
        self.rotation.as_ref()
    }

    pub fn x_opt(&self) -> &[f64] {
        &self.x_opt
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn optimum_value(&self) -> f64 {
        self.base.optimum().value(self.dim())
    }

    pub fn domain(&self) -> Domain {
        let (lo, hi) = self.base.bounds();
        Domain::hypercube(self.dim(), lo, hi).expect("benchmark bounds are valid")
    }

    pub fn to_z(&self, x: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(&self.shift).map(|(a, c)| a - c).collect();
        match &self.rotation {
            Some(r) => r.apply(&y),
            None => y,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.base.eval(&self.to_z(x))
    }

    pub fn into_objective(self) -> Objective {
        let label = self.base.name();
        let domain = self.domain();
        Objective::new(label, domain, Arc::new(self))
    }
}

impl ObjectiveFn for TransformedBenchmark {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval(x))
    }
}

fn transpose_apply(frame: &Frame, z: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; frame.dim()];
    for (zi, row) in z.iter().zip(frame.directions()) {
        for (o, r) in out.iter_mut().zip(row) {
            *o += zi * r;
        }
    }
    out
}

/// Draws a Haar rotation and an optimum location (uniform over the central
/// part of the domain) from `seed` and wraps the named base function.
pub fn make_benchmark(name: &str, dim: usize, seed: u64) -> Result<TransformedBenchmark> {
    let base: BaseFunction = name.parse()?;
    if dim < 2 {
        return Err(Error::invalid(format!("benchmarks need dimension >= 2, got {dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rotation = random_rotation(dim, &mut rng)?;
    let (lo, hi) = base.bounds();
    let x_opt = Domain::hypercube(dim, lo, hi)?.sample(OPTIMUM_REGION, &mut rng);
    TransformedBenchmark::new(base, Some(rotation), x_opt)
}

/// One row of the function registry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionInfo {
    pub name: &'static str,
    pub lower: f64,
    pub upper: f64,
    pub optimum: Optimum,
}

/// The registry of benchmark functions, sorted by name.
pub fn list_functions() -> Vec<FunctionInfo> {
    let mut rows: Vec<FunctionInfo> = BaseFunction::ALL
        .into_iter()
        .map(|f| {
            let (lower, upper) = f.bounds();
            FunctionInfo {
                name: f.name(),
                lower,
                upper,
                optimum: f.quoted_optimum(),
            }
        })
        .collect();
    rows.sort_by_key(|r| r.name);
    rows
}
