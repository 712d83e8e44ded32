//! Derivative-free optimization with adaptive directional Gaussian smoothing.
//!
//! * [`quadrature`]: Gauss–Hermite rules.
//! * [`gradient`]: DGS gradients over an orthonormal frame and the Monte-Carlo
//!   Gaussian-smoothing gradient.
//! * [`optimizer`]: the AdaDGS loop (line search, radius adaptation, random
//!   exploration).
//! * [`baselines`]: ES with a big population, Nesterov random search, and
//!   finite-difference gradient descent.
//! * [`benchmarks`]: rotated and shifted test functions, counted objectives and
//!   an external-process objective.
//! * [`harness`]: multi-trial experiments with CSV/JSON output.
//!
//! Batch evaluations run on rayon when the `parallel` feature is enabled
//! (the default); see [`Execution`].

pub mod baselines;
pub mod benchmarks;
pub mod error;
pub mod gradient;
pub mod harness;
pub mod optimizer;
pub mod parallel;
pub mod quadrature;
pub mod trace;

pub use benchmarks::{Domain, Objective, ObjectiveFn};
pub use error::{Error, Result};
pub use parallel::Execution;
