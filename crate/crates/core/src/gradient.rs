//! Directional Gaussian smoothing (DGS) gradients and the Monte-Carlo
//! Gaussian-smoothing gradient used by the ES baseline.
//!
//! For a unit direction `xi`, the smoothed directional derivative of the
//! cross-section `y -> F(x + y xi)` is estimated with a Gauss–Hermite rule as
//!
//! ```text
//! D = 1 / (sqrt(pi) sigma) * sum_m w_m F(x + sqrt(2) sigma v_m xi) sqrt(2) v_m
//! ```
//!
//! and the DGS gradient assembles these over an orthonormal frame:
//! `grad = sum_i D_i xi_i`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::benchmarks::Objective;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

const FRAME_TOLERANCE: f64 = 1e-10;

/// An orthonormal system of `d` directions. Direction `i` is row `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    dim: usize,
    rows: Vec<f64>,
}

impl Frame {
    pub fn identity(dim: usize) -> Self {
        let mut rows = vec![0.0; dim * dim];
        for i in 0..dim {
            rows[i * dim + i] = 1.0;
        }
        Frame { dim, rows }
    }

    /// Builds a frame from a square matrix whose rows are the directions.
    /// Fails unless `M M^T = I` within 1e-10 (max entry).
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let frame = Self::from_matrix_unchecked(m)?;
        let err = frame.orthonormality_error();
        if !(err <= FRAME_TOLERANCE) {
            return Err(Error::invalid(format!(
                "frame is not orthonormal (max |XX^T - I| = {err:e})"
            )));
        }
        Ok(frame)
    }

    pub(crate) fn from_matrix_unchecked(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::invalid("frame matrix must be square and non-empty"));
        }
        let dim = m.nrows();
        let mut rows = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            rows.extend(m.row(i).iter().copied());
        }
        Ok(Frame { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub fn directions(&self) -> impl Iterator<Item = &[f64]> {
        self.rows.chunks_exact(self.dim)
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.rows)
    }

    /// Applies the frame as a matrix: `out_i = <xi_i, y>`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.directions().map(|row| dot(row, y)).collect()
    }

    /// Maximum entry of `|X X^T - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let target = if i == j { 1.0 } else { 0.0 };
                let v = dot(self.direction(i), self.direction(j));
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

/// Dot product with four independent accumulators.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One sample location of the DGS stencil.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilPoint {
    pub direction: usize,
    pub node: usize,
    pub point: Vec<f64>,
}

/// Node indices that are actually sampled for one direction.
fn active_nodes(rule: &QuadratureRule, skip_zero_node: bool) -> Vec<usize> {
    let zero = if skip_zero_node { rule.zero_node() } else { None };
    (0..rule.order()).filter(|&m| Some(m) != zero).collect()
}

fn validate(x: &[f64], frame: &Frame, sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("smoothing radius must be positive and finite, got {sigma}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("point has non-finite coordinates"));
    }
    if frame.dim() != x.len() {
        return Err(Error::invalid(format!(
            "frame dimension {} does not match point dimension {}",
            frame.dim(),
            x.len()
        )));
    }
    Ok(())
}

fn stencil_point(x: &[f64], xi: &[f64], offset: f64, buf: &mut Vec<f64>) {
    buf.extend(x.iter().zip(xi).map(|(a, b)| a + offset * b));
}

/// The DGS sample locations `x + sqrt(2) sigma v_m xi_i`, ordered by direction
/// then ascending node. With `skip_zero_node` the `v_m = 0` sample of an odd
/// rule is omitted.
pub fn dgs_stencil(
    x: &[f64],
    frame: &Frame,
    sigma: f64,
    rule: &QuadratureRule,
    skip_zero_node: bool,
) -> Result<Vec<StencilPoint>> {
    validate(x, frame, sigma)?;
    let nodes = active_nodes(rule, skip_zero_node);
    let mut out = Vec::with_capacity(frame.dim() * nodes.len());
    for (i, xi) in frame.directions().enumerate() {
        for &m in &nodes {
            let mut point = Vec::with_capacity(x.len());
            stencil_point(x, xi, SQRT_2 * sigma * rule.nodes()[m], &mut point);
            out.push(StencilPoint {
                direction: i,
                node: m,
                point,
            });
        }
    }
    Ok(out)
}

/// Gauss–Hermite estimate of the smoothed directional derivative at `y = 0`.
///
/// `values[k]` is the objective at node `k`. For odd rules the zero-node value
/// may be omitted (`values.len() == order - 1`); it carries a zero factor. The
/// zero-node summand is never added, so both layouts give identical bits.
pub fn directional_derivative(values: &[f64], sigma: f64, rule: &QuadratureRule) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("smoothing radius must be positive and finite, got {sigma}")));
    }
    let order = rule.order();
    let zero = rule.zero_node();
    let skipped = match values.len() {
        n if n == order => false,
        n if zero.is_some() && n + 1 == order => true,
        n => {
            return Err(Error::invalid(format!(
                "expected {order} values for a rule of order {order}, got {n}"
            )))
        }
    };
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Evaluation {
            index,
            message: format!("non-finite objective value {}", values[index]),
        });
    }

    let mut sum = 0.0;
    let mut k = 0;
    for m in 0..order {
        if Some(m) == zero {
            if !skipped {
                k += 1;
            }
            continue;
        }
        let coeff = rule.weights()[m] * SQRT_2 * rule.nodes()[m];
        sum += coeff * values[k];
        k += 1;
    }
    Ok(sum / (PI.sqrt() * sigma))
}

/// A DGS gradient together with its per-direction components.
#[derive(Clone, Debug, PartialEq)]
pub struct DgsGradient {
    /// Smoothed directional derivative along each frame direction.
    pub directional: Vec<f64>,
    /// `sum_i directional_i * xi_i` in ambient coordinates.
    pub vector: Vec<f64>,
    pub evals_used: u64,
}

/// Assembles `sum_i c_i xi_i`, accumulating directions in ascending order.
pub fn assemble(frame: &Frame, directional: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; frame.dim()];
    for (c, xi) in directional.iter().zip(frame.directions()) {
        for (o, e) in out.iter_mut().zip(xi) {
            *o += c * e;
        }
    }
    out
}

/// Number of objective queries one DGS gradient costs.
pub fn stencil_size(dim: usize, rule: &QuadratureRule, skip_zero_node: bool) -> u64 {
    (dim * active_nodes(rule, skip_zero_node).len()) as u64
}

/// Evaluates the DGS stencil as one batch and assembles the gradient.
pub fn dgs_gradient(
    f: &Objective,
    x: &[f64],
    frame: &Frame,
    sigma: f64,
    rule: &QuadratureRule,
    skip_zero_node: bool,
) -> Result<DgsGradient> {
    validate(x, frame, sigma)?;
    if f.dim() != x.len() {
        return Err(Error::invalid("objective dimension does not match point"));
    }
    let nodes = active_nodes(rule, skip_zero_node);
    let per_dir = nodes.len();
    let offsets: Vec<f64> = nodes.iter().map(|&m| SQRT_2 * sigma * rule.nodes()[m]).collect();

    let values = f.eval_generated(frame.dim() * per_dir, |k, buf| {
        stencil_point(x, frame.direction(k / per_dir), offsets[k % per_dir], buf)
    })?;

    let directional = values
        .chunks_exact(per_dir)
        .enumerate()
        .map(|(i, chunk)| {
            directional_derivative(chunk, sigma, rule).map_err(|e| e.at_index(i * per_dir))
        })
        .collect::<Result<Vec<_>>>()?;
    let vector = assemble(frame, &directional);
    Ok(DgsGradient {
        directional,
        vector,
        evals_used: values.len() as u64,
    })
}

/// Monte-Carlo Gaussian-smoothing gradient `(1/(n sigma)) sum_k F(x + sigma u_k) u_k`.
///
/// With `antithetic`, `n/2` directions are drawn and each is used as the pair
/// `(u, -u)`, so the estimate is `(1/(n sigma)) sum (F(x+sigma u) - F(x-sigma u)) u`.
/// Returns the gradient and the sampled values (useful for best-so-far tracking).
pub fn gs_mc_gradient<R: Rng + ?Sized>(
    f: &Objective,
    x: &[f64],
    sigma: f64,
    n_samples: usize,
    antithetic: bool,
    rng: &mut R,
) -> Result<McGradient> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("smoothing radius must be positive and finite, got {sigma}")));
    }
    if n_samples == 0 || (antithetic && !n_samples.is_multiple_of(2)) {
        return Err(Error::invalid(format!(
            "sample count must be positive (and even when antithetic), got {n_samples}"
        )));
    }
    if f.dim() != x.len() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("point must be finite and match the objective dimension"));
    }
    let d = x.len();
    let draws = if antithetic { n_samples / 2 } else { n_samples };
    let directions: Vec<f64> = (0..draws * d).map(|_| rng.sample(StandardNormal)).collect();

    // antithetic layout: [x + s u_0, x - s u_0, x + s u_1, ...]
    let values = f.eval_generated(n_samples, |k, buf| {
        let (j, sign) = if antithetic {
            (k / 2, if k.is_multiple_of(2) { 1.0 } else { -1.0 })
        } else {
            (k, 1.0)
        };
        let u = &directions[j * d..(j + 1) * d];
        buf.extend(x.iter().zip(u).map(|(a, b)| a + sign * sigma * b));
    })?;

    let mut grad = vec![0.0; d];
    for j in 0..draws {
        let u = &directions[j * d..(j + 1) * d];
        let weight = if antithetic {
            values[2 * j] - values[2 * j + 1]
        } else {
            values[j]
        };
        for (g, ui) in grad.iter_mut().zip(u) {
            *g += weight * ui;
        }
    }
    let scale = 1.0 / (n_samples as f64 * sigma);
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok(McGradient {
        vector: grad,
        values,
        directions,
        antithetic,
    })
}

/// Result of [`gs_mc_gradient`], including the raw samples.
#[derive(Clone, Debug, PartialEq)]
pub struct McGradient {
    pub vector: Vec<f64>,
    /// Objective value of each sample, in evaluation order.
    pub values: Vec<f64>,
    directions: Vec<f64>,
    antithetic: bool,
}

impl McGradient {
    /// Location of sample `k` around the centre `x` used to compute this gradient.
    pub fn sample_point(&self, x: &[f64], sigma: f64, k: usize) -> Vec<f64> {
        let d = x.len();
        let (j, sign) = if self.antithetic {
            (k / 2, if k.is_multiple_of(2) { 1.0 } else { -1.0 })
        } else {
            (k, 1.0)
        };
        let u = &self.directions[j * d..(j + 1) * d];
        x.iter().zip(u).map(|(a, b)| a + sign * sigma * b).collect()
    }
}
