//! Gauss–Hermite rules for the weight `exp(-v^2)` on the real line.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 64;

const NEWTON_STEPS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in ascending order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the exact-zero middle node, present for odd orders.
    pub fn zero_node(&self) -> Option<usize> {
        let m = self.order();
        (m % 2 == 1).then_some(m / 2)
    }

    /// `sum_m w_m f(v_m)`, accumulated in ascending node order.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(0.0, |acc, (&v, &w)| acc + w * f(v))
    }
}

/// Physicists' Gauss–Hermite rule of order `order` (1..=64).
///
/// Nodes come from the eigenvalues of the symmetric tridiagonal Jacobi matrix
/// (Golub–Welsch), are polished with a few Newton steps on the orthonormal
/// Hermite polynomial, and the weights are taken from the Christoffel function
/// `1 / sum_k p_k(v)^2`. The result is symmetrized so that mirrored nodes and
/// weights agree exactly and the middle node of an odd rule is exactly zero.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::invalid(format!(
            "Gauss-Hermite order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }

    let jacobi = DMatrix::from_fn(order, order, |r, c| {
        if r.abs_diff(c) == 1 {
            off_diagonal(r.max(c))
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    for v in nodes.iter_mut() {
        for _ in 0..NEWTON_STEPS {
            let (p, p_prev, _) = orthonormal_hermite(order, *v);
            let dp = (2.0 * order as f64).sqrt() * p_prev;
            if dp == 0.0 {
                break;
            }
            *v -= p / dp;
        }
    }

    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&v| 1.0 / orthonormal_hermite(order, v).2)
        .collect();

    for lo in 0..order / 2 {
        let hi = order - 1 - lo;
        let v = 0.5 * (nodes[hi] - nodes[lo]);
        let w = 0.5 * (weights[hi] + weights[lo]);
        nodes[lo] = -v;
        nodes[hi] = v;
        weights[lo] = w;
        weights[hi] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }

    Ok(QuadratureRule { nodes, weights })
}

// Off-diagonal entry b_k = sqrt(k/2) of the Hermite Jacobi matrix.
fn off_diagonal(k: usize) -> f64 {
    (0.5 * k as f64).sqrt()
}

/// Returns `(p_n(x), p_{n-1}(x), sum_{k<n} p_k(x)^2)` for the Hermite
/// polynomials orthonormal under `exp(-x^2)`.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += cur * cur;
        let next = (x * cur - off_diagonal(k) * prev) / off_diagonal(k + 1);
        prev = cur;
        cur = next;
    }
    (cur, prev, sum_sq)
}
