#![allow(dead_code)]

use std::f64::consts::PI;

use adadgs::{Domain, Objective};
use rand::Rng;
use rand_distr::StandardNormal;

/// `int v^k exp(-v^2) dv` over the real line: zero for odd `k`,
/// `(k-1)!! / 2^(k/2) * sqrt(pi)` for even `k`.
pub fn gaussian_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let mut m = PI.sqrt();
    let mut j = 1;
    while j < k {
        m *= j as f64 / 2.0;
        j += 2;
    }
    m
}

/// Composite Simpson rule on `[-a, a]`.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = 2.0 * a / n as f64;
    let mut s = f(-a) + f(a);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(-a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn objective<F>(d: usize, f: F) -> Objective
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    Objective::from_fn("test", Domain::hypercube(d, -1.0, 1.0).unwrap(), f)
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Random symmetric matrix, row-major.
pub fn symmetric<R: Rng>(rng: &mut R, d: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let v: f64 = rng.sample(StandardNormal);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

pub fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / scale.max(1e-300)
}
