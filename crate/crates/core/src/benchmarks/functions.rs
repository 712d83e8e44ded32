//! The twelve base test functions, written in terms of the transformed
//! variable `z`. Every function is defined on all of R^d.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Minimizing coordinate of Styblinski–Tang: the negative root of
/// `4z^3 - 32z + 5 = 0`.
pub const STYBLINSKI_TANG_ARGMIN: f64 = -2.903_534_027_771_51;

/// Per-coordinate minimum value of Styblinski–Tang at [`STYBLINSKI_TANG_ARGMIN`].
pub const STYBLINSKI_TANG_MIN_PER_DIM: f64 = -39.166_165_703_771_42;

/// Rounded per-coordinate constant commonly quoted for Styblinski–Tang.
pub const STYBLINSKI_TANG_QUOTED_PER_DIM: f64 = -39.166;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseFunction {
    Ackley,
    Alpine,
    Ellipsoidal,
    Quintic,
    Rastrigin,
    Rosenbrock,
    SchafferF7,
    SharpRidge,
    Salomon,
    StyblinskiTang,
    Trigonometric,
    Wavy,
}

/// Global minimum value, either fixed or proportional to the dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Optimum {
    Constant(f64),
    PerDim(f64),
}

impl Optimum {
    pub fn value(self, dim: usize) -> f64 {
        match self {
            Optimum::Constant(v) => v,
            Optimum::PerDim(v) => v * dim as f64,
        }
    }
}

impl fmt::Display for Optimum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Optimum::Constant(v) => write!(f, "{v}"),
            Optimum::PerDim(v) => write!(f, "{v}*d"),
        }
    }
}

impl BaseFunction {
    pub const ALL: [BaseFunction; 12] = [
        BaseFunction::Ackley,
        BaseFunction::Alpine,
        BaseFunction::Ellipsoidal,
        BaseFunction::Quintic,
        BaseFunction::Rastrigin,
        BaseFunction::Rosenbrock,
        BaseFunction::SchafferF7,
        BaseFunction::SharpRidge,
        BaseFunction::Salomon,
        BaseFunction::StyblinskiTang,
        BaseFunction::Trigonometric,
        BaseFunction::Wavy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseFunction::Ackley => "ackley",
            BaseFunction::Alpine => "alpine",
            BaseFunction::Ellipsoidal => "ellipsoidal",
            BaseFunction::Quintic => "quintic",
            BaseFunction::Rastrigin => "rastrigin",
            BaseFunction::Rosenbrock => "rosenbrock",
            BaseFunction::SchafferF7 => "schaffer_f7",
            BaseFunction::SharpRidge => "sharp_ridge",
            BaseFunction::Salomon => "salomon",
            BaseFunction::StyblinskiTang => "styblinski_tang",
            BaseFunction::Trigonometric => "trigonometric",
            BaseFunction::Wavy => "wavy",
        }
    }

    /// Per-coordinate initial search interval.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            BaseFunction::Ackley => (-32.768, 32.768),
            BaseFunction::Alpine => (-10.0, 10.0),
            BaseFunction::Ellipsoidal => (-2.0, 2.0),
            BaseFunction::Quintic => (-10.0, 10.0),
            BaseFunction::Rastrigin => (-5.12, 5.12),
            BaseFunction::Rosenbrock => (-5.0, 10.0),
            BaseFunction::SchafferF7 => (-100.0, 100.0),
            BaseFunction::SharpRidge => (-10.0, 10.0),
            BaseFunction::Salomon => (-100.0, 100.0),
            BaseFunction::StyblinskiTang => (-5.0, 5.0),
            BaseFunction::Trigonometric => (-500.0, 500.0),
            BaseFunction::Wavy => (-PI, PI),
        }
    }

    pub fn optimum(self) -> Optimum {
        match self {
            BaseFunction::StyblinskiTang => Optimum::PerDim(STYBLINSKI_TANG_MIN_PER_DIM),
            BaseFunction::Trigonometric => Optimum::Constant(1.0),
            _ => Optimum::Constant(0.0),
        }
    }

    /// The optimum as conventionally quoted (rounded for Styblinski–Tang).
    pub fn quoted_optimum(self) -> Optimum {
        match self {
            BaseFunction::StyblinskiTang => Optimum::PerDim(STYBLINSKI_TANG_QUOTED_PER_DIM),
            other => other.optimum(),
        }
    }

    /// Coordinate value `c` such that `z = (c, ..., c)` is a global minimizer.
    pub fn minimizer_coordinate(self) -> f64 {
        match self {
            BaseFunction::Quintic => -1.0,
            BaseFunction::Rosenbrock => 1.0,
            BaseFunction::StyblinskiTang => STYBLINSKI_TANG_ARGMIN,
            BaseFunction::Trigonometric => 0.9,
            _ => 0.0,
        }
    }

    pub fn eval(self, z: &[f64]) -> f64 {
        match self {
            BaseFunction::Ackley => ackley(z),
            BaseFunction::Alpine => alpine(z),
            BaseFunction::Ellipsoidal => ellipsoidal(z),
            BaseFunction::Quintic => quintic(z),
            BaseFunction::Rastrigin => rastrigin(z),
            BaseFunction::Rosenbrock => rosenbrock(z),
            BaseFunction::SchafferF7 => schaffer_f7(z),
            BaseFunction::SharpRidge => sharp_ridge(z),
            BaseFunction::Salomon => salomon(z),
            BaseFunction::StyblinskiTang => styblinski_tang(z),
            BaseFunction::Trigonometric => trigonometric(z),
            BaseFunction::Wavy => wavy(z),
        }
    }
}

impl fmt::Display for BaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseFunction::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown benchmark function '{s}'")))
    }
}

/// Evaluates a base function by name.
pub fn eval_base(name: &str, z: &[f64]) -> Result<f64, Error> {
    Ok(name.parse::<BaseFunction>()?.eval(z))
}

fn sum_sq(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

pub fn ackley(z: &[f64]) -> f64 {
    const A: f64 = 20.0;
    const B: f64 = 0.2;
    const C: f64 = 2.0 * PI;
    let d = z.len() as f64;
    let cos_mean = z.iter().map(|v| (C * v).cos()).sum::<f64>() / d;
    -A * (-B * (sum_sq(z) / d).sqrt()).exp() - cos_mean.exp() + A + E
}

pub fn alpine(z: &[f64]) -> f64 {
    z.iter().map(|v| (v * v.sin() + 0.1 * v).abs()).sum()
}

pub fn ellipsoidal(z: &[f64]) -> f64 {
    let d = z.len();
    if d == 1 {
        return z[0] * z[0];
    }
    let denom = (d - 1) as f64;
    z.iter()
        .enumerate()
        .map(|(i, v)| 10f64.powf(6.0 * i as f64 / denom) * v * v)
        .sum()
}

pub fn quintic(z: &[f64]) -> f64 {
    z.iter()
        .map(|&v| {
            let p = ((((v - 3.0) * v + 4.0) * v + 2.0) * v - 10.0) * v - 4.0;
            p.abs()
        })
        .sum()
}

pub fn rastrigin(z: &[f64]) -> f64 {
    10.0 * z.len() as f64
        + z.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

pub fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = w[0] - 1.0;
            100.0 * a * a + b * b
        })
        .sum()
}

pub fn schaffer_f7(z: &[f64]) -> f64 {
    if z.len() < 2 {
        return 0.0;
    }
    let total: f64 = z
        .windows(2)
        .map(|w| {
            let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
            let root = s.sqrt();
            let sine = (50.0 * s.powf(0.2)).sin();
            root + root * sine * sine
        })
        .sum();
    total * total / (z.len() - 1) as f64
}

pub fn sharp_ridge(z: &[f64]) -> f64 {
    z[0] * z[0] + 100.0 * sum_sq(&z[1..]).sqrt()
}

pub fn salomon(z: &[f64]) -> f64 {
    let r = sum_sq(z).sqrt();
    1.0 - (2.0 * PI * r).cos() + 0.1 * r
}

pub fn styblinski_tang(z: &[f64]) -> f64 {
    0.5 * z
        .iter()
        .map(|&v| {
            let v2 = v * v;
            v2 * v2 - 16.0 * v2 + 5.0 * v
        })
        .sum::<f64>()
}

pub fn trigonometric(z: &[f64]) -> f64 {
    1.0 + z
        .iter()
        .map(|&v| {
            let u = (v - 0.9) * (v - 0.9);
            let a = (7.0 * u).sin();
            let b = (14.0 * u).sin();
            8.0 * a * a + 6.0 * b * b + u
        })
        .sum::<f64>()
}

pub fn wavy(z: &[f64]) -> f64 {
    const K: f64 = 10.0;
    let d = z.len() as f64;
    1.0 - z
        .iter()
        .map(|v| (K * v).cos() * (-0.5 * v * v).exp())
        .sum::<f64>()
        / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn names_round_trip_and_are_unique() {
        for f in BaseFunction::ALL {
            assert_eq!(f.name().parse::<BaseFunction>().unwrap(), f);
        }
        assert!("sphere".parse::<BaseFunction>().is_err());
    }

    #[test]
    fn minimizers_attain_the_optimum() {
        for f in BaseFunction::ALL {
            for d in [2, 5, 10, 1000] {
                let z = vec![f.minimizer_coordinate(); d];
                assert_abs_diff_eq!(f.eval(&z), f.optimum().value(d), epsilon = 1e-9 * d as f64);
            }
        }
    }

    #[test]
    fn hand_checked_values() {
        assert_eq!(rastrigin(&[0.0; 7]), 0.0);
        assert_eq!(quintic(&[-1.0, 2.0]), 0.0);
        assert_abs_diff_eq!(alpine(&[1.0; 10]), 9.414_709_848_078_965, epsilon = 1e-12);
        // 100*(1-0)^2 + (0-1)^2
        assert_eq!(rosenbrock(&[0.0, 1.0]), 101.0);
        assert_eq!(sharp_ridge(&[2.0, 3.0, 4.0]), 4.0 + 500.0);
        // ellipsoidal weights run from 1 to 1e6
        assert_abs_diff_eq!(ellipsoidal(&[1.0, 1.0]), 1.0 + 1e6, epsilon = 1e-6);
        assert_abs_diff_eq!(salomon(&[3.0, 4.0]), 1.0 - (10.0 * PI).cos() + 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(wavy(&[0.0, 0.0]), 0.0, epsilon = 0.0);
    }

    #[test]
    fn styblinski_constants_are_consistent() {
        let v = STYBLINSKI_TANG_ARGMIN;
        assert!((4.0 * v * v * v - 32.0 * v + 5.0).abs() < 1e-10);
        assert_abs_diff_eq!(styblinski_tang(&[v]), STYBLINSKI_TANG_MIN_PER_DIM, epsilon = 1e-12);
        assert!((STYBLINSKI_TANG_MIN_PER_DIM - STYBLINSKI_TANG_QUOTED_PER_DIM).abs() < 1e-3);
        // the quoted minimizer -2.903534 rounds to the same optimum
        assert!((styblinski_tang(&[-2.903534]) - STYBLINSKI_TANG_MIN_PER_DIM).abs() < 1e-9);
    }

    #[test]
    fn eval_base_rejects_unknown_names() {
        assert!(eval_base("griewank", &[0.0]).is_err());
        assert_eq!(eval_base("rastrigin", &[0.0, 0.0]).unwrap(), 0.0);
    }
}
