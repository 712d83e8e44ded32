use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimizer::AdaDgsConfig;

/// Named hyper-parameter bundle for the high-dimensional benchmark runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub dim: usize,
    pub trials: usize,
    pub adadgs: AdaDgsConfig,
}

fn benchmark_settings() -> AdaDgsConfig {
    AdaDgsConfig {
        order: 5,
        gamma: 0.0,
        sigma0_widths: 5.0,
        contraction: Some(0.9),
        line_search_points: Some(200),
        ..AdaDgsConfig::default()
    }
}

pub const PRESET_NAMES: [&str; 2] = ["paper-1000d", "paper-scaling"];

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        "paper-1000d" => Ok(Preset {
            name: "paper-1000d",
            description: "1000-D benchmark protocol: M=5, S=200, rho=0.9, sigma0=5*width, gamma=0, 20 trials",
            dim: 1000,
            trials: 20,
            adadgs: benchmark_settings(),
        }),
        "paper-scaling" => Ok(Preset {
            name: "paper-scaling",
            description: "same hyper-parameters as paper-1000d at 2000-D (override --dim for 4000/6000)",
            dim: 2000,
            trials: 20,
            adadgs: benchmark_settings(),
        }),
        other => Err(Error::Config(format!(
            "unknown preset '{other}' (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

pub fn presets() -> Vec<Preset> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("known preset")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::Domain;
    use approx::assert_abs_diff_eq;

    #[test]
    fn benchmark_preset_values() {
        let p = preset("paper-1000d").unwrap();
        assert_eq!(p.adadgs.order, 5);
        assert_eq!(p.adadgs.gamma, 0.0);
        assert_eq!(p.adadgs.sigma0_widths, 5.0);
        assert_eq!(p.adadgs.contraction, Some(0.9));
        assert_eq!(p.adadgs.line_search_points, Some(200));
        assert_eq!(p.trials, 20);

        let dom = Domain::hypercube(p.dim, -32.768, 32.768).unwrap();
        let s = p.adadgs.resolve(&dom).unwrap();
        assert_eq!(s.line_search_points, 200);
        assert_abs_diff_eq!(s.contraction(), 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(s.sigma0, 5.0 * 65.536, epsilon = 1e-9);
        assert_abs_diff_eq!(s.l_max, 65.536 * (1000f64).sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn scaling_preset_shares_hyper_parameters() {
        assert_eq!(preset("paper-scaling").unwrap().adadgs, preset("paper-1000d").unwrap().adadgs);
    }

    #[test]
    fn unknown_preset() {
        assert!(preset("paper-9000d").is_err());
        assert_eq!(presets().len(), 2);
    }
}
