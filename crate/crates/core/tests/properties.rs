mod common;

use std::f64::consts::PI;
use std::io::Cursor;

use adadgs::benchmarks::{make_benchmark, BaseFunction};
use adadgs::gradient::{dgs_gradient, gs_mc_gradient, Frame};
use adadgs::optimizer::{candidate_distances, line_search, random_rotation, sigma_update, MIN_SIGMA};
use adadgs::quadrature::{gauss_hermite_rule, MAX_ORDER};
use adadgs::harness::{Trace, TraceRow};
use common::objective;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn finite() -> impl Strategy<Value = f64> {
    -1e3..1e3f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rules_are_symmetric_with_positive_weights(m in 1..=MAX_ORDER) {
        let rule = gauss_hermite_rule(m).unwrap();
        let n = rule.nodes();
        for k in 0..m {
            prop_assert_eq!(n[k], -n[m - 1 - k]);
            prop_assert_eq!(rule.weights()[k], rule.weights()[m - 1 - k]);
            prop_assert!(rule.weights()[k] > 0.0);
        }
        prop_assert!(n.windows(2).all(|w| w[0] < w[1]));
        let total: f64 = rule.weights().iter().sum();
        prop_assert!((total - PI.sqrt()).abs() < 1e-12);
        prop_assert_eq!(rule.zero_node().is_some(), m % 2 == 1);
    }

    #[test]
    fn sigma_update_stays_positive_and_between(sigma in 1e-300..1e6f64, step in 0.0..1e6f64) {
        let s = sigma_update(sigma, step);
        prop_assert!(s >= MIN_SIGMA);
        prop_assert!(s <= sigma.max(step));
        prop_assert!(s >= 0.5 * sigma.min(step).max(sigma));
    }

    #[test]
    fn line_search_never_worsens(
        x in prop::collection::vec(finite(), 1..6),
        seed in any::<u64>(),
        l_max in 0.1..100.0f64,
        ratio in 1e-4..0.9f64,
        points in 2usize..40,
    ) {
        let d = x.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::gaussian_vec(&mut rng, d);
        let f = objective(d, |p: &[f64]| p.iter().map(|v| v * v + 10.0 * (v * 2.0).cos()).sum());
        let eval = |p: &[f64]| p.iter().map(|v| v * v + 10.0 * (v * 2.0).cos()).sum::<f64>();
        let f_x = eval(&x);
        let l_min = l_max * ratio;
        let out = line_search(&f, &x, f_x, &g, l_max, l_min, points).unwrap();
        prop_assert!(out.f_new <= f_x);
        prop_assert_eq!(eval(&out.x_new), out.f_new);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        for dist in candidate_distances(l_max, l_min, points) {
            let p: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - dist * (b / norm)).collect();
            prop_assert!(out.f_new <= eval(&p));
        }
        prop_assert!(out.step_distance == 0.0 || (l_min..=l_max).contains(&out.step_distance));
    }

    #[test]
    fn rotations_are_orthonormal(d in 1usize..40, seed in any::<u64>()) {
        let frame = random_rotation(d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(frame.orthonormality_error() < 1e-10);
        prop_assert!(Frame::from_matrix(&frame.to_matrix()).is_ok());
    }

    #[test]
    fn antithetic_estimates_vanish_on_constants(c in finite(), seed in any::<u64>(), pairs in 1usize..20) {
        let f = objective(3, move |_: &[f64]| c);
        let g = gs_mc_gradient(&f, &[0.1, 0.2, 0.3], 0.5, 2 * pairs, true, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(g.vector.iter().all(|v| *v == 0.0));
        prop_assert_eq!(f.evals(), 2 * pairs as u64);
    }

    #[test]
    fn dgs_is_exact_on_linear_functions(
        c in prop::collection::vec(finite(), 1..8),
        sigma in 1e-3..1e3f64,
        m in 2usize..10,
        seed in any::<u64>(),
    ) {
        let d = c.len();
        let cc = c.clone();
        let f = objective(d, move |x: &[f64]| x.iter().zip(&cc).map(|(a, b)| a * b).sum());
        let frame = random_rotation(d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let g = dgs_gradient(&f, &vec![0.25; d], &frame, sigma, &gauss_hermite_rule(m).unwrap(), true).unwrap();
        let scale = c.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        for (a, b) in g.vector.iter().zip(&c) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn trace_csv_round_trips(rows in prop::collection::vec((any::<f64>(), 0.0..1e9f64, 1e-300..1e3f64, 0.0..1e3f64), 1..20), trial in 0usize..100) {
        let mut trace = Trace::new();
        let mut best = f64::INFINITY;
        for (i, (f, _, sigma, step)) in rows.iter().enumerate() {
            let f = if f.is_finite() { *f } else { 0.0 };
            best = best.min(f);
            trace.push(TraceRow { iteration: i, evals: 1 + 7 * i as u64, f_current: f, f_best: best, sigma: *sigma, step: *step });
        }
        let mut buf = Vec::new();
        trace.write_csv(trial, &mut buf).unwrap();
        let (t, back) = Trace::read_csv(Cursor::new(buf)).unwrap();
        prop_assert_eq!(t, trial);
        prop_assert_eq!(back, trace);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn benchmark_optimum_is_transform_independent(f in 0..BaseFunction::ALL.len(), d in 2usize..20, seed in any::<u64>()) {
        let base = BaseFunction::ALL[f];
        let b = make_benchmark(base.name(), d, seed).unwrap();
        let v = b.eval(b.x_opt());
        let expected = base.optimum().value(d);
        prop_assert!((v - expected).abs() <= 1e-9 * expected.abs().max(1.0), "{} {} {}", base, v, expected);
        prop_assert!(b.domain().contains(b.x_opt()));
    }
}

#[test]
fn haar_sign_correction_centres_the_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 100_000;
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..n {
        let q = random_rotation(3, &mut rng).unwrap().direction(0)[0];
        sum += q;
        sq += q * q;
    }
    let mean = sum / n as f64;
    let second = sq / n as f64;
    // entry variance is 1/3, so 4 standard errors of the mean is about 0.0073
    assert!(mean.abs() < 4.0 * (1.0f64 / 3.0).sqrt() / (n as f64).sqrt(), "{mean}");
    assert!((second - 1.0 / 3.0).abs() < 0.01, "{second}");
}

#[test]
fn haar_entry_mean_in_high_dimension() {
    let d = 200;
    let draws = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut sum = 0.0;
    for _ in 0..draws {
        sum += random_rotation(d, &mut rng).unwrap().direction(0)[0];
    }
    let mean = sum / draws as f64;
    let bound = 4.0 / (d as f64).sqrt() / (draws as f64).sqrt();
    assert!(mean.abs() < bound, "{mean} vs {bound}");
}

#[test]
fn learning_rate_radius_is_not_scale_free() {
    use adadgs::optimizer::{adadgs_minimize, AdaDgsConfig, RadiusUpdate};
    let cfg = AdaDgsConfig { gamma: 0.0, budget: 400, radius_update: RadiusUpdate::LearningRate, ..AdaDgsConfig::default() };
    let f1 = objective(3, |x: &[f64]| x.iter().map(|v| v * v).sum());
    let f2 = objective(3, |x: &[f64]| 4.0 * x.iter().map(|v| v * v).sum::<f64>());
    let r1 = adadgs_minimize(&f1, &[0.3, -0.2, 0.1], &cfg).unwrap();
    let r2 = adadgs_minimize(&f2, &[0.3, -0.2, 0.1], &cfg).unwrap();
    assert_ne!(r1.trace.rows()[1].sigma, r2.trace.rows()[1].sigma);
    let cfg = AdaDgsConfig { radius_update: RadiusUpdate::Distance, ..cfg };
    let r1 = adadgs_minimize(&f1, &[0.3, -0.2, 0.1], &cfg).unwrap();
    let r2 = adadgs_minimize(&f2, &[0.3, -0.2, 0.1], &cfg).unwrap();
    assert_eq!(r1.x_final, r2.x_final);
}
