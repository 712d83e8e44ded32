use std::time::Duration;

use adadgs::benchmarks::{
    eval_base, list_functions, make_benchmark, subprocess_objective, BaseFunction, SubprocessCommand,
    TransformedBenchmark,
};
use adadgs::optimizer::{adadgs_minimize, AdaDgsConfig, Termination};
use adadgs::{Domain, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn helper() -> SubprocessCommand {
    SubprocessCommand::new(env!("CARGO_BIN_EXE_sphere_process"))
}

fn check_optimum(bench: &TransformedBenchmark) {
    let d = bench.dim() as f64;
    let value = bench.eval(bench.x_opt());
    match bench.base() {
        BaseFunction::StyblinskiTang => assert!((value + 39.166 * d).abs() < 1e-3 * d, "{value}"),
        BaseFunction::Trigonometric => assert!((value - 1.0).abs() < 1e-9, "{value}"),
        other => assert!(value.abs() < 1e-9, "{other}: {value}"),
    }
}

#[test]
fn optima_hold_for_random_transforms() {
    for f in BaseFunction::ALL {
        for d in [10, 100] {
            for seed in 0..10 {
                let b = make_benchmark(f.name(), d, seed).unwrap();
                check_optimum(&b);
                assert!(b.domain().contains(b.x_opt()));
                assert!(b.rotation().unwrap().orthonormality_error() < 1e-10);
            }
        }
    }
}

#[test]
fn optimum_value_does_not_depend_on_rotation() {
    for f in BaseFunction::ALL {
        let values: Vec<f64> = (0..10).map(|s| {
            let b = make_benchmark(f.name(), 10, s).unwrap();
            b.eval(b.x_opt())
        }).collect();
        for v in &values {
            assert!((v - values[0]).abs() < 1e-9 * values[0].abs().max(1.0), "{f}: {values:?}");
        }
    }
}

#[test]
fn styblinski_tang_at_1000d() {
    let b = make_benchmark("styblinski_tang", 1000, 7).unwrap();
    let v = b.eval(b.x_opt());
    assert!((v + 39166.0).abs() < 1.0, "{v}");
}

#[test]
fn identity_transform_is_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for f in BaseFunction::ALL {
        let b = TransformedBenchmark::untransformed(f, 6).unwrap();
        for _ in 0..20 {
            let x = b.domain().sample(1.0, &mut rng);
            if f.minimizer_coordinate() == 0.0 {
                assert_eq!(b.eval(&x).to_bits(), eval_base(f.name(), &x).unwrap().to_bits());
            }
        }
    }
}

#[test]
fn rotation_couples_coordinates() {
    // a separable function satisfies f(a) + f(b) = f(a_1, b_2..) + f(b_1, a_2..)
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for f in [BaseFunction::Rastrigin, BaseFunction::Alpine, BaseFunction::Ellipsoidal] {
        let b = make_benchmark(f.name(), 8, 3).unwrap();
        let dom = b.domain();
        let mut coupled = false;
        for _ in 0..10 {
            let p = dom.sample(1.0, &mut rng);
            let q = dom.sample(1.0, &mut rng);
            let mut p2 = p.clone();
            let mut q2 = q.clone();
            p2[0] = q[0];
            q2[0] = p[0];
            let lhs = b.eval(&p) + b.eval(&q);
            let rhs = b.eval(&p2) + b.eval(&q2);
            coupled |= (lhs - rhs).abs() > 1e-6 * lhs.abs().max(1.0);
        }
        assert!(coupled, "{f} looks separable after rotation");
    }
}

#[test]
fn registry_table() {
    let rows = list_functions();
    assert_eq!(rows.len(), 12);
    let names: Vec<&str> = rows.iter().map(|r| r.name).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    let expected = [
        ("ackley", -32.768, 32.768),
        ("alpine", -10.0, 10.0),
        ("ellipsoidal", -2.0, 2.0),
        ("quintic", -10.0, 10.0),
        ("rastrigin", -5.12, 5.12),
        ("rosenbrock", -5.0, 10.0),
        ("salomon", -100.0, 100.0),
        ("schaffer_f7", -100.0, 100.0),
        ("sharp_ridge", -10.0, 10.0),
        ("styblinski_tang", -5.0, 5.0),
        ("trigonometric", -500.0, 500.0),
        ("wavy", -std::f64::consts::PI, std::f64::consts::PI),
    ];
    for (row, (name, lo, hi)) in rows.iter().zip(expected) {
        assert_eq!((row.name, row.lower, row.upper), (name, lo, hi));
    }
    let st = rows.iter().find(|r| r.name == "styblinski_tang").unwrap();
    assert_eq!(st.optimum.to_string(), "-39.166*d");
}

#[test]
fn subprocess_sphere() {
    let f = subprocess_objective(&helper(), 2).unwrap();
    assert_eq!(f.eval(&[3.0, 4.0]).unwrap(), 25.0);
    let batch = f.eval_batch(&[vec![1.0, 0.0], vec![0.1, 0.2], vec![-2.5, 1e-300]]).unwrap();
    assert_eq!(batch, vec![1.0, 0.1f64 * 0.1 + 0.2 * 0.2, 6.25]);
    assert_eq!(f.evals(), 4);
    assert_eq!(f.domain(), &Domain::hypercube(2, -1.0, 1.0).unwrap());
}

#[test]
fn subprocess_values_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = subprocess_objective(&helper(), 3).unwrap();
    for _ in 0..50 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1e6..1e6) * rng.random::<f64>().powi(8)).collect();
        let expected: f64 = x.iter().map(|v| v * v).sum();
        assert_eq!(f.eval(&x).unwrap().to_bits(), expected.to_bits());
    }
}

#[test]
fn subprocess_garbage_aborts_the_optimizer_cleanly() {
    let f = subprocess_objective(&helper().arg("--garbage"), 2).unwrap();
    let err = f.eval(&[1.0, 1.0]).unwrap_err();
    assert!(err.to_string().contains("abc"), "{err}");

    let f = subprocess_objective(&helper().arg("--exit-after").arg("3"), 2).unwrap();
    let cfg = AdaDgsConfig { budget: 1000, ..AdaDgsConfig::default() };
    let result = adadgs_minimize(&f, &[0.5, 0.5], &cfg).unwrap();
    assert!(matches!(result.termination, Termination::EvaluationFailed(_)));
    assert_eq!(result.trace.len(), 1);
    assert_eq!(result.f_best, 0.5);
}

#[test]
fn subprocess_dimension_mismatch_fails_at_setup() {
    let err = subprocess_objective(&helper().arg("--dim").arg("3"), 2).unwrap_err();
    assert!(matches!(err, Error::Setup(_)), "{err:?}");
}

#[test]
fn subprocess_missing_program_fails_at_setup() {
    let err = subprocess_objective(&SubprocessCommand::new("/nonexistent/objective"), 2).unwrap_err();
    assert!(matches!(err, Error::Setup(_)), "{err:?}");
}

#[test]
fn subprocess_timeout_is_an_evaluation_error() {
    let cmd = helper().arg("--silent").timeout(Duration::from_millis(200));
    let f = subprocess_objective(&cmd, 2).unwrap();
    assert!(matches!(f.eval(&[0.0, 0.0]), Err(Error::Evaluation { .. })));
    assert!(f.eval(&[0.0, 0.0]).is_err());
}
