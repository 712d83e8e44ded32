use adadgs::benchmarks::make_benchmark;
use adadgs::gradient::{dgs_gradient, Frame};
use adadgs::optimizer::random_rotation;
use adadgs::quadrature::gauss_hermite_rule;
use adadgs::{Domain, Execution};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn stencil(c: &mut Criterion) {
    let mut group = c.benchmark_group("dgs_gradient");
    group.sample_size(10);
    let rule = gauss_hermite_rule(5).unwrap();
    for dim in [50, 200] {
        let bench = make_benchmark("ackley", dim, 1).unwrap();
        let domain: Domain = bench.domain();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = domain.sample(1.0, &mut rng);
        let frame: Frame = random_rotation(dim, &mut rng).unwrap();
        for mode in MODES {
            let f = bench.clone().into_objective().with_execution(mode);
            group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), dim), &dim, |b, _| {
                b.iter(|| dgs_gradient(&f, &x, &frame, 1.0, &rule, true).unwrap())
            });
        }
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval_batch");
    group.sample_size(10);
    let dim = 200;
    let bench = make_benchmark("rastrigin", dim, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let points: Vec<Vec<f64>> = (0..256).map(|_| bench.domain().sample(1.0, &mut rng)).collect();
    for mode in MODES {
        let f = bench.clone().into_objective().with_execution(mode);
        group.bench_function(BenchmarkId::new(format!("{mode:?}"), points.len()), |b| {
            b.iter(|| f.eval_batch(&points).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, stencil, batch);
criterion_main!(benches);
