use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flipbound::bounds::gaussian_width_mc_with;
use flipbound::par::Exec;
use flipbound::projection::{mc_flip_rate_with, vector_pair_at_angle, ProjectionSpec};
use flipbound::Matrix;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn flip_rate(c: &mut Criterion) {
    let (h, u) = vector_pair_at_angle(50, 0.3).unwrap();
    let spec = ProjectionSpec::gaussian(10, 50, 7);
    let mut g = c.benchmark_group("mc_flip_rate");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::new(name, 40_000), &exec, |b, &exec| {
            b.iter(|| mc_flip_rate_with(exec, &h, &u, &spec, 40_000).unwrap())
        });
    }
    g.finish();
}

fn width(c: &mut Criterion) {
    let rows: Vec<Vec<f64>> = (0..200)
        .map(|i| (0..30).map(|j| ((i * 31 + j * 17) % 13) as f64 - 6.0).collect())
        .collect();
    let pts = Matrix::from_rows(&rows).unwrap();
    let mut g = c.benchmark_group("gaussian_width_mc");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::new(name, 20_000), &exec, |b, &exec| {
            b.iter(|| gaussian_width_mc_with(exec, &pts, 20_000, 3).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, flip_rate, width);
criterion_main!(benches);
