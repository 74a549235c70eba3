use coreset_bench::{fixture, projected};
use coreset_bounds::hull::estimate_radius;
use coreset_bounds::{build_projection, compute_constants, run_algorithm1};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn projection(c: &mut Criterion) {
    let mut group = c.benchmark_group("projection");
    for n in [200, 1000] {
        let (losses, _) = fixture(n, 1000, 1, None, 1);
        group.bench_with_input(BenchmarkId::new("gram", n), &losses, |b, losses| {
            b.iter(|| {
                let space = build_projection(losses.clone());
                black_box(space.gram().map(|g| g[[0, 0]]))
            })
        });
    }
    group.finish();
}

fn frank_wolfe(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_algorithm1");
    group.sample_size(20);
    for (n, m) in [(200, 100), (1000, 200), (6000, 100)] {
        let (space, hull) = projected(n, 1000, 2, Some(0.1), 2);
        // Warm the Gram cache so only the iterations are timed.
        black_box(space.gram());
        group.bench_with_input(BenchmarkId::new("near_deterministic", format!("{n}x{m}")), &m, |b, &m| {
            b.iter(|| run_algorithm1(&space, &hull, m).expect("nonzero losses"))
        });
    }
    group.finish();
}

fn radius(c: &mut Criterion) {
    let mut group = c.benchmark_group("radius");
    group.sample_size(20);
    for n in [8, 200] {
        let (space, hull) = projected(n, 500, 1, None, 3);
        group.bench_with_input(BenchmarkId::new("estimate", n), &n, |b, _| {
            b.iter(|| estimate_radius(&space, hull.vertex(0)).expect("nonzero losses"))
        });
    }
    let (space, hull) = projected(200, 500, 3, None, 3);
    group.bench_function("constants_k3", |b| b.iter(|| compute_constants(&space, &hull).expect("nonzero losses")));
    group.finish();
}

criterion_group!(benches, projection, frank_wolfe, radius);
criterion_main!(benches);
