use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use kappa0::{oracle_kappa0, solve_numeric, solve_symbolic, EnumerationBudget, SolverConfig};
use kappa0_bench::fixtures;

fn numeric(c: &mut Criterion) {
    let mut group = c.benchmark_group("numeric");
    group.sample_size(20);
    for f in fixtures() {
        group.bench_with_input(BenchmarkId::from_parameter(f.name), &f, |b, f| {
            b.iter(|| {
                solve_numeric(
                    black_box(&f.spec),
                    black_box(&f.weights),
                    SolverConfig::default(),
                )
            })
        });
    }
    group.finish();
}

fn symbolic(c: &mut Criterion) {
    let mut group = c.benchmark_group("symbolic");
    group.sample_size(10);
    for f in fixtures() {
        group.bench_with_input(BenchmarkId::from_parameter(f.name), &f, |b, f| {
            b.iter(|| solve_symbolic(black_box(&f.spec), SolverConfig::default()))
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for f in fixtures() {
        for d in [12, 20] {
            group.bench_with_input(BenchmarkId::new(f.name, d), &d, |b, &d| {
                b.iter(|| oracle_kappa0(&f.spec, &f.weights, EnumerationBudget::diameter(d)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, numeric, symbolic, oracle);
criterion_main!(benches);
