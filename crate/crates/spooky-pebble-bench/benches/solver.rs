//! Benchmarks for encoding, bounded search, and strategy optimization.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use spooky_pebble::dag::{line_graph, random_dag};
use spooky_pebble::encode::Encoding;
use spooky_pebble::optimize::{optimize_fixpoint, sequentialize};
use spooky_pebble::solve::{solve_spooky, SolveLimits};

fn bench_encode(c: &mut Criterion) {
    let mut group = c.benchmark_group("encode_unroll");
    for n in [8usize, 16, 32] {
        let dag = random_dag(n, 0.3, 7).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &dag, |b, dag| {
            b.iter(|| {
                let mut enc = Encoding::new(dag, n, n);
                for _ in 0..10 {
                    enc.unroll();
                }
                std::hint::black_box(enc.n_clauses())
            });
        });
    }
    group.finish();
}

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_line");
    group.sample_size(10);
    for n in [6usize, 9, 12] {
        let dag = line_graph(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &dag, |b, dag| {
            b.iter(|| {
                let limits = SolveLimits::default();
                std::hint::black_box(solve_spooky(dag, 3, n, &limits))
            });
        });
    }
    group.finish();
}

fn bench_optimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize_fixpoint");
    group.sample_size(10);
    for n in [8usize, 12] {
        let dag = random_dag(n, 0.3, 11).unwrap();
        let limits = SolveLimits::default();
        let outcome = solve_spooky(&dag, n, n, &limits);
        let strat = sequentialize(&dag, &outcome.trace.unwrap(), n, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &(), |b, _| {
            b.iter(|| std::hint::black_box(optimize_fixpoint(&dag, &strat, n, 42)));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_encode, bench_solve, bench_optimize);
criterion_main!(benches);
