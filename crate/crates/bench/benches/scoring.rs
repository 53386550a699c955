use compsel_bench::random_table;
use compsel_core::fixtures::{self, ENTROPY_CODERS, TEXT_COMPRESSORS};
use compsel_core::score::{component_scores, evaluate_all};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn published(c: &mut Criterion) {
    let t2 = fixtures::table(ENTROPY_CODERS, "table 2");
    let t5 = fixtures::table(TEXT_COMPRESSORS, "table 5");
    c.bench_function("evaluate_all/entropy", |b| {
        b.iter(|| evaluate_all(black_box(&t2)).unwrap())
    });
    c.bench_function("evaluate_all/text", |b| {
        b.iter(|| evaluate_all(black_box(&t5)).unwrap())
    });
}

fn scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("component_scores");
    for m in [2, 10, 100, 1000] {
        let t = random_table(m, 7);
        group.bench_with_input(BenchmarkId::from_parameter(m), &t, |b, t| {
            b.iter(|| component_scores(black_box(t)))
        });
    }
    group.finish();
}

criterion_group!(benches, published, scaling);
criterion_main!(benches);
