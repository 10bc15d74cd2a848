use std::hint::black_box;

use bimeans_core::extended::extended_eval;
use bimeans_core::means::{eval_mean, MeanKind, Order, PositivePair};
use criterion::{criterion_group, criterion_main, Criterion};

fn kinds() -> Vec<MeanKind> {
    vec![
        MeanKind::ARITHMETIC,
        MeanKind::GEOMETRIC,
        MeanKind::PowerMean(Order::new(2.0 / 3.0).unwrap()),
        MeanKind::PowerMean(Order::new(-7.5).unwrap()),
        MeanKind::Heronian,
        MeanKind::Identric,
        MeanKind::SMean,
        MeanKind::UnnormalizedPower(Order::new(0.3).unwrap()),
    ]
}

fn double(c: &mut Criterion) {
    let p = PositivePair::new(0.37, 12.5).unwrap();
    let mut g = c.benchmark_group("eval_mean");
    for kind in kinds() {
        g.bench_function(kind.label(), |b| {
            b.iter(|| eval_mean(black_box(kind), black_box(p)))
        });
    }
    g.finish();
}

fn extended(c: &mut Criterion) {
    let p = PositivePair::new(0.37, 12.5).unwrap();
    let mut g = c.benchmark_group("extended_eval");
    for kind in kinds() {
        g.bench_function(kind.label(), |b| {
            b.iter(|| extended_eval(black_box(kind), black_box(p)))
        });
    }
    g.finish();
}

criterion_group!(benches, double, extended);
criterion_main!(benches);
