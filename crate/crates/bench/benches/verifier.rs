use std::hint::black_box;

use bimeans_core::{catalog, falsify, lookup, margin, Interval, Point, SearchBox, VerifierConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn margins(c: &mut Criterion) {
    let mut g = c.benchmark_group("margin");
    for spec in catalog() {
        let point = Point::with_params(0.5, 3.0, spec.endpoint);
        g.bench_function(&spec.id, |b| b.iter(|| margin(spec, black_box(&point))));
    }
    g.finish();
}

fn falsifier(c: &mut Criterion) {
    let range = Interval::new(1e-3, 1e3).unwrap();
    let mut g = c.benchmark_group("falsify");
    g.sample_size(10);
    for id in ["INEQ_2_3", "INEQ_1_3"] {
        let spec = lookup(id).unwrap();
        let bx = SearchBox::for_spec(spec, range, range).unwrap();
        for threads in [1, 4] {
            let cfg = VerifierConfig {
                seed: 42,
                n_random: 2_000,
                threads,
                ..VerifierConfig::default()
            };
            g.bench_function(format!("{id}/threads={threads}"), |b| {
                b.iter(|| falsify(spec, &bx, &cfg).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, margins, falsifier);
criterion_main!(benches);
