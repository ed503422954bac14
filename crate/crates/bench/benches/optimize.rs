use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ldpopt_core::ldp::{vertex_enumeration, LpFamily};
use ldpopt_core::optimize::{maximize_comm, maximize_private, Objective};
use ldpopt_core::rng::CounterRng;
use ldpopt_core::Distribution;

fn pair(k: usize, seed: u64) -> (Distribution, Distribution) {
    let mut rng = CounterRng::from_seed(seed);
    (
        Distribution::new(rng.simplex(k)).unwrap(),
        Distribution::new(rng.simplex(k)).unwrap(),
    )
}

fn bench_maximize_comm(c: &mut Criterion) {
    let (p, q) = pair(8, 1);
    c.bench_function("maximize_comm k=8 l=3 hellinger", |b| {
        b.iter(|| maximize_comm(black_box(&p), black_box(&q), 3, Objective::HellingerSq).unwrap())
    });
}

fn bench_maximize_private(c: &mut Criterion) {
    let (p, q) = pair(5, 2);
    let f = LpFamily::pure_ldp(5, 2, 1.0).unwrap();
    c.bench_function("maximize_private k=5 l=2 eps=1", |b| {
        b.iter(|| {
            maximize_private(black_box(&p), black_box(&q), &f, Objective::HellingerSq).unwrap()
        })
    });
}

fn bench_vertex_enumeration(c: &mut Criterion) {
    let f = LpFamily::pure_ldp(4, 3, 1.0).unwrap();
    c.bench_function("vertex_enumeration l=3 k=4", |b| {
        b.iter(|| vertex_enumeration(black_box(&f)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_maximize_comm,
    bench_maximize_private,
    bench_vertex_enumeration
);
criterion_main!(benches);
