use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ldpopt_core::ldp::randomized_response;
use ldpopt_core::sim::{run_protocol, ProtocolConfig};
use ldpopt_core::Distribution;

fn bench_run_protocol(c: &mut Criterion) {
    let cfg = ProtocolConfig {
        p: Distribution::bernoulli(0.2).unwrap(),
        q: Distribution::bernoulli(0.8).unwrap(),
        channel: randomized_response(2, 1.0).unwrap(),
        n: 64,
        trials: 2_000,
        seed: 7,
    };
    c.bench_function("run_protocol n=64 trials=2000", |b| {
        b.iter(|| run_protocol(black_box(&cfg)).unwrap())
    });
}

criterion_group!(benches, bench_run_protocol);
criterion_main!(benches);
