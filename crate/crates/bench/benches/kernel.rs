use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use stp_bench::{benchmark, golden};
use stp_core::kernel::DEFAULT_STEP_BUDGET;
use stp_core::Kernel;

fn verify(c: &mut Criterion) {
    let kernel = Kernel::standard();
    let pairs = golden(kernel);
    c.bench_function("verify_golden_50", |b| {
        b.iter(|| pairs.iter().filter(|(s, p)| kernel.verify(black_box(s), black_box(p), DEFAULT_STEP_BUDGET).is_verified()).count())
    });
    let texts: Vec<String> = pairs.iter().map(|(_, p)| p.canonical_text()).collect();
    c.bench_function("parse_proofs_50", |b| b.iter(|| texts.iter().filter(|t| kernel.parse_proof(black_box(t)).is_ok()).count()));
}

fn oracle(c: &mut Criterion) {
    let kernel = Kernel::standard();
    let bench = benchmark(kernel);
    let easy: Vec<_> = bench.dataset.iter().filter(|(_, steps)| *steps <= 2).take(20).map(|(s, _)| s.clone()).collect();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    for depth in [2, 3] {
        g.bench_function(format!("depth_{depth}_x20"), |b| {
            b.iter(|| easy.iter().filter(|s| kernel.brute_force_prove(black_box(s), depth).unwrap().is_some()).count())
        });
    }
    g.finish();
}

criterion_group!(benches, verify, oracle);
criterion_main!(benches);
