use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use fibnormal_bench::STREAM_TERMS;
use fibnormal_core::diagnostics::per_term_deltas;
use fibnormal_core::{
    digit_length_predicted, digit_string, fib_pair, stream_analyze, CheckpointPolicy,
    StreamConfig,
};
use std::hint::black_box;

fn stream(c: &mut Criterion) {
    let mut g = c.benchmark_group("stream");
    g.sample_size(10);
    for (base, k_max, positional) in [(10, 1, false), (10, 4, false), (10, 4, true), (2, 4, false)] {
        for n in STREAM_TERMS {
            let digits: u64 = 1 + (2..=n).map(|i| digit_length_predicted(i, base).unwrap()).sum::<u64>();
            g.throughput(Throughput::Elements(digits));
            let id = format!("b{base}-k{k_max}{}", if positional { "-pos" } else { "" });
            g.bench_with_input(BenchmarkId::new(id, n), &n, |bch, &n| {
                bch.iter(|| {
                    let cfg = StreamConfig::new(base, k_max, positional).unwrap();
                    stream_analyze(cfg, n, &CheckpointPolicy::none()).unwrap()
                })
            });
        }
    }
    g.finish();
}

fn conversion(c: &mut Criterion) {
    let mut g = c.benchmark_group("digit_string");
    g.sample_size(10);
    for n in [10_000u64, 100_000, 1_000_000] {
        let f = fib_pair(n).unwrap().f_n;
        g.bench_with_input(BenchmarkId::new("base10", n), &f, |b, f| {
            b.iter(|| digit_string(black_box(f), 10).unwrap())
        });
    }
    g.finish();
}

fn fibonacci(c: &mut Criterion) {
    let mut g = c.benchmark_group("fib_pair");
    for n in [1_000u64, 100_000, 1_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| fib_pair(black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn per_term(c: &mut Criterion) {
    let mut g = c.benchmark_group("per_term_deltas");
    g.sample_size(10);
    for k in [1usize, 2] {
        g.bench_with_input(BenchmarkId::new("base10-n5000", k), &k, |b, &k| {
            b.iter(|| per_term_deltas(10, 1, 5_000, k).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, stream, conversion, fibonacci, per_term);
criterion_main!(benches);
