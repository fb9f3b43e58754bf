use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use nonloc_core::channel::QubitChannel;
use nonloc_core::nonlocality::classify;
use nonloc_core::sweep::{Sweep, SweepRequest};
use nonloc_core::Execution;
use std::hint::black_box;

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_classify(c: &mut Criterion) {
    let ch = QubitChannel::diagonal([0.3, -0.2, 0.5], 0.1).unwrap();
    c.bench_function("classify", |b| b.iter(|| classify(black_box(&ch)).unwrap()));
}

fn bench_rows(c: &mut Criterion) {
    let mut group = c.benchmark_group("cube3d_rows");
    group.sample_size(10);
    for res in [21, 41] {
        let sweep = Sweep::new(&SweepRequest::cube3d(0.25, res)).unwrap();
        group.throughput(Throughput::Elements(sweep.len() as u64));
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, res), &sweep, |b, s| b.iter(|| s.rows(exec).unwrap()));
        }
    }
    group.finish();
}

fn bench_summary(c: &mut Criterion) {
    let mut group = c.benchmark_group("pc2d_summary");
    group.sample_size(10);
    let sweep = Sweep::new(&SweepRequest::phase_covariant_2d(0.0, 201)).unwrap();
    group.throughput(Throughput::Elements(sweep.len() as u64));
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| sweep.summary(exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_classify, bench_rows, bench_summary);
criterion_main!(benches);
