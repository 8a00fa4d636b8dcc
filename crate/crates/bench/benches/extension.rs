use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use frax_core::carleson::{condition_vi, BallSearch, CapacityParams};
use frax_core::field::{Component, ExtensionPlan};
use frax_core::kernel::LaguerreRule;
use frax_core::verify::Verifier;

fn extension(c: &mut Criterion) {
    let rule = LaguerreRule::shared();
    let mut group = c.benchmark_group("extension_field");
    group.sample_size(10);
    for (n, points) in [(1, 256), (1, 1024), (2, 64)] {
        let f = frax_bench::gaussian(n, 16.0, points);
        let prm = frax_bench::params(n, 0.8);
        let plan = ExtensionPlan::new(&f, &prm, rule).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("n{n}"), points), &plan, |b, plan| {
            b.iter(|| plan.field(black_box(Component::Value)).unwrap())
        });
    }
    group.finish();
}

fn identity(c: &mut Criterion) {
    let f = frax_bench::gaussian(1, 16.0, 256);
    let prm = frax_bench::params(1, 0.8);
    let verifier = Verifier::default();
    let mut group = c.benchmark_group("identity");
    group.sample_size(10);
    group.bench_function("dt/n1/N256", |b| b.iter(|| verifier.identity_dt(black_box(&f), &prm).unwrap()));
    group.bench_function("grad/n1/N256", |b| {
        b.iter(|| verifier.identity_gradient(black_box(&f), &prm).unwrap())
    });
    group.finish();
}

fn carleson(c: &mut Criterion) {
    let mu = frax_bench::slab(40.0);
    let cp = CapacityParams::diagonal(1.0, 3.0, 0.5);
    let search = BallSearch::default();
    let mut group = c.benchmark_group("condition_vi");
    group.sample_size(10);
    group.bench_function("slab/321_atoms", |b| b.iter(|| condition_vi(black_box(&mu), &cp, &search).unwrap()));
    group.finish();
}

criterion_group!(benches, extension, identity, carleson);
criterion_main!(benches);
