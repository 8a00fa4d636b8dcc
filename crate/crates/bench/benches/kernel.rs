use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use frax_core::kernel::{energy_constant_grad, eval_g, eval_g_prime, LaguerreRule};

fn symbol(c: &mut Criterion) {
    let rule = LaguerreRule::shared();
    let mut group = c.benchmark_group("eval_g");
    // Both quadrature routes: the log-trapezoid below r = 2, the saddle split above.
    for r in [0.01, 1.0, 5.0, 60.0] {
        group.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| eval_g(black_box(0.7), black_box(r), rule).unwrap())
        });
    }
    group.finish();
    c.bench_function("eval_g_prime/r=1", |b| {
        b.iter(|| eval_g_prime(black_box(1.3), black_box(1.0), rule).unwrap())
    });
}

fn constants(c: &mut Criterion) {
    let rule = LaguerreRule::shared();
    let prm = frax_bench::params(1, 1.3);
    c.bench_function("energy_constant_grad", |b| {
        b.iter(|| energy_constant_grad(black_box(&prm), rule).unwrap())
    });
    c.bench_function("laguerre_rule/200", |b| b.iter(|| LaguerreRule::new(black_box(200)).unwrap()));
}

criterion_group!(benches, symbol, constants);
criterion_main!(benches);
