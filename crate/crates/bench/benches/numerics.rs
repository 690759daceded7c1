use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use predprey_bench::{bistable, focus, harvested, START};
use predprey_core::manifolds::{self, ScanConfig};
use predprey_core::{bifurcation, dynamics, equilibria, IntegratorConfig, Param};

fn integration(c: &mut Criterion) {
    let cfg = IntegratorConfig { t_end: 200.0, ..IntegratorConfig::default() };
    c.bench_function("integrate/coexistence", |b| b.iter(|| dynamics::integrate(&bistable(0.0), black_box(START), &cfg)));
    c.bench_function("integrate/extinction", |b| b.iter(|| dynamics::integrate(&bistable(0.03), black_box(START), &cfg)));
    c.bench_function("classify_outcome", |b| {
        b.iter(|| dynamics::classify_outcome(&bistable(0.02), black_box(START), &IntegratorConfig::default()))
    });
}

fn equilibrium_search(c: &mut Criterion) {
    c.bench_function("find_coexistence", |b| b.iter(|| equilibria::find_coexistence(black_box(&bistable(0.02)))));
    c.bench_function("all_equilibria", |b| b.iter(|| equilibria::all_equilibria(black_box(&focus(15.0)))));
}

fn bifurcations(c: &mut Criterion) {
    c.bench_function("find_saddle_node", |b| {
        b.iter(|| bifurcation::find_saddle_node(&bistable(0.0), Param::K, black_box((0.0, 0.1))))
    });
    c.bench_function("find_hopf", |b| b.iter(|| bifurcation::find_hopf(&focus(0.0), Param::K, black_box((10.0, 20.0)))));
    let eq = equilibria::find_coexistence(&focus(15.0933)).unwrap().equilibria[0].location;
    c.bench_function("first_lyapunov", |b| b.iter(|| bifurcation::first_lyapunov(&focus(15.0933), black_box(eq))));
}

fn manifold(c: &mut Criterion) {
    let cfg = IntegratorConfig::default();
    let mut group = c.benchmark_group("manifolds");
    group.sample_size(10);
    let scan = ScanConfig { lines: 16, v_max: Some(24.0), ..ScanConfig::default() };
    group.bench_function("separatrix", |b| b.iter(|| manifolds::separatrix(&bistable(0.0), black_box(&scan), &cfg)));
    let p = harvested(0.32);
    let delta = manifolds::default_offset(&p);
    group.bench_function("sigma", |b| b.iter(|| manifolds::sigma(&p, black_box(delta), &cfg)));
    group.finish();
}

criterion_group!(benches, integration, equilibrium_search, bifurcations, manifold);
criterion_main!(benches);
