use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kfun::scenarios::grid;
use kfun::{five_photon_tmsv, hafnian, sweep, GraphSpec, Method, Scenario};
use kfun_bench::symmetric_fixture;

fn bench_hafnian(c: &mut Criterion) {
    let mut group = c.benchmark_group("hafnian");
    group.sample_size(10);
    for n in [8, 12, 16, 20] {
        let m = symmetric_fixture(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| hafnian(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn bench_five_five(c: &mut Criterion) {
    let mut group = c.benchmark_group("five_five");
    group.sample_size(10);
    group.bench_function("engine", |b| {
        b.iter(|| five_photon_tmsv(0.5, 0.0, black_box(1.0), 0.01, Method::Engine).unwrap())
    });
    group.bench_function("closed_form", |b| {
        b.iter(|| five_photon_tmsv(0.5, 0.0, black_box(1.0), 0.01, Method::ClosedForm).unwrap())
    });
    group.finish();
}

fn bench_subtraction(c: &mut Criterion) {
    let k = GraphSpec::two_mode(0.9).kernel().unwrap();
    c.bench_function("subtract_tmsv_3_3", |b| {
        b.iter(|| {
            kfun::subtract(black_box(&k), &[3, 3], &[0.4, 0.4])
                .unwrap()
                .success_probability()
                .unwrap()
        })
    });
}

fn bench_sweep(c: &mut Criterion) {
    let axis = grid(0.1, 1.0, 0.1).unwrap();
    let both = [Scenario::SplitCatI, Scenario::JointSubtractIi];
    let mut group = c.benchmark_group("sweep_10x10");
    group.sample_size(10);
    for method in [Method::ClosedForm, Method::Engine] {
        group.bench_function(format!("{method:?}"), |b| {
            b.iter(|| sweep(&both, 1.0, &axis, &axis, method).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_hafnian, bench_five_five, bench_subtraction, bench_sweep);
criterion_main!(benches);
