use std::hint::black_box;

use btq::geometry::make_rule;
use btq::lab::{thm1_run, LabSettings};
use btq::operators::{prequantum_with, toeplitz_with};
use btq::symbol::parse;
use btq::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn schedules() -> Vec<(&'static str, Execution)> {
    let mut out = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        out.push(("parallel", Execution::Parallel));
    }
    out
}

fn toeplitz_assembly(c: &mut Criterion) {
    let f = parse("0.3 + x1^2*x2*x3 - x2^4 + x1*x3").unwrap();
    let mut group = c.benchmark_group("toeplitz");
    group.sample_size(10);
    for m in [64u32, 200] {
        let rule = make_rule(m, f.degree()).unwrap();
        for (name, exec) in schedules() {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |b, &m| {
                b.iter(|| toeplitz_with(black_box(&f), m, &rule, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn prequantum_assembly(c: &mut Criterion) {
    let f = parse("x1*x3 - 0.5*x2^2").unwrap();
    let m = 64;
    let rule = make_rule(m, f.degree() + 2).unwrap();
    let mut group = c.benchmark_group("prequantum");
    group.sample_size(10);
    for (name, exec) in schedules() {
        group.bench_function(BenchmarkId::new(name, m), |b| {
            b.iter(|| prequantum_with(black_box(&f), m, &rule, exec).unwrap())
        });
    }
    group.finish();
}

fn level_sweep(c: &mut Criterion) {
    let f = parse("0.3 + x1 + 0.5*x2*x3").unwrap();
    let levels = [16, 32, 64, 128];
    let mut group = c.benchmark_group("thm1_sweep");
    group.sample_size(10);
    for (name, exec) in schedules() {
        let settings = LabSettings::default().with_execution(exec);
        group.bench_function(name, |b| b.iter(|| thm1_run(black_box(&f), &levels, &settings).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, toeplitz_assembly, prequantum_assembly, level_sweep);
criterion_main!(benches);
