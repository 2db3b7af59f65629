use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use paras_bench::{fixture, INSTANCES};
use paras_core::runtime::Slot;
use paras_core::{Engine, EngineParams, Evaluator};

/// A full min-conflict scan: one swap score per partner of variable 0.
fn swap_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("swap_scan");
    for (kind, n) in INSTANCES {
        let (spec, config) = fixture(kind, n, 1);
        let eval = Evaluator::from_configuration(&spec, &config);
        group.throughput(Throughput::Elements(spec.num_vars() as u64 - 1));
        group.bench_function(BenchmarkId::new(kind.name(), n), |b| {
            b.iter(|| (1..spec.num_vars()).map(|j| eval.swap_score(black_box(0), j)).min())
        });
    }
    group.finish();
}

fn full_cost(c: &mut Criterion) {
    let mut group = c.benchmark_group("full_cost");
    for (kind, n) in INSTANCES {
        let (spec, config) = fixture(kind, n, 2);
        group.bench_function(BenchmarkId::new(kind.name(), n), |b| {
            b.iter(|| spec.full_cost(black_box(config.values())).unwrap())
        });
    }
    group.finish();
}

fn engine_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine_step");
    for (kind, n) in INSTANCES {
        let (spec, _) = fixture(kind, n, 3);
        let params = EngineParams::defaults_for(&spec).with_seed(3);
        group.bench_function(BenchmarkId::new(kind.name(), n), |b| {
            let mut engine = Engine::new(&spec, params.clone()).unwrap();
            b.iter(|| {
                if engine.is_solved() {
                    engine.restart();
                }
                engine.step()
            })
        });
    }
    group.finish();
}

fn mailbox(c: &mut Criterion) {
    let (_, config) = fixture(paras_core::ProblemKind::MagicSquare, 30, 4);
    let slot = Slot::new(config.values().len());
    let mut group = c.benchmark_group("mailbox");
    group.bench_function("write_900", |b| b.iter(|| slot.write(1, black_box(&config))));
    group.bench_function("write_read_900", |b| {
        let mut seen = 0;
        b.iter(|| {
            slot.write(1, &config);
            slot.read_new(&mut seen)
        })
    });
    group.finish();
}

criterion_group!(benches, swap_scan, full_cost, engine_step, mailbox);
criterion_main!(benches);
