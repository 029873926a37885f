use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use joincert_core::certifier::certify_drip;
use joincert_core::interp::{assemble, rank};
use joincert_core::lab::{recover, FitConfig};
use joincert_core::schemes::{random_scheme, ComponentKind};
use joincert_core::{PlantedInstance, PrimeField, TrialPolicy};

fn quadruple_kinds(beta: usize) -> Vec<ComponentKind> {
    std::iter::once(ComponentKind::QUADRUPLE)
        .chain(std::iter::repeat_n(ComponentKind::DOUBLE, beta - 1))
        .collect()
}

fn elimination(c: &mut Criterion) {
    let field = PrimeField::default_prime();
    let mut g = c.benchmark_group("assemble_and_rank");
    for (m, d) in [(2usize, 7u32), (3, 7), (5, 6)] {
        let beta = joincert_core::parameter_table(m, d).beta as usize;
        let kinds = quadruple_kinds(beta);
        let scheme = random_scheme(&field, &kinds, m, 1).unwrap();
        g.bench_with_input(BenchmarkId::new("assemble", format!("{m}-{d}")), &scheme, |b, s| {
            b.iter(|| assemble(&field, black_box(s), d).unwrap())
        });
        let cm = assemble(&field, &scheme, d).unwrap();
        g.bench_with_input(BenchmarkId::new("rank", format!("{m}-{d}")), &cm, |b, cm| {
            b.iter(|| rank(&field, black_box(cm)))
        });
    }
    g.finish();
}

fn drip(c: &mut Criterion) {
    let policy = TrialPolicy::with_seed(3);
    let mut g = c.benchmark_group("drip");
    g.sample_size(10);
    for (m, d, t) in [(2usize, 7u32, 5usize), (3, 7, 7), (5, 6, 11)] {
        g.bench_function(format!("{m}-{d}-{t}"), |b| {
            b.iter(|| certify_drip(m, d, t, &policy, false).unwrap())
        });
    }
    g.finish();
}

fn recovery(c: &mut Criterion) {
    let inst = PlantedInstance::plant(2, 7, 3, 1).unwrap();
    let cfg = FitConfig {
        restarts: 8,
        ..FitConfig::default()
    };
    let mut g = c.benchmark_group("recovery");
    g.sample_size(10);
    g.bench_function("2-7-3 x8", |b| b.iter(|| recover(black_box(&inst), &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, elimination, drip, recovery);
criterion_main!(benches);
