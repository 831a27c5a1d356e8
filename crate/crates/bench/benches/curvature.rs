use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use isocurv::{
    bochner, conformal, equivalence_check, ricci, sample_planes, vanishing_report, PlaneKind,
    TheoremId, Tolerance,
};
use isocurv_bench::{kaehler_fixture, random_fixture};

fn contractions(c: &mut Criterion) {
    let mut group = c.benchmark_group("tensors");
    for dim in [4, 8, 12] {
        let (model, t) = random_fixture(dim, dim / 2, 1);
        group.bench_with_input(BenchmarkId::new("ricci", dim), &dim, |b, _| {
            b.iter(|| ricci(&model, black_box(&t)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("conformal", dim), &dim, |b, _| {
            b.iter(|| conformal(&model, black_box(&t)).unwrap())
        });
        if dim >= 6 {
            group.bench_with_input(BenchmarkId::new("bochner", dim), &dim, |b, _| {
                b.iter(|| bochner(&model, black_box(&t)).unwrap())
            });
        }
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let (model, _) = random_fixture(8, 4, 2);
    let mut group = c.benchmark_group("sampling");
    for kind in [
        PlaneKind::WeaklyIsotropic,
        PlaneKind::StronglyIsotropic,
        PlaneKind::StronglyIsotropicAntiholomorphic,
    ] {
        group.bench_function(format!("{kind:?}/100"), |b| {
            b.iter(|| sample_planes(&model, kind, 100, black_box(3)).unwrap())
        });
    }
    group.finish();
}

fn diagnostics(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("diagnostics");
    group.sample_size(20);
    let (model, t) = random_fixture(4, 2, 4);
    group.bench_function("vanishing_report/weak/1000", |b| {
        b.iter(|| {
            vanishing_report(
                &model,
                black_box(&t),
                PlaneKind::WeaklyIsotropic,
                1000,
                0,
                tol,
            )
            .unwrap()
        })
    });
    group.bench_function("equivalence/Thm1/1000", |b| {
        b.iter(|| equivalence_check(&model, black_box(&t), TheoremId::Thm1, 1000, 0, tol).unwrap())
    });
    let (model, k) = kaehler_fixture(8, 4, 5);
    group.bench_function("equivalence/Thm7/200", |b| {
        b.iter(|| equivalence_check(&model, black_box(&k), TheoremId::Thm7, 200, 0, tol).unwrap())
    });
    group.finish();
}

criterion_group!(benches, contractions, sampling, diagnostics);
criterion_main!(benches);
