use std::hint::black_box;

use boxbound::{assemble_pencil, lookup, schmudgen_bound, sos_lebesgue_bound, Subset};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn pencils(c: &mut Criterion) {
    let f = lookup("motzkin", 2).unwrap().cheb;
    let mut group = c.benchmark_group("assemble_pencil");
    for r in [12u32, 24, 48] {
        group.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| assemble_pencil(black_box(&f), Subset::EMPTY, r).unwrap())
        });
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let f = lookup("booth", 2).unwrap().cheb;
    let mut group = c.benchmark_group("bound");
    group.sample_size(20);
    for r in [12u32, 24, 40] {
        group.bench_with_input(BenchmarkId::new("schmudgen", r), &r, |b, &r| {
            b.iter(|| schmudgen_bound(black_box(&f), r).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sos_lebesgue", r), &r, |b, &r| {
            b.iter(|| sos_lebesgue_bound(black_box(&f), r).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pencils, bounds);
criterion_main!(benches);
