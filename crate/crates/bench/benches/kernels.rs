use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ln_deform::s_algebra::canonical_instance;
use ln_deform::{smith_normal_form, Convention, FComplex, Matrix, StructureTable};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn structure_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("structure_table");
    for bound in [3, 4, 5] {
        group.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, &n| {
            b.iter(|| StructureTable::build(black_box(n), Convention::AlphaInner))
        });
    }
    group.finish();
}

fn fstar_differential(c: &mut Criterion) {
    let mut group = c.benchmark_group("fstar_d1_matrix");
    group.sample_size(20);
    for bound in [1, 2] {
        let (_, table) = canonical_instance(bound);
        let constants = Arc::new(StructureTable::build(bound, Convention::AlphaInner));
        group.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, _| {
            b.iter(|| {
                let fc = FComplex::new(table.clone(), constants.clone()).unwrap();
                fc.matrix(1).cols()
            })
        });
    }
    group.finish();
}

fn smith(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_normal_form");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for size in [8, 16, 24] {
        let data = (0..size * size).map(|_| BigInt::from(rng.random_range(-9i64..=9))).collect();
        let m = Matrix::from_flat(size, size, data);
        group.bench_with_input(BenchmarkId::from_parameter(size), &m, |b, m| b.iter(|| smith_normal_form(black_box(m))));
    }
    group.finish();
}

criterion_group!(benches, structure_table, fstar_differential, smith);
criterion_main!(benches);
