use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stark_core::families::{find_family_a, find_family_b, find_family_rest, FamilyKind};

fn families(c: &mut Criterion) {
    let mut g = c.benchmark_group("find_family");
    for k in [1, 4] {
        g.bench_with_input(BenchmarkId::new("A", k), &k, |b, &k| b.iter(|| find_family_a(black_box(0.5), k)));
        g.bench_with_input(BenchmarkId::new("B", k), &k, |b, &k| b.iter(|| find_family_b(black_box(0.5), k)));
    }
    g.bench_function("A-rest k=2", |b| b.iter(|| find_family_rest(black_box(0.0), 2, FamilyKind::ARest)));
    g.finish();
}

criterion_group!(benches, families);
criterion_main!(benches);
