use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use stark_core::elliptic::{complete_k, jacobi_sn_cn_dn};
use stark_core::planar::{classify_orbit, period_pair, period_quadrature_xi};
use stark_core::spatial::{classify_spatial, spatial_period_pair};
use stark_core::{Conserved2, Conserved3};

fn kernels(c: &mut Criterion) {
    c.bench_function("complete_k", |b| b.iter(|| complete_k(black_box(0.7))));
    c.bench_function("jacobi_sn_cn_dn", |b| b.iter(|| jacobi_sn_cn_dn(black_box(1.3), black_box(0.7))));
}

fn planar(c: &mut Criterion) {
    let cq = Conserved2::new(-2.0, 0.5);
    c.bench_function("period_pair closed form", |b| b.iter(|| period_pair(black_box(&cq))));
    c.bench_function("period_xi quadrature", |b| b.iter(|| period_quadrature_xi(black_box(&cq))));
    c.bench_function("classify_orbit", |b| b.iter(|| classify_orbit(black_box(&cq))));
}

fn spatial(c: &mut Criterion) {
    let cq = Conserved3::new(-2.0, 0.0, 0.45);
    c.bench_function("spatial_period_pair", |b| b.iter(|| spatial_period_pair(black_box(&cq))));
    c.bench_function("classify_spatial", |b| b.iter(|| classify_spatial(black_box(&cq))));
}

criterion_group!(benches, kernels, planar, spatial);
criterion_main!(benches);
