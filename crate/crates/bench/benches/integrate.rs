use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use stark_core::families::{brake_orbit_params, find_family_a};
use stark_core::integrate::{
    detect_events, integrate_cartesian2, integrate_parabolic2, parabolic_from_cartesian2, verify_family,
};
use stark_core::planar::period_eta;
use stark_core::{CartesianState2, ParabolicState};

fn integrate(c: &mut Criterion) {
    let brake = brake_orbit_params(0.5).unwrap();
    let cq = brake.conserved();
    let p0 = ParabolicState::new(1.0, 0.0, 0.0, (2.0 * (1.0 - cq.c)).sqrt());
    let t_eta = period_eta(&cq).unwrap();
    c.bench_function("parabolic brake period", |b| b.iter(|| integrate_parabolic2(black_box(&p0), &cq, t_eta, 1e-10)));
    c.bench_function("parabolic brake period tol 1e-12", |b| {
        b.iter(|| integrate_parabolic2(black_box(&p0), &cq, t_eta, 1e-12))
    });
    let traj = integrate_parabolic2(&p0, &cq, 3.0 * t_eta, 1e-10).unwrap();
    c.bench_function("detect_events 3 periods", |b| b.iter(|| detect_events(black_box(&traj))));

    let s0 = CartesianState2::new(0.5, 0.5, 0.0, 1.0);
    c.bench_function("cartesian t = 5", |b| b.iter(|| integrate_cartesian2(black_box(&s0), 5.0, 1e-10)));
    let p = parabolic_from_cartesian2(&s0).unwrap();
    let cq = stark_core::integrate::conserved2_of(&p).unwrap();
    c.bench_function("parabolic tau = 0.5", |b| b.iter(|| integrate_parabolic2(black_box(&p), &cq, 0.5, 1e-10)));

    let sol = find_family_a(0.5, 2).unwrap();
    c.bench_function("verify_family A k=2", |b| b.iter(|| verify_family(black_box(&sol), 1e-10)));
}

criterion_group!(benches, integrate);
criterion_main!(benches);
