//! Direct numerical integration of the planar and spatial problem in
//! Cartesian and in regularized parabolic coordinates, with time and
//! azimuth reconstruction and event detection on the dense output.
//!
//! Parabolic coordinates use the fictitious time τ with `dt = (ξ² + η²) dτ`
//! and the second-order forms
//!
//! ```text
//! ξ″ =  2ξ³ + 2hξ + L²/ξ³
//! η″ = −2η³ + 2hη + L²/η³
//! ```
//!
//! (`L = 0` in the plane), which are regular through collisions.

mod dop853;
pub mod dopri;
mod events;
mod export;
mod systems;
mod verify;

use serde::Serialize;

use crate::error::{domain, Result, StarkError};
use crate::planar::{conserved_from_state, CartesianState2, Conserved2};
use crate::quad::gl5;
use crate::spatial::{conserved3_from_state, CartesianState3, Conserved3};

pub use dopri::{Control, Dense, Method, OdeSystem, StepperConfig};
pub use events::{detect_events, detect_events_with, AxisSide, Event, EventKind};
pub use export::{write_csv, CSV_COLUMNS_PLANAR, CSV_COLUMNS_SPATIAL};
pub use verify::{family_initial_state, verify_family, FamilyCheck};

use dopri::integrate as run;
use systems::{Cartesian2, Cartesian3, Parabolic2, Parabolic3};

/// Default per-step tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Cartesian runs abort below this distance from the centre.
pub const DEFAULT_R_MIN: f64 = 1e-6;
/// Runs stop (cleanly) once the distance from the centre exceeds this.
pub const DEFAULT_R_MAX: f64 = 1e3;
/// τ-window within which two conditions count as simultaneous.
pub const DEFAULT_EVENT_WINDOW: f64 = 1e-8;
/// Relative residual allowed in the separated invariants of initial data.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub method: Method,
    pub tol: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub event_window: f64,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            method: Method::for_tol(DEFAULT_TOL),
            tol: DEFAULT_TOL,
            r_min: DEFAULT_R_MIN,
            r_max: DEFAULT_R_MAX,
            event_window: DEFAULT_EVENT_WINDOW,
            max_steps: 10_000_000,
        }
    }
}

impl IntegrateOptions {
    /// Tolerance with the stepper chosen by [`Method::for_tol`].
    pub fn with_tol(tol: f64) -> Self {
        Self { method: Method::for_tol(tol), tol, ..Self::default() }
    }

    fn stepper(&self) -> Result<StepperConfig> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return domain(format!("tolerance must lie in (0, 1), got {}", self.tol));
        }
        Ok(StepperConfig { method: self.method, max_steps: self.max_steps, ..StepperConfig::with_tol(self.tol) })
    }
}

/// Regularized coordinates with their τ-derivatives, plus the clocks.
/// `phi` is only meaningful for spatial motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParabolicState {
    pub xi: f64,
    pub xi_p: f64,
    pub eta: f64,
    pub eta_p: f64,
    pub tau: f64,
    pub t: f64,
    pub phi: f64,
}

impl ParabolicState {
    pub fn new(xi: f64, xi_p: f64, eta: f64, eta_p: f64) -> Self {
        Self { xi, xi_p, eta, eta_p, tau: 0.0, t: 0.0, phi: 0.0 }
    }

    fn s(&self) -> f64 {
        self.xi * self.xi + self.eta * self.eta
    }
}

/// Planar `(H, c)` of a parabolic state; `c` is read off the ξ equation.
pub fn conserved2_of(p: &ParabolicState) -> Result<Conserved2> {
    let s = p.s();
    if !(s > 0.0) {
        return Err(StarkError::Singularity("energy is undefined at the collision point".into()));
    }
    let (xi2, eta2) = (p.xi * p.xi, p.eta * p.eta);
    let h = (p.xi_p * p.xi_p + p.eta_p * p.eta_p - xi2 * xi2 + eta2 * eta2 - 4.0) / (2.0 * s);
    let c = 0.5 * p.xi_p * p.xi_p - 0.5 * xi2 * xi2 - h * xi2 - 1.0;
    Ok(Conserved2::new(h, c))
}

/// Spatial `(h, c)` of a parabolic state at angular momentum `l`.
pub fn conserved3_of(p: &ParabolicState, l: f64) -> Result<Conserved3> {
    let (xi2, eta2) = (p.xi * p.xi, p.eta * p.eta);
    if !(xi2 > 0.0 && eta2 > 0.0) {
        return Err(StarkError::Singularity("spatial state on the field axis".into()));
    }
    let l2 = l * l;
    let num = p.xi_p * p.xi_p + p.eta_p * p.eta_p - xi2 * xi2 + eta2 * eta2 - 4.0 + l2 / xi2 + l2 / eta2;
    let h = num / (2.0 * (xi2 + eta2));
    let c = 0.5 * (p.xi_p * p.xi_p - xi2 * xi2 - 2.0 * h * xi2 + l2 / xi2) - 1.0;
    Ok(Conserved3::new(h, c, l))
}

/// `ξ = √(r + x)`, `η = sign(y)√(r − x)`, `ξ′ = ξẋ + ηẏ`, `η′ = ξẏ − ηẋ`.
pub fn parabolic_from_cartesian2(s: &CartesianState2) -> Result<ParabolicState> {
    let r = s.radius();
    if !(r > 0.0) {
        return Err(StarkError::Singularity("state at the attracting centre".into()));
    }
    // the smaller of r ± x is formed from y²/(r ∓ x)
    let (xi_sq, eta_sq) = if s.x >= 0.0 { (r + s.x, s.y * s.y / (r + s.x)) } else { (s.y * s.y / (r - s.x), r - s.x) };
    let xi = xi_sq.sqrt();
    let eta = if s.y < 0.0 { -eta_sq.sqrt() } else { eta_sq.sqrt() };
    Ok(ParabolicState::new(xi, xi * s.vx + eta * s.vy, eta, xi * s.vy - eta * s.vx))
}

pub fn cartesian_from_parabolic2(p: &ParabolicState) -> Result<CartesianState2> {
    let s = p.s();
    if !(s > 0.0) {
        return Err(StarkError::Singularity("velocity is undefined at the collision point".into()));
    }
    Ok(CartesianState2::new(
        0.5 * (p.xi * p.xi - p.eta * p.eta),
        p.xi * p.eta,
        (p.xi * p.xi_p - p.eta * p.eta_p) / s,
        (p.xi_p * p.eta + p.xi * p.eta_p) / s,
    ))
}

/// Spatial analogue with `ξ² = r + z`, `η² = r − z`, `ρ = ξη`, `φ = atan2(y, x)`.
pub fn parabolic_from_cartesian3(s: &CartesianState3) -> Result<ParabolicState> {
    let r = s.radius();
    let rho_sq = s.x * s.x + s.y * s.y;
    if !(rho_sq > 0.0) {
        return Err(StarkError::Singularity("state on the field axis".into()));
    }
    let (u, v) = if s.z >= 0.0 { (r + s.z, rho_sq / (r + s.z)) } else { (rho_sq / (r - s.z), r - s.z) };
    let (xi, eta) = (u.sqrt(), v.sqrt());
    let radial = s.x * s.vx + s.y * s.vy;
    let mut p = ParabolicState::new(xi, xi * s.vz + radial / xi, eta, -eta * s.vz + radial / eta);
    p.phi = s.y.atan2(s.x);
    Ok(p)
}

pub fn cartesian_from_parabolic3(p: &ParabolicState, l: f64) -> Result<CartesianState3> {
    let rho = p.xi * p.eta;
    if !(rho.abs() > 0.0) {
        return Err(StarkError::Singularity("state on the field axis".into()));
    }
    let s = p.s();
    let (sin, cos) = p.phi.sin_cos();
    let rho_dot = (p.xi_p * p.eta + p.xi * p.eta_p) / s;
    let phi_dot = l / (rho * rho);
    Ok(CartesianState3::new(
        rho * cos,
        rho * sin,
        0.5 * (p.xi * p.xi - p.eta * p.eta),
        rho_dot * cos - rho * phi_dot * sin,
        rho_dot * sin + rho * phi_dot * cos,
        (p.xi * p.xi_p - p.eta * p.eta_p) / s,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coords {
    Cartesian2,
    Parabolic2,
    Cartesian3,
    Parabolic3,
}

impl Coords {
    pub fn is_spatial(self) -> bool {
        matches!(self, Coords::Cartesian3 | Coords::Parabolic3)
    }

    pub fn is_parabolic(self) -> bool {
        matches!(self, Coords::Parabolic2 | Coords::Parabolic3)
    }
}

/// One point of a trajectory in both coordinate systems. Planar samples
/// carry `z = vz = phi = 0`.
///
/// `h_err` is `H(state) − H` for Cartesian runs and the regularized energy
/// residual `(ξ² + η²)(H(state) − H)` for parabolic runs, which stays
/// bounded through collisions. `c_err` is `c(state) − c` with `c` read off
/// the ξ equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub tau: f64,
    pub t: f64,
    pub xi: f64,
    pub xi_p: f64,
    pub eta: f64,
    pub eta_p: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub phi: f64,
    pub h_err: f64,
    pub c_err: f64,
}

impl Sample {
    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn parabolic(&self) -> ParabolicState {
        ParabolicState { xi: self.xi, xi_p: self.xi_p, eta: self.eta, eta_p: self.eta_p, tau: self.tau, t: self.t, phi: self.phi }
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub h: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "detail")]
pub enum Termination {
    Completed,
    Escaped(f64),
}

/// Constants the run was integrated with; `l = 0` in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunConstants {
    pub h: f64,
    pub c: f64,
    pub l: f64,
}

/// Result of one integration. The independent variable is τ for parabolic
/// runs and t for Cartesian runs.
#[derive(Debug, Clone)]
pub struct Trajectory {
    coords: Coords,
    constants: RunConstants,
    samples: Vec<Sample>,
    dense: Dense,
    termination: Termination,
    drift: Drift,
    options: IntegrateOptions,
}

impl Trajectory {
    pub fn coords(&self) -> Coords {
        self.coords
    }

    pub fn constants(&self) -> RunConstants {
        self.constants
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn termination(&self) -> &Termination {
        &self.termination
    }

    pub fn drift(&self) -> Drift {
        self.drift
    }

    pub fn options(&self) -> IntegrateOptions {
        self.options
    }

    pub fn dense(&self) -> &Dense {
        &self.dense
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    fn indep(&self, s: &Sample) -> f64 {
        if self.coords.is_parabolic() { s.tau } else { s.t }
    }

    /// Range of the independent variable.
    pub fn span(&self) -> (f64, f64) {
        (self.indep(self.first()), self.indep(self.last()))
    }

    pub fn max_radius(&self) -> f64 {
        self.samples.iter().map(Sample::radius).fold(0.0, f64::max)
    }

    /// Interpolated sample at `s` (τ or t) inside the run.
    pub fn sample_at(&self, s: f64) -> Sample {
        let k = self.dense.step_index(s);
        self.sample_in(k, s)
    }

    fn sample_in(&self, k: usize, s: f64) -> Sample {
        let mut y = vec![0.0; self.dense.n];
        self.dense.eval_in(k, s, &mut y);
        let base = &self.samples[k];
        match self.coords {
            Coords::Parabolic2 | Coords::Parabolic3 => {
                let (a, _) = self.dense.step_bounds(k);
                let t = base.t + integrate_step(&self.dense, k, a, s, |y| y[0] * y[0] + y[2] * y[2]);
                let l = self.constants.l;
                let phi = if self.coords == Coords::Parabolic3 {
                    base.phi + integrate_step(&self.dense, k, a, s, |y| l * (1.0 / (y[0] * y[0]) + 1.0 / (y[2] * y[2])))
                } else {
                    0.0
                };
                let p = ParabolicState { xi: y[0], xi_p: y[1], eta: y[2], eta_p: y[3], tau: s, t, phi };
                parabolic_sample(self.coords, &self.constants, &p)
            }
            Coords::Cartesian2 => cartesian2_sample(&self.constants, s, &y),
            Coords::Cartesian3 => {
                let mut out = cartesian3_sample(&self.constants, s, &y);
                out.phi = unwrap_near(out.phi, base.phi);
                out
            }
        }
    }

    /// Position at physical time `t`, inverting `t(τ)` for parabolic runs.
    pub fn position_at_time(&self, t: f64) -> Result<[f64; 3]> {
        let (t0, t1) = (self.first().t, self.last().t);
        if !(t >= t0 && t <= t1) {
            return domain(format!("time {t} outside the run [{t0}, {t1}]"));
        }
        if !self.coords.is_parabolic() {
            return Ok(self.sample_at(t).position());
        }
        let k = match self.samples.partition_point(|s| s.t <= t) {
            0 => 0,
            i => (i - 1).min(self.dense.steps() - 1),
        };
        let (mut lo, mut hi) = self.dense.step_bounds(k);
        let mut tau = lo + (hi - lo) * (t - self.samples[k].t) / (self.samples[k + 1].t - self.samples[k].t).max(f64::MIN_POSITIVE);
        for _ in 0..100 {
            let smp = self.sample_in(k, tau);
            let f = smp.t - t;
            if f.abs() <= 1e-15 * t.abs().max(1.0) || hi - lo <= 1e-15 * tau.abs().max(1.0) {
                return Ok(smp.position());
            }
            if f > 0.0 { hi = tau } else { lo = tau }
            let speed = smp.xi * smp.xi + smp.eta * smp.eta;
            let newton = tau - f / speed;
            tau = if speed > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        Ok(self.sample_in(k, tau).position())
    }

    /// Smallest distance to the centre over the step end points.
    pub fn min_radius(&self) -> f64 {
        self.samples.iter().map(Sample::radius).fold(f64::INFINITY, f64::min)
    }
}

/// `∫_a^b f(y(s)) ds` over part of one dense step with a 5-point rule,
/// exact for the squared quartic interpolant.
fn integrate_step<F: Fn(&[f64]) -> f64>(dense: &Dense, k: usize, a: f64, b: f64, f: F) -> f64 {
    if b == a {
        return 0.0;
    }
    let mut y = vec![0.0; dense.n];
    gl5().apply(
        |s| {
            dense.eval_in(k, s, &mut y);
            f(&y)
        },
        a,
        b,
    )
}

fn unwrap_near(phi: f64, reference: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    phi + tau * ((reference - phi) / tau).round()
}

fn parabolic_sample(coords: Coords, k: &RunConstants, p: &ParabolicState) -> Sample {
    let (xi2, eta2) = (p.xi * p.xi, p.eta * p.eta);
    let l2 = k.l * k.l;
    let (cent_xi, cent_eta) = if coords == Coords::Parabolic3 { (l2 / xi2, l2 / eta2) } else { (0.0, 0.0) };
    let i_xi = p.xi_p * p.xi_p - (xi2 * xi2 + 2.0 * k.h * xi2 + 2.0 * (k.c + 1.0) - cent_xi);
    let i_eta = p.eta_p * p.eta_p - (-eta2 * eta2 + 2.0 * k.h * eta2 - 2.0 * (k.c - 1.0) - cent_eta);
    let s = xi2 + eta2;
    let (x, y, z, vx, vy, vz) = if coords == Coords::Parabolic3 {
        let rho = p.xi * p.eta;
        let (sin, cos) = p.phi.sin_cos();
        let (mut vx, mut vy, mut vz) = (0.0, 0.0, 0.0);
        if s > 0.0 && rho != 0.0 {
            let rho_dot = (p.xi_p * p.eta + p.xi * p.eta_p) / s;
            let phi_dot = k.l / (rho * rho);
            vx = rho_dot * cos - rho * phi_dot * sin;
            vy = rho_dot * sin + rho * phi_dot * cos;
            vz = (p.xi * p.xi_p - p.eta * p.eta_p) / s;
        }
        (rho * cos, rho * sin, 0.5 * (xi2 - eta2), vx, vy, vz)
    } else if s > 0.0 {
        let vx = (p.xi * p.xi_p - p.eta * p.eta_p) / s;
        let vy = (p.xi_p * p.eta + p.xi * p.eta_p) / s;
        (0.5 * (xi2 - eta2), p.xi * p.eta, 0.0, vx, vy, 0.0)
    } else {
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    };
    Sample {
        tau: p.tau,
        t: p.t,
        xi: p.xi,
        xi_p: p.xi_p,
        eta: p.eta,
        eta_p: p.eta_p,
        x,
        y,
        z,
        vx,
        vy,
        vz,
        phi: p.phi,
        h_err: 0.5 * (i_xi + i_eta),
        c_err: 0.5 * i_xi,
    }
}

fn cartesian2_sample(k: &RunConstants, t: f64, y: &[f64]) -> Sample {
    let cs = CartesianState2::new(y[0], y[1], y[2], y[3]);
    let p = parabolic_from_cartesian2(&cs).unwrap_or(ParabolicState::new(0.0, 0.0, 0.0, 0.0));
    let (h_err, c_err) = match conserved_from_state(&cs) {
        Ok(q) => (q.h - k.h, q.c - k.c),
        Err(_) => (f64::NAN, f64::NAN),
    };
    Sample {
        tau: y[4],
        t,
        xi: p.xi,
        xi_p: p.xi_p,
        eta: p.eta,
        eta_p: p.eta_p,
        x: y[0],
        y: y[1],
        z: 0.0,
        vx: y[2],
        vy: y[3],
        vz: 0.0,
        phi: 0.0,
        h_err,
        c_err,
    }
}

fn cartesian3_sample(k: &RunConstants, t: f64, y: &[f64]) -> Sample {
    let cs = CartesianState3::new(y[0], y[1], y[2], y[3], y[4], y[5]);
    let p = parabolic_from_cartesian3(&cs).unwrap_or(ParabolicState::new(0.0, 0.0, 0.0, 0.0));
    let (h_err, c_err) = match conserved3_from_state(&cs) {
        Ok(q) => (q.h - k.h, q.c - k.c),
        Err(_) => (f64::NAN, f64::NAN),
    };
    Sample {
        tau: y[6],
        t,
        xi: p.xi,
        xi_p: p.xi_p,
        eta: p.eta,
        eta_p: p.eta_p,
        x: y[0],
        y: y[1],
        z: y[2],
        vx: y[3],
        vy: y[4],
        vz: y[5],
        phi: p.phi,
        h_err,
        c_err,
    }
}

fn drift_of(samples: &[Sample]) -> Drift {
    let max_abs = |f: fn(&Sample) -> f64| samples.iter().map(f).filter(|v| v.is_finite()).fold(0.0, |m: f64, v| m.max(v.abs()));
    Drift { h: max_abs(|s| s.h_err), c: max_abs(|s| s.c_err) }
}

fn check_span(start: f64, end: f64, what: &str) -> Result<()> {
    if !(end > start) || !end.is_finite() {
        return domain(format!("{what} end {end} must be finite and exceed the start {start}"));
    }
    Ok(())
}

fn termination_of(stop: Option<String>, at: f64) -> Termination {
    match stop {
        Some(_) => Termination::Escaped(at),
        None => Termination::Completed,
    }
}

pub fn integrate_cartesian2(s0: &CartesianState2, t_end: f64, tol: f64) -> Result<Trajectory> {
    integrate_cartesian2_with(s0, 0.0, t_end, &IntegrateOptions::with_tol(tol))
}

/// Integrates `ẍ = −x/r³ + 1`, `ÿ = −y/r³` from `t0` to `t_end`.
pub fn integrate_cartesian2_with(s0: &CartesianState2, t0: f64, t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    check_span(t0, t_end, "time")?;
    let cq = conserved_from_state(s0)?;
    if s0.radius() < opts.r_min {
        return Err(close_approach(t0, s0.radius(), opts.r_min));
    }
    let cfg = opts.stepper()?;
    let (r_min, r_max) = (opts.r_min, opts.r_max);
    let out = run(&Cartesian2, t0, [s0.x, s0.y, s0.vx, s0.vy, 0.0], t_end, &cfg, |_, y| cartesian_monitor(y[0].hypot(y[1]), r_min, r_max))?;
    let constants = RunConstants { h: cq.h, c: cq.c, l: 0.0 };
    let samples: Vec<Sample> = out.s.iter().zip(&out.y).map(|(&t, y)| cartesian2_sample(&constants, t, y)).collect();
    let at = *out.s.last().unwrap();
    Ok(finish(Coords::Cartesian2, constants, samples, out.dense, termination_of(out.stop_reason, at), opts))
}

pub fn integrate_cartesian3(s0: &CartesianState3, t_end: f64, tol: f64) -> Result<Trajectory> {
    integrate_cartesian3_with(s0, 0.0, t_end, &IntegrateOptions::with_tol(tol))
}

/// Integrates the spatial problem with the field along +z.
pub fn integrate_cartesian3_with(s0: &CartesianState3, t0: f64, t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    check_span(t0, t_end, "time")?;
    let cq = conserved3_from_state(s0)?;
    if s0.radius() < opts.r_min {
        return Err(close_approach(t0, s0.radius(), opts.r_min));
    }
    let cfg = opts.stepper()?;
    let (r_min, r_max) = (opts.r_min, opts.r_max);
    let y0 = [s0.x, s0.y, s0.z, s0.vx, s0.vy, s0.vz, 0.0];
    let out = run(&Cartesian3, t0, y0, t_end, &cfg, |_, y| cartesian_monitor((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt(), r_min, r_max))?;
    let constants = RunConstants { h: cq.h, c: cq.c, l: cq.l };
    let mut samples: Vec<Sample> = out.s.iter().zip(&out.y).map(|(&t, y)| cartesian3_sample(&constants, t, y)).collect();
    for i in 1..samples.len() {
        samples[i].phi = unwrap_near(samples[i].phi, samples[i - 1].phi);
    }
    let at = *out.s.last().unwrap();
    Ok(finish(Coords::Cartesian3, constants, samples, out.dense, termination_of(out.stop_reason, at), opts))
}

fn cartesian_monitor(r: f64, r_min: f64, r_max: f64) -> Control {
    if r < r_min {
        Control::Abort(format!("close approach r = {r:.3e} below {r_min:.1e}; integrate in parabolic coordinates instead"))
    } else if r > r_max {
        Control::Stop("escaped".into())
    } else {
        Control::Continue
    }
}

fn close_approach(at: f64, r: f64, r_min: f64) -> StarkError {
    StarkError::Integration { at, reason: format!("close approach r = {r:.3e} below {r_min:.1e}; integrate in parabolic coordinates instead") }
}

fn check_invariant(residual: f64, scale: f64) -> Result<()> {
    if !(residual.abs() <= CONSISTENCY_TOL * scale.abs().max(1.0)) {
        return Err(StarkError::InconsistentInitialData(residual));
    }
    Ok(())
}

pub fn integrate_parabolic2(p0: &ParabolicState, cq: &Conserved2, tau_end: f64, tol: f64) -> Result<Trajectory> {
    integrate_parabolic2_with(p0, cq, tau_end, &IntegrateOptions::with_tol(tol))
}

/// Integrates the two planar oscillators from `p0.tau` to `tau_end`;
/// `p0.t` seeds the physical clock.
pub fn integrate_parabolic2_with(p0: &ParabolicState, cq: &Conserved2, tau_end: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    check_span(p0.tau, tau_end, "tau")?;
    check_invariant(p0.xi_p * p0.xi_p - cq.xi_radicand(p0.xi), cq.xi_radicand(p0.xi))?;
    check_invariant(p0.eta_p * p0.eta_p - cq.eta_radicand(p0.eta), cq.eta_radicand(p0.eta))?;
    let cfg = opts.stepper()?;
    let r_max = opts.r_max;
    let y0 = [p0.xi, p0.xi_p, p0.eta, p0.eta_p];
    let out = run(&Parabolic2 { h: cq.h }, p0.tau, y0, tau_end, &cfg, |_, y| parabolic_monitor(y, r_max))?;
    let constants = RunConstants { h: cq.h, c: cq.c, l: 0.0 };
    let traj = parabolic_trajectory(Coords::Parabolic2, constants, p0, &out.s, &out.y, out.dense, out.stop_reason, opts);
    reconstruct_time(&traj)
}

pub fn integrate_parabolic3(p0: &ParabolicState, cq: &Conserved3, tau_end: f64, tol: f64) -> Result<Trajectory> {
    integrate_parabolic3_with(p0, cq, tau_end, &IntegrateOptions::with_tol(tol))
}

/// Spatial analogue of [`integrate_parabolic2_with`]; `p0.phi` seeds the azimuth.
pub fn integrate_parabolic3_with(p0: &ParabolicState, cq: &Conserved3, tau_end: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    check_span(p0.tau, tau_end, "tau")?;
    cq.require_l()?;
    if !(p0.xi > 0.0 && p0.eta > 0.0) {
        return domain("spatial parabolic coordinates must be positive");
    }
    check_invariant(p0.xi_p * p0.xi_p - cq.xi_radicand(p0.xi), cq.xi_radicand(p0.xi))?;
    check_invariant(p0.eta_p * p0.eta_p - cq.eta_radicand(p0.eta), cq.eta_radicand(p0.eta))?;
    let cfg = opts.stepper()?;
    let r_max = opts.r_max;
    let y0 = [p0.xi, p0.xi_p, p0.eta, p0.eta_p];
    let sys = Parabolic3 { h: cq.h, l2: cq.l * cq.l };
    let out = run(&sys, p0.tau, y0, tau_end, &cfg, |_, y| {
        if y[0] <= 0.0 || y[2] <= 0.0 {
            Control::Abort("parabolic coordinate reached zero despite L != 0".into())
        } else {
            parabolic_monitor(y, r_max)
        }
    })?;
    let constants = RunConstants { h: cq.h, c: cq.c, l: cq.l };
    let traj = parabolic_trajectory(Coords::Parabolic3, constants, p0, &out.s, &out.y, out.dense, out.stop_reason, opts);
    reconstruct_phi(&reconstruct_time(&traj)?, cq.l)
}

fn parabolic_monitor(y: &[f64; 4], r_max: f64) -> Control {
    if 0.5 * (y[0] * y[0] + y[2] * y[2]) > r_max { Control::Stop("escaped".into()) } else { Control::Continue }
}

#[allow(clippy::too_many_arguments)]
fn parabolic_trajectory(
    coords: Coords,
    constants: RunConstants,
    p0: &ParabolicState,
    s: &[f64],
    y: &[[f64; 4]],
    dense: Dense,
    stop: Option<String>,
    opts: &IntegrateOptions,
) -> Trajectory {
    let samples = s
        .iter()
        .zip(y)
        .map(|(&tau, y)| {
            let p = ParabolicState { xi: y[0], xi_p: y[1], eta: y[2], eta_p: y[3], tau, t: p0.t, phi: p0.phi };
            parabolic_sample(coords, &constants, &p)
        })
        .collect();
    let at = *s.last().unwrap();
    finish(coords, constants, samples, dense, termination_of(stop, at), opts)
}

fn finish(coords: Coords, constants: RunConstants, samples: Vec<Sample>, dense: Dense, termination: Termination, opts: &IntegrateOptions) -> Trajectory {
    let drift = drift_of(&samples);
    Trajectory { coords, constants, samples, dense, termination, drift, options: *opts }
}

/// Fills `t(τ) = t₀ + ∫(ξ² + η²) dτ` step by step on the dense output.
pub fn reconstruct_time(traj: &Trajectory) -> Result<Trajectory> {
    if !traj.coords.is_parabolic() {
        return domain("time reconstruction needs a parabolic trajectory");
    }
    let mut out = traj.clone();
    for k in 0..out.dense.steps() {
        let (a, b) = out.dense.step_bounds(k);
        let dt = integrate_step(&out.dense, k, a, b, |y| y[0] * y[0] + y[2] * y[2]);
        out.samples[k + 1].t = out.samples[k].t + dt;
    }
    Ok(out)
}

/// Fills `φ(τ) = φ₀ + ∫ L (1/ξ² + 1/η²) dτ` and the Cartesian positions
/// that depend on it.
pub fn reconstruct_phi(traj: &Trajectory, l: f64) -> Result<Trajectory> {
    if traj.coords != Coords::Parabolic3 {
        return domain("azimuth reconstruction needs a spatial parabolic trajectory");
    }
    if l == 0.0 {
        return Err(StarkError::ZeroAngularMomentum);
    }
    let mut out = traj.clone();
    out.constants.l = l;
    for k in 0..out.dense.steps() {
        let (a, b) = out.dense.step_bounds(k);
        let dphi = integrate_step(&out.dense, k, a, b, |y| l * (1.0 / (y[0] * y[0]) + 1.0 / (y[2] * y[2])));
        out.samples[k + 1].phi = out.samples[k].phi + dphi;
    }
    let constants = out.constants;
    for smp in out.samples.iter_mut() {
        *smp = parabolic_sample(Coords::Parabolic3, &constants, &smp.parabolic());
    }
    out.drift = drift_of(&out.samples);
    Ok(out)
}

/// Azimuth advance over one ξ period and one η period starting at the
/// run's first sample. Requires the run to cover both periods.
pub fn phi_advance(traj: &Trajectory, t_xi: f64, t_eta: f64) -> Result<(f64, f64)> {
    if traj.coords != Coords::Parabolic3 {
        return domain("azimuth advance needs a spatial parabolic trajectory");
    }
    let (start, end) = traj.span();
    if start + t_xi.max(t_eta) > end {
        return domain("trajectory does not cover both periods");
    }
    let phi0 = traj.first().phi;
    Ok((traj.sample_at(start + t_xi).phi - phi0, traj.sample_at(start + t_eta).phi - phi0))
}
