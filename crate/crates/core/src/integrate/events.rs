//! Axis crossings, brakes and collisions located on the dense output.

use serde::Serialize;

use super::{Coords, Sample, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    /// `η = 0`: the positive x-axis.
    PositiveAxisCrossing,
    /// `ξ = 0`: the negative x-axis.
    NegativeAxisCrossing,
    /// `ξ′ = η′ = 0`: zero velocity.
    Brake,
    /// `ξ = η = 0`.
    Collision,
    /// One of `(ξ, ξ′)`, `(η, η′)` on the horizontal axis and the other on
    /// the vertical axis: the orbit meets the x-axis at a right angle.
    PerpendicularCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxisSide {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub kind: EventKind,
    /// Which half-axis a perpendicular crossing lies on.
    pub side: Option<AxisSide>,
    pub tau: f64,
    pub t: f64,
    pub state: Sample,
    /// Largest magnitude among the defining conditions at `state`.
    pub residual: f64,
}

impl Event {
    pub fn label(&self) -> &'static str {
        match (self.kind, self.side) {
            (EventKind::PositiveAxisCrossing, _) => "positive-crossing",
            (EventKind::NegativeAxisCrossing, _) => "negative-crossing",
            (EventKind::Brake, _) => "brake",
            (EventKind::Collision, _) => "collision",
            (EventKind::PerpendicularCrossing, Some(AxisSide::Positive)) => "perpendicular-positive",
            (EventKind::PerpendicularCrossing, _) => "perpendicular-negative",
        }
    }

    /// Whether the event lies on the positive x-axis.
    pub fn on_positive_axis(&self) -> bool {
        self.kind == EventKind::PositiveAxisCrossing || (self.kind == EventKind::PerpendicularCrossing && self.side == Some(AxisSide::Positive))
    }
}

/// Root-bracketing resolution: each step is scanned at this many sub-points.
const SUBDIVISIONS: usize = 4;
const ROOT_TOL: f64 = 1e-12;

/// Events with the trajectory's configured simultaneity window.
/// Spatial trajectories never meet the axis and yield no events.
pub fn detect_events(traj: &Trajectory) -> Vec<Event> {
    detect_events_with(traj, traj.options().event_window)
}

pub fn detect_events_with(traj: &Trajectory, window: f64) -> Vec<Event> {
    match traj.coords() {
        Coords::Parabolic2 => parabolic_events(traj, window),
        Coords::Cartesian2 => cartesian_events(traj, window),
        Coords::Cartesian3 | Coords::Parabolic3 => Vec::new(),
    }
}

/// Sign-change roots of each of four event functions of the dense state.
fn roots_of<F: Fn(&[f64]) -> [f64; 4]>(traj: &Trajectory, funcs: F) -> [Vec<f64>; 4] {
    let dense = traj.dense();
    let mut y = vec![0.0; dense.n];
    let mut roots: [Vec<f64>; 4] = Default::default();
    for k in 0..dense.steps() {
        let (a, b) = dense.step_bounds(k);
        dense.eval_in(k, a, &mut y);
        let mut s_prev = a;
        let mut f_prev = funcs(&y);
        for j in 1..=SUBDIVISIONS {
            let s = if j == SUBDIVISIONS { b } else { a + (b - a) * j as f64 / SUBDIVISIONS as f64 };
            dense.eval_in(k, s, &mut y);
            let f = funcs(&y);
            for c in 0..4 {
                let crossed = (f_prev[c] < 0.0 && f[c] > 0.0) || (f_prev[c] > 0.0 && f[c] < 0.0);
                if f[c] == 0.0 && f_prev[c] != 0.0 {
                    roots[c].push(s);
                } else if crossed {
                    roots[c].push(bisect(|s| {
                        let mut yy = vec![0.0; dense.n];
                        dense.eval_in(k, s, &mut yy);
                        funcs(&yy)[c]
                    }, s_prev, s, f_prev[c]));
                }
            }
            s_prev = s;
            f_prev = f;
        }
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_neg = f_lo < 0.0;
    for _ in 0..200 {
        if hi - lo <= ROOT_TOL * lo.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_neg { lo = mid } else { hi = mid }
    }
    0.5 * (lo + hi)
}

fn has_root_near(roots: &[f64], s: f64, window: f64) -> bool {
    let i = roots.partition_point(|&r| r < s - window);
    i < roots.len() && roots[i] <= s + window
}

/// A value counts as zero at a root of its partner when it would reach
/// zero within the window at its current rate.
fn near_zero(value: f64, rate: f64, window: f64) -> bool {
    value.abs() <= window * rate.abs().max(1.0)
}

fn make_event(traj: &Trajectory, kind: EventKind, side: Option<AxisSide>, s: f64, residual: impl Fn(&Sample) -> f64) -> Event {
    let state = traj.sample_at(s);
    Event { kind, side, tau: state.tau, t: state.t, residual: residual(&state), state }
}

fn parabolic_events(traj: &Trajectory, window: f64) -> Vec<Event> {
    let h = traj.constants().h;
    let accel_xi = |xi: f64| 2.0 * xi * (xi * xi + h);
    let accel_eta = |eta: f64| 2.0 * eta * (h - eta * eta);
    let [r_xi, r_eta, r_xip, r_etap] = roots_of(traj, |y| [y[0], y[2], y[1], y[3]]);
    let start = traj.span().0;
    let fresh = |s: f64| s - start > window;
    let mut events = Vec::new();

    for &s in r_xi.iter().filter(|&&s| fresh(s)) {
        let st = traj.sample_at(s);
        let ev = if near_zero(st.eta, st.eta_p, window) {
            make_event(traj, EventKind::Collision, None, s, |p| p.xi.abs().max(p.eta.abs()))
        } else if has_root_near(&r_etap, s, window) {
            make_event(traj, EventKind::PerpendicularCrossing, Some(AxisSide::Negative), s, |p| p.xi.abs().max(p.eta_p.abs()))
        } else {
            make_event(traj, EventKind::NegativeAxisCrossing, None, s, |p| p.xi.abs())
        };
        events.push(ev);
    }
    let collision_near = |events: &[Event], s: f64| events.iter().any(|e| e.kind == EventKind::Collision && (e.tau - s).abs() <= 10.0 * window);
    for &s in r_eta.iter().filter(|&&s| fresh(s)) {
        let st = traj.sample_at(s);
        if near_zero(st.xi, st.xi_p, window) {
            if !collision_near(&events, s) {
                events.push(make_event(traj, EventKind::Collision, None, s, |p| p.xi.abs().max(p.eta.abs())));
            }
        } else if has_root_near(&r_xip, s, window) {
            events.push(make_event(traj, EventKind::PerpendicularCrossing, Some(AxisSide::Positive), s, |p| p.eta.abs().max(p.xi_p.abs())));
        } else {
            events.push(make_event(traj, EventKind::PositiveAxisCrossing, None, s, |p| p.eta.abs()));
        }
    }
    let brake_near = |events: &[Event], s: f64| events.iter().any(|e| e.kind == EventKind::Brake && (e.tau - s).abs() <= 10.0 * window);
    for &s in r_etap.iter().filter(|&&s| fresh(s)) {
        let st = traj.sample_at(s);
        if near_zero(st.xi_p, accel_xi(st.xi), window) {
            events.push(make_event(traj, EventKind::Brake, None, s, |p| p.xi_p.abs().max(p.eta_p.abs())));
        }
    }
    for &s in r_xip.iter().filter(|&&s| fresh(s)) {
        let st = traj.sample_at(s);
        if near_zero(st.eta_p, accel_eta(st.eta), window) && !brake_near(&events, s) {
            events.push(make_event(traj, EventKind::Brake, None, s, |p| p.xi_p.abs().max(p.eta_p.abs())));
        }
    }
    events.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    events
}

fn cartesian_events(traj: &Trajectory, window: f64) -> Vec<Event> {
    let accel = |y: &[f64]| {
        let r = y[0].hypot(y[1]);
        let r3 = r * r * r;
        (-y[0] / r3 + 1.0, -y[1] / r3)
    };
    let [r_y, r_vx, r_power, _] = roots_of(traj, |y| {
        let (ax, ay) = accel(y);
        [y[1], y[2], y[2] * ax + y[3] * ay, 1.0]
    });
    let start = traj.span().0;
    let fresh = |s: f64| s - start > window;
    let mut events = Vec::new();
    for &s in r_y.iter().filter(|&&s| fresh(s)) {
        let st = traj.sample_at(s);
        let side = if st.x > 0.0 { AxisSide::Positive } else { AxisSide::Negative };
        let ev = if has_root_near(&r_vx, s, window) {
            make_event(traj, EventKind::PerpendicularCrossing, Some(side), s, |p| p.y.abs().max(p.vx.abs()))
        } else if side == AxisSide::Positive {
            make_event(traj, EventKind::PositiveAxisCrossing, None, s, |p| p.y.abs())
        } else {
            make_event(traj, EventKind::NegativeAxisCrossing, None, s, |p| p.y.abs())
        };
        events.push(ev);
    }
    for &s in r_power.iter().filter(|&&s| fresh(s)) {
        let st = traj.sample_at(s);
        let (ax, ay) = accel(&[st.x, st.y]);
        if near_zero(st.vx.hypot(st.vy), ax.hypot(ay), window) {
            events.push(make_event(traj, EventKind::Brake, None, s, |p| p.vx.hypot(p.vy)));
        }
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    events
}
