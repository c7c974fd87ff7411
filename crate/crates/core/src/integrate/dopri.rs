//! Embedded Dormand–Prince steppers: the 5(4) pair with PI step-size
//! control and its fourth-order continuous extension, and the 8(5,3) pair
//! with its seventh-order extension for tight tolerances.

use crate::error::{Result, StarkError};

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, s: f64, y: &[f64; N], dy: &mut [f64; N]);
}

/// What the step monitor wants after an accepted step.
#[derive(Debug, Clone, PartialEq)]
pub enum Control {
    Continue,
    /// Stop cleanly, e.g. on escape.
    Stop(String),
    /// Abort with an error, e.g. a close approach in Cartesian coordinates.
    Abort(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Method {
    Dopri5,
    Dop853,
}

impl Method {
    /// Tolerances below this use the eighth-order pair.
    pub const HIGH_ORDER_BELOW: f64 = 1e-10;

    pub fn for_tol(tol: f64) -> Self {
        if tol < Self::HIGH_ORDER_BELOW { Method::Dop853 } else { Method::Dopri5 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl StepperConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { method: Method::for_tol(tol), rtol: tol, atol: tol, h_max: f64::INFINITY, max_steps: 10_000_000 }
    }
}

/// Dense output for a run: per step the start `s0`, the step `h` and the
/// coefficient vectors of the interpolant (5 for the 5(4) pair, 8 for 8(5,3)).
#[derive(Debug, Clone, Default)]
pub struct Dense {
    pub(crate) n: usize,
    pub(crate) rows: usize,
    pub(crate) s0: Vec<f64>,
    pub(crate) h: Vec<f64>,
    pub(crate) coef: Vec<f64>,
}

impl Dense {
    pub fn steps(&self) -> usize {
        self.s0.len()
    }

    pub fn start(&self) -> f64 {
        self.s0[0]
    }

    pub fn end(&self) -> f64 {
        let k = self.steps() - 1;
        self.s0[k] + self.h[k]
    }

    /// Index of the step containing `s` (clamped to the run).
    pub fn step_index(&self, s: f64) -> usize {
        match self.s0.partition_point(|&x| x <= s) {
            0 => 0,
            i => i - 1,
        }
    }

    pub fn step_bounds(&self, k: usize) -> (f64, f64) {
        (self.s0[k], self.s0[k] + self.h[k])
    }

    /// Interpolated state in step `k` at `s`.
    pub fn eval_in(&self, k: usize, s: f64, out: &mut [f64]) {
        let n = self.n;
        let rows = self.rows;
        let theta = (s - self.s0[k]) / self.h[k];
        let theta1 = 1.0 - theta;
        let base = k * rows * n;
        let c = &self.coef[base..base + rows * n];
        for i in 0..n {
            // nested form y0 + θ(r1 + (1−θ)(r2 + θ(r3 + (1−θ)(…))))
            let mut acc = 0.0;
            for j in (1..rows).rev() {
                acc = if j % 2 == 1 { theta * (c[j * n + i] + acc) } else { theta1 * (c[j * n + i] + acc) };
            }
            out[i] = c[i] + acc;
        }
    }

    pub fn eval(&self, s: f64, out: &mut [f64]) {
        self.eval_in(self.step_index(s), s, out);
    }
}

#[derive(Debug, Clone)]
pub struct RunResult<const N: usize> {
    pub s: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dense: Dense,
    pub stop_reason: Option<String>,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const BETA: f64 = 0.04;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

pub(super) fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (a, k) in terms {
            acc += a * k[i];
        }
        *o += h * acc;
    }
    out
}

pub(super) fn initial_step<const N: usize, S: OdeSystem<N>>(sys: &S, s0: f64, y0: &[f64; N], f0: &[f64; N], cfg: &StepperConfig, span: f64) -> f64 {
    let sc = |i: usize, y: &[f64; N]| cfg.atol + cfg.rtol * y[i].abs();
    let norm = |v: &[f64; N], y: &[f64; N]| (v.iter().enumerate().map(|(i, x)| (x / sc(i, y)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = norm(y0, y0);
    let d1 = norm(f0, y0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span.abs()).min(cfg.h_max);
    let y1 = combine(y0, h0, &[(1.0, f0)]);
    let mut f1 = [0.0; N];
    sys.rhs(s0 + h0, &y1, &mut f1);
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = norm(&diff, y0) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(span.abs()).min(cfg.h_max)
}

/// Integrates from `s0` to `s_end > s0` with the configured method.
/// `monitor` sees every accepted step end point.
pub fn integrate<const N: usize, S, M>(
    sys: &S,
    s0: f64,
    y0: [f64; N],
    s_end: f64,
    cfg: &StepperConfig,
    monitor: M,
) -> Result<RunResult<N>>
where
    S: OdeSystem<N>,
    M: FnMut(f64, &[f64; N]) -> Control,
{
    if !(s_end > s0) {
        return Err(StarkError::Domain(format!("integration end {s_end} must exceed start {s0}")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(StarkError::Domain("non-finite initial state".into()));
    }
    match cfg.method {
        Method::Dopri5 => integrate_dopri5(sys, s0, y0, s_end, cfg, monitor),
        Method::Dop853 => super::dop853::integrate_dop853(sys, s0, y0, s_end, cfg, monitor),
    }
}

fn integrate_dopri5<const N: usize, S, M>(
    sys: &S,
    s0: f64,
    y0: [f64; N],
    s_end: f64,
    cfg: &StepperConfig,
    mut monitor: M,
) -> Result<RunResult<N>>
where
    S: OdeSystem<N>,
    M: FnMut(f64, &[f64; N]) -> Control,
{
    let mut out = RunResult { s: vec![s0], y: vec![y0], dense: Dense { n: N, rows: 5, ..Default::default() }, stop_reason: None };
    let mut k1 = [0.0; N];
    sys.rhs(s0, &y0, &mut k1);
    let mut h = initial_step(sys, s0, &y0, &k1, cfg, s_end - s0);
    let mut s = s0;
    let mut y = y0;
    let mut facold: f64 = 1e-4;
    let expo1 = 0.2 - BETA * 0.75;
    let mut rejected_last = false;
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = ([0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N]);

    for _ in 0..cfg.max_steps {
        if s >= s_end {
            return Ok(out);
        }
        let last = s + 1.01 * h >= s_end;
        if last {
            h = s_end - s;
        }
        if h.abs() <= 16.0 * f64::EPSILON * s.abs().max(1.0) {
            return Err(StarkError::Integration { at: s, reason: "step size underflow".into() });
        }
        let y2 = combine(&y, h, &[(A21, &k1)]);
        sys.rhs(s + C2 * h, &y2, &mut k2);
        let y3 = combine(&y, h, &[(A31, &k1), (A32, &k2)]);
        sys.rhs(s + C3 * h, &y3, &mut k3);
        let y4 = combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        sys.rhs(s + C4 * h, &y4, &mut k4);
        let y5 = combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        sys.rhs(s + C5 * h, &y5, &mut k5);
        let y6 = combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        sys.rhs(s + h, &y6, &mut k6);
        let y_new = combine(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        sys.rhs(s + h, &y_new, &mut k7);

        let mut err = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            rejected_last = true;
            continue;
        }

        let fac11 = err.powf(expo1);
        if err <= 1.0 {
            let mut fac = fac11 / facold.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = (h / fac).min(cfg.h_max);
            if rejected_last {
                h_new = h_new.min(h);
            }
            facold = err.max(1e-4);

            let dense = &mut out.dense;
            dense.s0.push(s);
            dense.h.push(h);
            let mut r = vec![0.0; 5 * N];
            for i in 0..N {
                let dy = y_new[i] - y[i];
                let bspl = h * k1[i] - dy;
                r[i] = y[i];
                r[N + i] = dy;
                r[2 * N + i] = bspl;
                r[3 * N + i] = dy - h * k7[i] - bspl;
                r[4 * N + i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            dense.coef.extend_from_slice(&r);

            s = if last { s_end } else { s + h };
            y = y_new;
            k1 = k7;
            out.s.push(s);
            out.y.push(y);
            rejected_last = false;
            match monitor(s, &y) {
                Control::Continue => {}
                Control::Stop(reason) => {
                    out.stop_reason = Some(reason);
                    return Ok(out);
                }
                Control::Abort(reason) => return Err(StarkError::Integration { at: s, reason }),
            }
            if last {
                return Ok(out);
            }
            h = h_new;
        } else {
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            rejected_last = true;
        }
    }
    Err(StarkError::Integration { at: s, reason: format!("exceeded {} steps", cfg.max_steps) })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Harmonic;
    impl OdeSystem<2> for Harmonic {
        fn rhs(&self, _s: f64, y: &[f64; 2], dy: &mut [f64; 2]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    struct Decay;
    impl OdeSystem<1> for Decay {
        fn rhs(&self, s: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
            dy[0] = -2.0 * s * y[0];
        }
    }

    fn config(method: Method, tol: f64) -> StepperConfig {
        StepperConfig { method, ..StepperConfig::with_tol(tol) }
    }

    #[test]
    fn method_follows_tolerance() {
        assert_eq!(StepperConfig::with_tol(1e-10).method, Method::Dopri5);
        assert_eq!(StepperConfig::with_tol(1e-12).method, Method::Dop853);
    }

    #[test]
    fn harmonic_oscillator_phase() {
        for method in [Method::Dopri5, Method::Dop853] {
            let run = integrate(&Harmonic, 0.0, [1.0, 0.0], 20.0, &config(method, 1e-12), |_, _| Control::Continue).unwrap();
            let y = run.y.last().unwrap();
            assert!((y[0] - 20f64.cos()).abs() < 1e-9, "{method:?}");
            assert!((y[1] + 20f64.sin()).abs() < 1e-9, "{method:?}");
            assert_eq!(*run.s.last().unwrap(), 20.0);
        }
    }

    #[test]
    fn eighth_order_pair_takes_fewer_steps() {
        let five = integrate(&Harmonic, 0.0, [1.0, 0.0], 20.0, &config(Method::Dopri5, 1e-12), |_, _| Control::Continue).unwrap();
        let eight = integrate(&Harmonic, 0.0, [1.0, 0.0], 20.0, &config(Method::Dop853, 1e-12), |_, _| Control::Continue).unwrap();
        assert!(eight.dense.steps() * 3 < five.dense.steps());
    }

    #[test]
    fn dense_output_is_accurate_between_steps() {
        for method in [Method::Dopri5, Method::Dop853] {
            let run = integrate(&Harmonic, 0.0, [1.0, 0.0], 10.0, &config(method, 1e-11), |_, _| Control::Continue).unwrap();
            let mut out = [0.0; 2];
            for i in 0..997 {
                let s = 0.01 * i as f64 + 0.0031;
                run.dense.eval(s, &mut out);
                assert!((out[0] - s.cos()).abs() < 1e-9, "{method:?} {s}");
            }
            // the interpolant hits both step ends
            for k in 0..run.dense.steps() {
                let (a, b) = run.dense.step_bounds(k);
                run.dense.eval_in(k, a, &mut out);
                assert_eq!(out[0], run.y[k][0]);
                run.dense.eval_in(k, b, &mut out);
                assert!((out[0] - run.y[k + 1][0]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn non_autonomous_problem() {
        for method in [Method::Dopri5, Method::Dop853] {
            let run = integrate(&Decay, 0.0, [1.0], 3.0, &config(method, 1e-12), |_, _| Control::Continue).unwrap();
            assert!((run.y.last().unwrap()[0] - (-9f64).exp()).abs() < 1e-12, "{method:?}");
        }
    }

    #[test]
    fn monitor_can_stop_or_abort() {
        let cfg = StepperConfig::with_tol(1e-10);
        let run = integrate(&Harmonic, 0.0, [1.0, 0.0], 10.0, &cfg, |_, y| {
            if y[0] < 0.0 { Control::Stop("crossed".into()) } else { Control::Continue }
        })
        .unwrap();
        assert_eq!(run.stop_reason.as_deref(), Some("crossed"));
        assert!(*run.s.last().unwrap() < 3.0);
        let err = integrate(&Harmonic, 0.0, [1.0, 0.0], 10.0, &cfg, |_, _| Control::Abort("no".into()));
        assert!(matches!(err, Err(StarkError::Integration { .. })));
    }
}
