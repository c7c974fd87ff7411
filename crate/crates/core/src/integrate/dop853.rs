//! Dormand–Prince 8(5,3) stepper sharing the run container of the 5(4) pair.

#[path = "dop853_tableau.rs"]
mod tableau;

use super::dopri::{initial_step, Control, Dense, OdeSystem, RunResult, StepperConfig};
use crate::error::{Result, StarkError};
use tableau::{A, B, C, D, E3, E5, STAGES, STAGES_EXTENDED};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;
const ROWS: usize = 8;

fn stage<const N: usize>(y: &[f64; N], h: f64, k: &[[f64; N]], a: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (kj, aj) in k.iter().zip(a) {
            acc += aj * kj[i];
        }
        *o += h * acc;
    }
    out
}

pub(super) fn integrate_dop853<const N: usize, S, M>(
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
    let mut out = RunResult { s: vec![s0], y: vec![y0], dense: Dense { n: N, rows: ROWS, ..Default::default() }, stop_reason: None };
    let mut k = [[0.0; N]; STAGES_EXTENDED];
    let mut f = [0.0; N];
    sys.rhs(s0, &y0, &mut f);
    let mut h = initial_step(sys, s0, &y0, &f, cfg, s_end - s0);
    let mut s = s0;
    let mut y = y0;
    let mut rejected = false;

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
        k[0] = f;
        for st in 1..STAGES {
            let ys = stage(&y, h, &k[..st], &A[st][..st]);
            sys.rhs(s + C[st] * h, &ys, &mut k[st]);
        }
        let y_new = stage(&y, h, &k[..STAGES], &B);
        let mut f_new = [0.0; N];
        sys.rhs(s + h, &y_new, &mut f_new);
        k[STAGES] = f_new;

        let (mut e5, mut e3) = (0.0, 0.0);
        for i in 0..N {
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            let (mut a5, mut a3) = (0.0, 0.0);
            for j in 0..=STAGES {
                a5 += E5[j] * k[j][i];
                a3 += E3[j] * k[j][i];
            }
            e5 += (a5 / sc).powi(2);
            e3 += (a3 / sc).powi(2);
        }
        let err = if e5 == 0.0 && e3 == 0.0 { 0.0 } else { h.abs() * e5 / ((e5 + 0.01 * e3) * N as f64).sqrt() };
        if !err.is_finite() {
            h *= 0.1;
            rejected = true;
            continue;
        }
        if err >= 1.0 {
            h *= MIN_FACTOR.max(SAFETY * err.powf(ERROR_EXPONENT));
            rejected = true;
            continue;
        }
        let mut factor = if err == 0.0 { MAX_FACTOR } else { MAX_FACTOR.min(SAFETY * err.powf(ERROR_EXPONENT)) };
        if rejected {
            factor = factor.min(1.0);
        }

        for st in STAGES + 1..STAGES_EXTENDED {
            let ys = stage(&y, h, &k[..st], &A[st][..st]);
            sys.rhs(s + C[st] * h, &ys, &mut k[st]);
        }
        let dense = &mut out.dense;
        dense.s0.push(s);
        dense.h.push(h);
        let mut r = vec![0.0; ROWS * N];
        for i in 0..N {
            let dy = y_new[i] - y[i];
            r[i] = y[i];
            r[N + i] = dy;
            r[2 * N + i] = h * f[i] - dy;
            r[3 * N + i] = 2.0 * dy - h * (f_new[i] + f[i]);
            for (row, d) in D.iter().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    acc += d[j] * kj[i];
                }
                r[(4 + row) * N + i] = h * acc;
            }
        }
        dense.coef.extend_from_slice(&r);

        s = if last { s_end } else { s + h };
        y = y_new;
        f = f_new;
        out.s.push(s);
        out.y.push(y);
        rejected = false;
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
        h = (h * factor).min(cfg.h_max);
    }
    Err(StarkError::Integration { at: s, reason: format!("exceeded {} steps", cfg.max_steps) })
}
