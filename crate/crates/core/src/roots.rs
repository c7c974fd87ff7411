//! Scalar root finding shared by the family and spatial solvers.

use crate::error::Result;

/// Root of an increasing function on a sign-changing bracket: bisection
/// with secant steps accepted only when they stay well inside the bracket.
pub fn monotone_root<F: Fn(f64) -> Result<f64>>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
) -> Result<f64> {
    const MAX_ITER: usize = 400;
    for _ in 0..MAX_ITER {
        let width = hi - lo;
        let mut x = lo - f_lo * width / (f_hi - f_lo);
        if !(x > lo + 0.01 * width && x < hi - 0.01 * width) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(if f_lo.abs() < f_hi.abs() { lo } else { hi })
}

/// Expands `x` geometrically away from `start` (by `step`, doubling) until
/// `f(x)` has the requested sign. Returns `(x, f(x))`.
pub fn expand_until<F: Fn(f64) -> Result<f64>>(
    f: F,
    start: f64,
    mut step: f64,
    want_positive: bool,
    max_steps: usize,
) -> Result<Option<(f64, f64)>> {
    let mut x = start;
    for _ in 0..max_steps {
        let fx = f(x)?;
        if (fx > 0.0) == want_positive && fx != 0.0 {
            return Ok(Some((x, fx)));
        }
        x += step;
        step *= 2.0;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_roots_of_increasing_functions() {
        let f = |x: f64| Ok(x.powi(3) - 2.0);
        let r = monotone_root(f, 0.0, 2.0, -2.0, 6.0).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-15);
        // flat then steep: secant steps get rejected, bisection carries on
        let g = |x: f64| Ok((50.0 * (x - 0.3)).tanh());
        let r = monotone_root(g, -10.0, 10.0, -1.0, 1.0).unwrap();
        assert!((r - 0.3).abs() < 1e-14);
    }

    #[test]
    fn expansion_finds_sign_change() {
        let f = |x: f64| Ok(x - 37.0);
        let (x, fx) = expand_until(f, 0.0, 1.0, true, 20).unwrap().unwrap();
        assert!(x > 37.0 && fx > 0.0);
        assert!(expand_until(f, 0.0, 1.0, true, 3).unwrap().is_none());
    }
}
