//! One-dimensional quadrature used for the period oracles and for
//! time/azimuth reconstruction along dense trajectories.

use std::sync::OnceLock;

use crate::error::{Result, StarkError};

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule on `[a, b]`.
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

pub(crate) fn gl64() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(64))
}

pub(crate) fn gl5() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(5))
}

const MAX_DEPTH: usize = 40;

/// Adaptive 64-point Gauss–Legendre: a panel is accepted when the rule on the
/// whole panel agrees with the rule on its two halves to `rel_tol`.
pub fn integrate_gauss_legendre<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64> {
    let rule = gl64();
    let whole = rule.apply(&mut f, a, b);
    gl_recurse(&mut f, rule, a, b, whole, rel_tol, 0)
}

fn gl_recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    rel_tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = rule.apply(&mut *f, a, m);
    let right = rule.apply(&mut *f, m, b);
    let halves = left + right;
    if !halves.is_finite() {
        return Err(StarkError::Domain(format!("non-finite integrand on [{a}, {b}]")));
    }
    if (halves - whole).abs() <= rel_tol * halves.abs().max(f64::MIN_POSITIVE) {
        return Ok(halves);
    }
    if depth >= MAX_DEPTH {
        return Err(StarkError::Convergence { what: "adaptive Gauss-Legendre", iterations: depth });
    }
    Ok(gl_recurse(f, rule, a, m, left, rel_tol, depth + 1)?
        + gl_recurse(f, rule, m, b, right, rel_tol, depth + 1)?)
}

/// Adaptive Simpson with Richardson correction.
pub fn integrate_simpson<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // absolute target from a coarse magnitude estimate
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    simpson_recurse(&mut f, a, b, fa, fm, fb, whole, rel_tol * scale, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(StarkError::Domain(format!("non-finite integrand on [{a}, {b}]")));
    }
    if delta.abs() <= 15.0 * abs_tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(StarkError::Convergence { what: "adaptive Simpson", iterations: depth });
    }
    Ok(simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth + 1)?
        + simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rules_are_exact_on_polynomials() {
        for n in [1, 2, 5, 12, 64] {
            let rule = GaussLegendre::new(n);
            assert_eq!(rule.len(), n);
            let weight_sum: f64 = rule.apply(|_| 1.0, -1.0, 1.0);
            assert!((weight_sum - 2.0).abs() < 1e-13, "n = {n}");
            // degree 2n-1 integrates exactly
            let deg = (2 * n - 1) as i32;
            let got = rule.apply(|x| x.powi(deg) + x.powi(deg - 1), 0.0, 1.0);
            let want = 1.0 / (deg + 1) as f64 + 1.0 / deg as f64;
            assert!((got - want).abs() < 1e-12, "n = {n}: {got} vs {want}");
        }
    }

    #[test]
    fn adaptive_rules_agree_on_smooth_integrals() {
        let exact = 1.0 - (-3.0f64).exp();
        let gl = integrate_gauss_legendre(|x| (-x).exp(), 0.0, 3.0, 1e-14).unwrap();
        let simpson = integrate_simpson(|x| (-x).exp(), 0.0, 3.0, 1e-12).unwrap();
        assert!((gl - exact).abs() < 1e-14);
        assert!((simpson - exact).abs() < 1e-11);
    }

    #[test]
    fn peaked_integrand_forces_subdivision() {
        // ∫ dx / (1e-4 + x²) over [-1, 1]
        let eps = 1e-4f64;
        let exact = 2.0 / eps.sqrt() * (1.0 / eps.sqrt()).atan();
        let gl = integrate_gauss_legendre(|x| 1.0 / (eps + x * x), -1.0, 1.0, 1e-13).unwrap();
        assert!((gl / exact - 1.0).abs() < 1e-12);
    }
}
