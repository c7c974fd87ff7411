use serde::Serialize;

/// Real roots of a cubic, ascending. Absent roots are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicTriple {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    /// 1 or 3; a double or triple root is counted with multiplicity.
    pub count: usize,
    /// `−(4p³ + 27q²) / (4|p|³ + 27q²)` of the depressed cubic, in `[−1, 1]`.
    pub discriminant: f64,
}

impl CubicTriple {
    /// The real roots that exist, ascending.
    pub fn roots(&self) -> Vec<f64> {
        [self.u1, self.u2, self.u3][..self.count].to_vec()
    }
}

/// Relative discriminant below which two roots are treated as equal.
pub const DOUBLE_ROOT_TOL: f64 = 1e-11;

/// Roots of `x³ + a2 x² + a1 x + a0`: trigonometric form for three real
/// roots, Cardano otherwise, then a guarded Newton polish of each root.
pub fn monic_cubic_roots(a2: f64, a1: f64, a0: f64) -> CubicTriple {
    let shift = a2 / 3.0;
    let p = a1 - a2 * shift;
    let q = (2.0 * a2 * a2 / 27.0 - a1 / 3.0) * a2 + a0;
    let scale = 4.0 * p.abs().powi(3) + 27.0 * q * q;
    let poly = |x: f64| ((x + a2) * x + a1) * x + a0;
    let dpoly = |x: f64| (3.0 * x + 2.0 * a2) * x + a1;
    let polish = |mut x: f64| {
        for _ in 0..3 {
            let fx = poly(x);
            let d = dpoly(x);
            if fx == 0.0 || d == 0.0 {
                break;
            }
            let next = x - fx / d;
            if poly(next).abs() < fx.abs() {
                x = next;
            } else {
                break;
            }
        }
        x
    };

    let coef = 1.0 + a2.abs() + a1.abs().sqrt() + a0.abs().cbrt();
    if p.abs() <= 1e-10 * coef * coef && q.abs() <= 1e-10 * coef * coef * coef {
        let x = -shift;
        return CubicTriple { u1: x, u2: x, u3: x, count: 3, discriminant: 0.0 };
    }
    let disc = -(4.0 * p * p * p + 27.0 * q * q) / scale;
    if disc >= -DOUBLE_ROOT_TOL && p < 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        let mut r = [
            polish(m * theta.cos() - shift),
            polish(m * (theta - tau).cos() - shift),
            polish(m * (theta + tau).cos() - shift),
        ];
        r.sort_by(f64::total_cmp);
        CubicTriple { u1: r[0], u2: r[1], u3: r[2], count: 3, discriminant: disc.min(1.0) }
    } else {
        let s = (0.25 * q * q + p * p * p / 27.0).max(0.0).sqrt();
        let a = -(0.5 * q.abs() + s).cbrt() * q.signum();
        let b = if a != 0.0 { -p / (3.0 * a) } else { 0.0 };
        let x = polish(a + b - shift);
        CubicTriple { u1: x, u2: f64::NAN, u3: f64::NAN, count: 1, discriminant: disc }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_factorisations() {
        // (x−1)(x−2)(x−3)
        let t = monic_cubic_roots(-6.0, 11.0, -6.0);
        assert_eq!(t.count, 3);
        for (got, want) in t.roots().iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        // (x−1)(x²+1)
        let t = monic_cubic_roots(-1.0, 1.0, -1.0);
        assert_eq!(t.count, 1);
        assert!((t.u1 - 1.0).abs() < 1e-15);
        // (x+2)³
        let t = monic_cubic_roots(6.0, 12.0, 8.0);
        assert_eq!(t.count, 3);
        assert!(t.roots().iter().all(|r| (r + 2.0).abs() < 1e-5));
        // (x−1)²(x+1), a double root
        let t = monic_cubic_roots(-1.0, -1.0, 1.0);
        assert_eq!(t.count, 3);
        assert!((t.u1 + 1.0).abs() < 1e-14);
        assert!((t.u2 - 1.0).abs() < 1e-7 && (t.u3 - 1.0).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn recovers_three_distinct_roots(r1 in -5.0f64..5.0, d1 in 0.01f64..3.0, d2 in 0.01f64..3.0) {
            let (x1, x2, x3) = (r1, r1 + d1, r1 + d1 + d2);
            let t = monic_cubic_roots(-(x1 + x2 + x3), x1 * x2 + x2 * x3 + x1 * x3, -x1 * x2 * x3);
            prop_assert_eq!(t.count, 3);
            for (got, want) in t.roots().iter().zip([x1, x2, x3]) {
                prop_assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()));
            }
        }

        #[test]
        fn single_real_root_is_a_root(a2 in -5.0f64..5.0, re in -3.0f64..3.0, im in 0.1f64..3.0) {
            // (x − a2)(x² − 2 re x + re² + im²)
            let n = re * re + im * im;
            let t = monic_cubic_roots(-a2 - 2.0 * re, 2.0 * re * a2 + n, -a2 * n);
            prop_assert_eq!(t.count, 1);
            prop_assert!((t.u1 - a2).abs() < 1e-10 * (1.0 + a2.abs()));
        }
    }
}
