//! Complete elliptic integral of the first kind and the Jacobi functions
//! sn, cn, dn.
//!
//! **Parameter convention.** Every function here takes the *parameter*
//! `m = k²`, not the modulus `k`:
//!
//! ```text
//! K(m) = ∫₀¹ dt / √((1 − t²)(1 − m t²))
//! ```
//!
//! `K` accepts any `m < 1`, including negative parameters (these appear when
//! the η-period is written through the Φ function). The Jacobi functions are
//! restricted to `0 ≤ m < 1`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Result, StarkError};

const AGM_TOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 60;

/// Arithmetic–geometric mean of two positive numbers.
pub fn agm(a0: f64, b0: f64) -> Result<f64> {
    if !(a0 > 0.0 && b0 > 0.0) || !a0.is_finite() || !b0.is_finite() {
        return domain(format!("agm needs finite positive arguments, got ({a0}, {b0})"));
    }
    let (mut a, mut b) = (a0, b0);
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            return Ok(0.5 * (a + b));
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Err(StarkError::Convergence { what: "agm", iterations: AGM_MAX_ITER })
}

/// Complete elliptic integral of the first kind, `K(m) = π / (2 agm(1, √(1−m)))`.
pub fn complete_k(m: f64) -> Result<f64> {
    if m.is_nan() || m >= 1.0 {
        return domain(format!("K(m) diverges or is undefined for m = {m}"));
    }
    if m == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(FRAC_PI_2 / agm(1.0, (1.0 - m).sqrt())?)
}

/// `K` as a function of the complementary parameter `m₁ = 1 − m`.
///
/// Near `m = 1` the value depends on `log m₁`, so callers that know `m₁`
/// directly keep full relative accuracy where `complete_k(1 − m₁)` would not.
pub fn complete_k_complement(m1: f64) -> Result<f64> {
    if m1.is_nan() || m1 <= 0.0 {
        return domain(format!("K diverges or is undefined for complementary parameter {m1}"));
    }
    if m1 == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(FRAC_PI_2 / agm(1.0, m1.sqrt())?)
}

/// Values of the three Jacobi functions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiSnCnDn {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

fn check_jacobi_parameter(m: f64) -> Result<()> {
    if (0.0..1.0).contains(&m) {
        Ok(())
    } else {
        domain(format!("Jacobi functions need 0 <= m < 1, got {m}"))
    }
}

/// sn, cn and dn together via the descending Landen (AGM) scale.
///
/// The amplitude is first evaluated on the last AGM level, where the
/// function is essentially circular, and then carried back to level zero
/// with `φ_{n−1} = (φ_n + asin((c_n / a_n) sin φ_n)) / 2`.
pub fn jacobi_sn_cn_dn(u: f64, m: f64) -> Result<JacobiSnCnDn> {
    check_jacobi_parameter(m)?;
    if !u.is_finite() {
        return domain(format!("Jacobi functions need a finite argument, got {u}"));
    }
    if m == 0.0 {
        let (s, c) = u.sin_cos();
        return Ok(JacobiSnCnDn { sn: s, cn: c, dn: 1.0 });
    }

    let mut a = [0.0f64; AGM_MAX_ITER + 1];
    let mut c = [0.0f64; AGM_MAX_ITER + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut n = 0;
    while c[n].abs() > AGM_TOL * a[n] {
        if n == AGM_MAX_ITER {
            return Err(StarkError::Convergence { what: "jacobi amplitude", iterations: n });
        }
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }

    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for k in (1..=n).rev() {
        phi = 0.5 * (phi + (c[k] / a[k] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (1.0 - m * sn * sn).sqrt();
    Ok(JacobiSnCnDn { sn, cn, dn })
}

pub fn jacobi_sn(u: f64, m: f64) -> Result<f64> {
    Ok(jacobi_sn_cn_dn(u, m)?.sn)
}

pub fn jacobi_cn(u: f64, m: f64) -> Result<f64> {
    Ok(jacobi_sn_cn_dn(u, m)?.cn)
}

pub fn jacobi_dn(u: f64, m: f64) -> Result<f64> {
    Ok(jacobi_sn_cn_dn(u, m)?.dn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_gauss_legendre, integrate_simpson};
    use proptest::prelude::*;

    /// K(m) from its defining integral after t = sin θ.
    fn k_by_quadrature(m: f64) -> f64 {
        integrate_simpson(|th: f64| 1.0 / (1.0 - m * th.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-13)
            .unwrap()
    }

    /// Incomplete F(φ | m), used to invert sn numerically.
    fn incomplete_f(phi: f64, m: f64) -> f64 {
        integrate_gauss_legendre(|th: f64| 1.0 / (1.0 - m * th.sin().powi(2)).sqrt(), 0.0, phi, 1e-14)
            .unwrap()
    }

    #[test]
    fn agm_fixed_points_and_iteration_oracle() {
        assert_eq!(agm(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(agm(4.0, 4.0).unwrap(), 4.0);
        let (mut a, mut b) = (1.0f64, 2.0f64);
        for _ in 0..20 {
            if (a - b).abs() < 1e-15 {
                break;
            }
            (a, b) = (0.5 * (a + b), (a * b).sqrt());
        }
        assert!((agm(1.0, 2.0).unwrap() - a).abs() < 1e-14);
    }

    #[test]
    fn agm_rejects_non_positive() {
        assert!(matches!(agm(0.0, 1.0), Err(StarkError::Domain(_))));
        assert!(matches!(agm(1.0, -2.0), Err(StarkError::Domain(_))));
        assert!(agm(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn k_special_values() {
        assert!((complete_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((complete_k(0.5).unwrap() - 1.854_074_677_301_372).abs() < 1e-12);
        assert!((complete_k(0.5).unwrap() - k_by_quadrature(0.5)).abs() < 1e-10);
        assert!(complete_k(1.0).is_err());
        assert!(complete_k(1.5).is_err());
        assert!(complete_k(f64::NAN).is_err());
    }

    #[test]
    fn k_matches_quadrature_on_grid() {
        for i in 0..100 {
            let m = 0.99 * i as f64 / 99.0;
            let k = complete_k(m).unwrap();
            let oracle = k_by_quadrature(m);
            assert!((k / oracle - 1.0).abs() < 1e-10, "m = {m}: {k} vs {oracle}");
        }
        // negative parameters
        for m in [-0.5, -3.0, -40.0] {
            let oracle = k_by_quadrature(m);
            assert!((complete_k(m).unwrap() / oracle - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn k_is_strictly_increasing() {
        let mut prev = complete_k(-5.0).unwrap();
        for i in 1..=400 {
            let m = -5.0 + 5.999_999 * i as f64 / 400.0;
            let k = complete_k(m).unwrap();
            assert!(k > prev, "not increasing at m = {m}");
            prev = k;
        }
    }

    #[test]
    fn k_near_one_is_logarithmic() {
        // K(m) ≈ ln(4/√(1−m)) as m → 1
        let m = 1.0 - 1e-12;
        let k = complete_k(m).unwrap();
        let asym = (4.0 / (1.0f64 - m).sqrt()).ln();
        assert!((k - asym).abs() < 1e-9);
    }

    #[test]
    fn jacobi_degenerates_to_circular_functions() {
        assert_eq!(jacobi_sn(0.0, 0.3).unwrap(), 0.0);
        assert_eq!(jacobi_cn(0.0, 0.7).unwrap(), 1.0);
        for u in [0.5, 1.0, 2.0] {
            assert!((jacobi_sn(u, 0.0).unwrap() - u.sin()).abs() < 1e-15);
        }
        for u in [0.5, 1.0] {
            assert!((jacobi_cn(u, 0.0).unwrap() - u.cos()).abs() < 1e-15);
        }
        let v = jacobi_sn_cn_dn(0.8, 0.4).unwrap();
        assert!((v.sn * v.sn + v.cn * v.cn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_rejects_bad_parameter() {
        assert!(jacobi_sn(0.3, 1.0).is_err());
        assert!(jacobi_cn(0.3, -0.1).is_err());
        assert!(jacobi_sn(f64::INFINITY, 0.2).is_err());
    }

    #[test]
    fn sn_at_quarter_period_is_one() {
        let m = 0.3;
        let k = complete_k(m).unwrap();
        assert!((jacobi_sn(k, m).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sn_inverts_the_incomplete_integral() {
        for (phi, m) in [(0.3, 0.3), (1.1, 0.5), (1.5, 0.9), (0.7, 0.999)] {
            let u = incomplete_f(phi, m);
            let s = jacobi_sn(u, m).unwrap();
            assert!((s - f64::sin(phi)).abs() < 1e-12, "phi = {phi}, m = {m}");
        }
    }

    #[test]
    fn dn_identity() {
        let v = jacobi_sn_cn_dn(1.3, 0.6).unwrap();
        assert!((v.dn * v.dn + 0.6 * v.sn * v.sn - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn pythagorean_identity(u in -50.0f64..50.0, m in 0.0f64..0.999) {
            let v = jacobi_sn_cn_dn(u, m).unwrap();
            prop_assert!((v.sn * v.sn + v.cn * v.cn - 1.0).abs() < 1e-12);
            prop_assert!(v.sn.abs() <= 1.0);
        }

        #[test]
        fn sn_odd_cn_even(u in -20.0f64..20.0, m in 0.0f64..0.99) {
            let p = jacobi_sn_cn_dn(u, m).unwrap();
            let q = jacobi_sn_cn_dn(-u, m).unwrap();
            prop_assert!((p.sn + q.sn).abs() < 1e-13);
            prop_assert!((p.cn - q.cn).abs() < 1e-13);
        }

        #[test]
        fn sn_has_period_four_k(u in -10.0f64..10.0, m in 0.0f64..0.99) {
            let k = complete_k(m).unwrap();
            let a = jacobi_sn(u, m).unwrap();
            let b = jacobi_sn(u + 4.0 * k, m).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
