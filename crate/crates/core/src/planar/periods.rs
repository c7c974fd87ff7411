use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::{classify_eta, classify_xi, eta_turning_points, xi_turning_points, Conserved2, EtaClass, XiClass};
use crate::elliptic::{complete_k, jacobi_sn_cn_dn};
use crate::error::{Result, StarkError};
use crate::quad::{integrate_gauss_legendre, integrate_simpson};

/// Periods of ξ and η in fictitious time τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodPair {
    pub t_xi: f64,
    pub t_eta: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureScheme {
    #[default]
    GaussLegendre,
    Simpson,
}

const QUAD_TOL: f64 = 1e-13;

fn require_xi_oval(cq: &Conserved2) -> Result<()> {
    match classify_xi(cq) {
        XiClass::PeriodicPlusUnbounded => Ok(()),
        other => Err(StarkError::XiClassMismatch(other)),
    }
}

fn require_eta_oval(cq: &Conserved2) -> Result<()> {
    match classify_eta(cq) {
        EtaClass::PeriodicOvalHneg | EtaClass::PeriodicOvalHpos => Ok(()),
        other => Err(StarkError::EtaClassMismatch(other)),
    }
}

/// `T_ξ = 4K(ξ₁²/ξ₂²)/ξ₂`.
pub fn period_xi(cq: &Conserved2) -> Result<f64> {
    require_xi_oval(cq)?;
    let tp = xi_turning_points(cq)?;
    Ok(4.0 * complete_k(tp.low_sq / tp.high_sq)? / tp.high_sq.sqrt())
}

/// `T_η = 4K(η₁²/(η₁²+η₂²))/√(η₁²+η₂²)`.
pub fn period_eta(cq: &Conserved2) -> Result<f64> {
    require_eta_oval(cq)?;
    let tp = eta_turning_points(cq)?;
    let w2 = tp.low_sq + tp.high_sq;
    Ok(4.0 * complete_k(tp.low_sq / w2)? / w2.sqrt())
}

pub fn period_pair(cq: &Conserved2) -> Result<PeriodPair> {
    let t_xi = period_xi(cq)?;
    let t_eta = period_eta(cq)?;
    Ok(PeriodPair { t_xi, t_eta, ratio: t_xi / t_eta })
}

fn quarter_integral<F: Fn(f64) -> f64>(f: F, scheme: QuadratureScheme) -> Result<f64> {
    match scheme {
        QuadratureScheme::GaussLegendre => integrate_gauss_legendre(f, 0.0, FRAC_PI_2, QUAD_TOL),
        QuadratureScheme::Simpson => integrate_simpson(f, 0.0, FRAC_PI_2, QUAD_TOL),
    }
}

/// `T_ξ = 4 ∫₀^{ξ₁} dξ / √(ξ⁴ + 2Hξ² + 2(c+1))` by quadrature.
///
/// With `s = ξ²` the quartic satisfies `P(s) − P(s₁) = (s − s₁)(s + s₁ + 2H)`,
/// so after `ξ = ξ₁ sin θ` and dividing out `cos θ` the integrand is
/// `1/√(−2H − ξ₁²(1 + sin²θ))`, smooth on the closed interval. Only `ξ₁` is
/// used, and it is checked to be a root of `P` first.
pub fn period_quadrature_xi_with(cq: &Conserved2, scheme: QuadratureScheme) -> Result<f64> {
    require_xi_oval(cq)?;
    let s1 = xi_turning_points(cq)?.low_sq;
    check_root(cq.xi_radicand(s1.sqrt()), s1 * s1 + 2.0 * cq.h.abs() * s1 + 2.0 * (cq.c + 1.0).abs())?;
    let f = |th: f64| {
        let s = th.sin();
        1.0 / (-2.0 * cq.h - s1 * (1.0 + s * s)).sqrt()
    };
    Ok(4.0 * quarter_integral(f, scheme)?)
}

fn check_root(residual: f64, scale: f64) -> Result<()> {
    if residual.abs() <= 1e-12 * scale.max(1.0) {
        Ok(())
    } else {
        Err(StarkError::Domain(format!("turning point misses the radicand root by {residual:.3e}")))
    }
}

/// `T_η = 4 ∫₀^{η₁} dη / √(−η⁴ + 2Hη² − 2(c−1))`, reduced the same way to
/// the integrand `1/√(η₁²(1 + sin²θ) − 2H)`.
pub fn period_quadrature_eta_with(cq: &Conserved2, scheme: QuadratureScheme) -> Result<f64> {
    require_eta_oval(cq)?;
    let s1 = eta_turning_points(cq)?.low_sq;
    check_root(cq.eta_radicand(s1.sqrt()), s1 * s1 + 2.0 * cq.h.abs() * s1 + 2.0 * (cq.c - 1.0).abs())?;
    let f = |th: f64| {
        let s = th.sin();
        1.0 / (s1 * (1.0 + s * s) - 2.0 * cq.h).sqrt()
    };
    Ok(4.0 * quarter_integral(f, scheme)?)
}

pub fn period_quadrature_xi(cq: &Conserved2) -> Result<f64> {
    period_quadrature_xi_with(cq, QuadratureScheme::GaussLegendre)
}

pub fn period_quadrature_eta(cq: &Conserved2) -> Result<f64> {
    period_quadrature_eta_with(cq, QuadratureScheme::GaussLegendre)
}

/// `ξ(τ) = ξ₁ sn(ξ₂(τ − phase), ξ₁²/ξ₂²)`.
pub fn analytic_xi(tau: f64, cq: &Conserved2, phase: f64) -> Result<f64> {
    Ok(analytic_xi_state(tau, cq, phase)?.0)
}

/// `(ξ, ξ′)` along the oval through the origin at `τ = phase`.
pub fn analytic_xi_state(tau: f64, cq: &Conserved2, phase: f64) -> Result<(f64, f64)> {
    require_xi_oval(cq)?;
    let tp = xi_turning_points(cq)?;
    let (xi1, xi2) = (tp.low_sq.sqrt(), tp.high_sq.sqrt());
    let j = jacobi_sn_cn_dn(xi2 * (tau - phase), tp.low_sq / tp.high_sq)?;
    Ok((xi1 * j.sn, xi1 * xi2 * j.cn * j.dn))
}

/// `η(τ) = η₁ cn(w(τ − phase), η₁²/w²)` with `w² = η₁² + η₂²`.
pub fn analytic_eta(tau: f64, cq: &Conserved2, phase: f64) -> Result<f64> {
    Ok(analytic_eta_state(tau, cq, phase)?.0)
}

/// `(η, η′)` along the oval, at its maximum `η₁` when `τ = phase`.
pub fn analytic_eta_state(tau: f64, cq: &Conserved2, phase: f64) -> Result<(f64, f64)> {
    require_eta_oval(cq)?;
    let tp = eta_turning_points(cq)?;
    let w2 = tp.low_sq + tp.high_sq;
    let w = w2.sqrt();
    let eta1 = tp.low_sq.sqrt();
    let j = jacobi_sn_cn_dn(w * (tau - phase), tp.low_sq / w2)?;
    Ok((eta1 * j.cn, -eta1 * w * j.sn * j.dn))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_forms_at_reference_point() {
        let cq = Conserved2::new(-2.0, 0.5);
        let t_xi = period_xi(&cq).unwrap();
        let want = 4.0 * complete_k(1.0 / 3.0).unwrap() / 3f64.sqrt();
        assert!(rel(t_xi, want) < 1e-15);
        let t_eta = period_eta(&cq).unwrap();
        let s5 = 5f64.sqrt();
        let want = 4.0 * complete_k((s5 - 2.0) / (2.0 * s5)).unwrap() / (2.0 * s5).sqrt();
        assert!(rel(t_eta, want) < 1e-14);
        assert!(t_xi > t_eta);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for cq in [
            Conserved2::new(-2.0, 0.5),
            Conserved2::new(-2.0, -1.0 + 1e-6),
            Conserved2::new(-3.0, 0.0),
            Conserved2::new(-1.2, -0.3),
            Conserved2::new(-5.0, 0.9),
        ] {
            let closed = period_xi(&cq).unwrap();
            let gl = period_quadrature_xi(&cq).unwrap();
            let simpson = period_quadrature_xi_with(&cq, QuadratureScheme::Simpson).unwrap();
            assert!(rel(gl, closed) < 1e-10, "{cq:?}: {gl} vs {closed}");
            assert!(rel(simpson, gl) < 1e-9, "{cq:?}");
            let closed = period_eta(&cq).unwrap();
            let gl = period_quadrature_eta(&cq).unwrap();
            let simpson = period_quadrature_eta_with(&cq, QuadratureScheme::Simpson).unwrap();
            assert!(rel(gl, closed) < 1e-10, "{cq:?}");
            assert!(rel(simpson, gl) < 1e-9, "{cq:?}");
        }
        let cq = Conserved2::new(-2.0, 0.999);
        assert!(rel(period_quadrature_eta(&cq).unwrap(), period_eta(&cq).unwrap()) < 1e-9);
    }

    #[test]
    fn brake_eta_period_matches_limit() {
        let a: f64 = 0.5;
        let cq = Conserved2::new(-2.0 * a, 2.0 * a * a - 1.0);
        let t = period_eta(&cq).unwrap();
        assert!(rel(t, 2.0 * complete_k((1.0 - a) / 2.0).unwrap()) < 1e-14);
        assert!(matches!(period_xi(&cq), Err(StarkError::XiClassMismatch(XiClass::HyperbolicFixedPoints))));
    }

    #[test]
    fn degenerate_classes_are_rejected() {
        assert!(period_eta(&Conserved2::new(-1.0, 1.0)).is_err());
        assert!(period_xi(&Conserved2::new(1.0, 2.0)).is_err());
        assert!(period_quadrature_xi(&Conserved2::new(-1.0, -0.5)).is_err());
        assert!(period_quadrature_eta(&Conserved2::new(-1.0, 1.0)).is_err());
    }

    #[test]
    fn analytic_solutions_hit_turning_points() {
        let cq = Conserved2::new(-2.0, 0.5);
        let t_xi = period_xi(&cq).unwrap();
        let t_eta = period_eta(&cq).unwrap();
        assert_eq!(analytic_xi(0.0, &cq, 0.0).unwrap(), 0.0);
        let xi1 = xi_turning_points(&cq).unwrap().low_sq.sqrt();
        assert!((analytic_xi(0.25 * t_xi, &cq, 0.0).unwrap() - xi1).abs() < 1e-12);
        let eta1 = eta_turning_points(&cq).unwrap().low_sq.sqrt();
        assert!((analytic_eta(0.0, &cq, 0.0).unwrap() - eta1).abs() < 1e-15);
        assert!((analytic_eta(0.5 * t_eta, &cq, 0.0).unwrap() + eta1).abs() < 1e-12);
    }

    #[test]
    fn analytic_solutions_satisfy_first_order_equations() {
        let cq = Conserved2::new(-2.0, 0.5);
        let h = 1e-5;
        let fd = |f: &dyn Fn(f64) -> f64, t: f64| (f(t + h) - f(t - h)) / (2.0 * h);
        let xi = |t: f64| analytic_xi(t, &cq, 0.0).unwrap();
        let d = fd(&xi, 0.3);
        assert!((d - cq.xi_radicand(xi(0.3)).sqrt()).abs() < 1e-6);
        let eta = |t: f64| analytic_eta(t, &cq, 0.0).unwrap();
        let d = fd(&eta, 0.2);
        // η decreases from its maximum
        assert!((d + cq.eta_radicand(eta(0.2)).sqrt()).abs() < 1e-6);
        for k in 0..100 {
            let t = 0.037 * k as f64 - 1.3;
            let (x, xp) = analytic_xi_state(t, &cq, 0.1).unwrap();
            assert!((xp * xp - cq.xi_radicand(x)).abs() < 1e-12);
            let (e, ep) = analytic_eta_state(t, &cq, 0.1).unwrap();
            assert!((ep * ep - cq.eta_radicand(e)).abs() < 1e-12);
        }
    }
}
