use std::f64::consts::FRAC_PI_2;

use super::{f_roots, g_roots, Conserved3, CubicTriple};
use crate::elliptic::complete_k;
use crate::error::{Result, StarkError};
use crate::planar::PeriodPair;
use crate::quad::integrate_gauss_legendre;

/// Relative separation below which two roots count as a double root.
const DISTINCT_TOL: f64 = 1e-9;

fn xi_band(cq: &Conserved3) -> Result<CubicTriple> {
    cq.require_l()?;
    let t = f_roots(cq);
    if t.count != 3 || !(t.u1 > 0.0) {
        return Err(StarkError::RootPattern(format!("f has no positive root triple: {t:?}")));
    }
    if t.u2 - t.u1 <= DISTINCT_TOL * t.u3 || t.u3 - t.u2 <= DISTINCT_TOL * t.u3 {
        return Err(StarkError::RootPattern(format!("f has a double root, xi is at a fixed point: {t:?}")));
    }
    Ok(t)
}

fn eta_band(cq: &Conserved3) -> Result<CubicTriple> {
    cq.require_l()?;
    let t = g_roots(cq);
    if t.count != 3 || !(t.u1 < 0.0 && t.u2 > 0.0) {
        return Err(StarkError::RootPattern(format!("g admits no bounded eta motion: {t:?}")));
    }
    if t.u3 - t.u2 <= DISTINCT_TOL * t.u3 {
        return Err(StarkError::RootPattern(format!("g has a double root, eta is at a fixed point: {t:?}")));
    }
    Ok(t)
}

/// `T_ξ = 2K((u₂ − u₁)/(u₃ − u₁))/√(u₃ − u₁)` over the band `u ∈ [u₁, u₂]`.
pub fn period_xi3(cq: &Conserved3) -> Result<f64> {
    let t = xi_band(cq)?;
    let w = t.u3 - t.u1;
    Ok(2.0 * complete_k((t.u2 - t.u1) / w)? / w.sqrt())
}

/// `T_η = 2K((v₃ − v₂)/(v₃ − v₁))/√(v₃ − v₁)` over the band `v ∈ [v₂, v₃]`.
pub fn period_eta3(cq: &Conserved3) -> Result<f64> {
    let t = eta_band(cq)?;
    let w = t.u3 - t.u1;
    Ok(2.0 * complete_k((t.u3 - t.u2) / w)? / w.sqrt())
}

pub fn spatial_period_pair(cq: &Conserved3) -> Result<PeriodPair> {
    let t_xi = period_xi3(cq)?;
    let t_eta = period_eta3(cq)?;
    Ok(PeriodPair { t_xi, t_eta, ratio: t_xi / t_eta })
}

const QUAD_TOL: f64 = 1e-13;

/// `T_ξ = ∫_{u₁}^{u₂} du/√f(u)` by quadrature, with `u = u₁ + (u₂ − u₁) sin²θ`.
///
/// Dividing `f` by its two band roots leaves the linear factor
/// `u + u₁ + u₂ + 2h`, read from the cubic's coefficients; the third root
/// is never used.
pub fn period_quadrature_xi3(cq: &Conserved3) -> Result<f64> {
    let t = xi_band(cq)?;
    let (u1, u2) = (t.u1, t.u2);
    let a2 = 2.0 * cq.h;
    let f = |th: f64| {
        let s = th.sin();
        let u = u1 + (u2 - u1) * s * s;
        2.0 / (-(u + u1 + u2 + a2)).sqrt()
    };
    integrate_gauss_legendre(f, 0.0, FRAC_PI_2, QUAD_TOL)
}

/// `T_η = ∫_{v₂}^{v₃} dv/√g(v)` with `v = v₂ + (v₃ − v₂) sin²θ`; the
/// remaining factor is `v − v₁ = v + v₂ + v₃ − 2h`.
pub fn period_quadrature_eta3(cq: &Conserved3) -> Result<f64> {
    let t = eta_band(cq)?;
    let (v2, v3) = (t.u2, t.u3);
    let f = |th: f64| {
        let s = th.sin();
        let v = v2 + (v3 - v2) * s * s;
        2.0 / (v + v2 + v3 - 2.0 * cq.h).sqrt()
    };
    integrate_gauss_legendre(f, 0.0, FRAC_PI_2, QUAD_TOL)
}

#[cfg(test)]
mod tests {
    use super::super::{critical_energies, SpatialCurves};
    use super::*;
    use crate::planar::{period_xi, Conserved2};
    use crate::quad::GaussLegendre;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn torus_point(l: f64) -> Conserved3 {
        let curves = SpatialCurves::new(l).unwrap();
        let ce = curves.critical.unwrap();
        let h = 0.5 * (ce.h1 + ce.h2);
        let (c1, _, c_e) = curves.curves_at(h).unwrap();
        Conserved3::new(h, 0.5 * (c1.unwrap() + c_e), l)
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let cq = torus_point(0.45);
        let a = period_xi3(&cq).unwrap();
        assert!(rel(a, period_quadrature_xi3(&cq).unwrap()) < 1e-10);
        let b = period_eta3(&cq).unwrap();
        assert!(rel(b, period_quadrature_eta3(&cq).unwrap()) < 1e-10);
    }

    #[test]
    fn quadrature_of_the_raw_integrand() {
        // ∫ ξ dξ / √f(ξ²) over [ξ₁, ξ₂], with the endpoint singularities
        // taken out by u = u₁ + (u₂−u₁) sin²θ but f evaluated directly;
        // a fixed composite rule keeps away from the roundoff at the ends
        let cq = torus_point(0.3);
        let t = f_roots(&cq);
        let g = |th: f64| {
            let (s, c) = th.sin_cos();
            let u = t.u1 + (t.u2 - t.u1) * s * s;
            let fu = cq.f(u);
            if fu <= 0.0 {
                return 0.0;
            }
            2.0 * (t.u2 - t.u1) * s * c / fu.sqrt()
        };
        let rule = GaussLegendre::new(20);
        let n = 200;
        let raw: f64 = (0..n)
            .map(|i| {
                let a = FRAC_PI_2 * i as f64 / n as f64;
                rule.apply(g, a, a + FRAC_PI_2 / n as f64)
            })
            .sum();
        assert!(rel(raw, period_xi3(&cq).unwrap()) < 1e-8);
    }

    #[test]
    fn planar_limit_halves_the_xi_period() {
        let cq = Conserved3::new(-2.0, 0.5, 1e-4);
        let planar = period_xi(&Conserved2::new(-2.0, 0.5)).unwrap();
        assert!((period_xi3(&cq).unwrap() - 0.5 * planar).abs() < 1e-5);
    }

    #[test]
    fn degenerate_patterns_are_rejected() {
        let ce = critical_energies(0.45).unwrap();
        let c2 = super::super::c2_xi(ce.h2 + 0.01, 0.45).unwrap();
        assert!(matches!(period_xi3(&Conserved3::new(ce.h2 + 0.01, c2, 0.45)), Err(StarkError::RootPattern(_))));
        assert!(period_eta3(&Conserved3::new(-1.0, 5.0, 0.45)).is_err());
        assert!(matches!(period_xi3(&Conserved3::new(-1.0, 0.0, 0.0)), Err(StarkError::ZeroAngularMomentum)));
    }
}
