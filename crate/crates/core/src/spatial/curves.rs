use serde::{Serialize, Serializer};

use super::{l_max_sq, Conserved3};
use crate::error::{domain, Result, StarkError};
use crate::roots::{expand_until, monotone_root};

/// Tolerance for placing `(h, c)` on one of the critical curves.
pub const SPATIAL_TOL: f64 = 1e-10;

/// `−(3/2)L^{2/3}`, the largest energy at which ξ can oscillate.
pub fn h_top(l: f64) -> f64 {
    -1.5 * l.abs().powf(2.0 / 3.0)
}

fn check_l(l: f64) -> Result<f64> {
    if l == 0.0 || !l.is_finite() {
        Err(StarkError::ZeroAngularMomentum)
    } else {
        Ok(l.abs())
    }
}

/// Double root `u` of `f` on the requested side of `L^{2/3}`:
/// `2u + L²/u² = −2h`.
fn xi_double_root(h: f64, l: f64, outer: bool) -> Result<f64> {
    let l = check_l(l)?;
    let top = h_top(l);
    let slack = 1e-12 * top.abs();
    if h > top + slack {
        return domain(format!("xi double roots need h <= {top}, got {h}"));
    }
    if h >= top - slack {
        return Ok(l.powf(2.0 / 3.0));
    }
    let u_star = l.powf(2.0 / 3.0);
    let phi = |u: f64| 2.0 * u + l * l / (u * u) + 2.0 * h;
    if outer {
        // increasing on [u*, −h]
        let (lo, hi) = (u_star, -h);
        monotone_root(|u| Ok(phi(u)), lo, hi, phi(lo), phi(hi))
    } else {
        // decreasing on [L/√(−2h), u*]; negate to make it increasing
        let (lo, hi) = (l / (-2.0 * h).sqrt(), u_star);
        monotone_root(|u| Ok(-phi(u)), lo, hi, -phi(lo), -phi(hi))
    }
}

fn c_from_xi_double(u: f64, l: f64) -> f64 {
    0.5 * u * u + l * l / u - 1.0
}

/// `C_{1,ξ}(h)`: separation constant at which `f` has a double root
/// `u ≤ L^{2/3}` (elliptic fixed point of ξ).
pub fn c1_xi(h: f64, l: f64) -> Result<f64> {
    Ok(c_from_xi_double(xi_double_root(h, l, false)?, l))
}

/// `C_{2,ξ}(h)`: double root `u ≥ L^{2/3}` (hyperbolic fixed point of ξ).
pub fn c2_xi(h: f64, l: f64) -> Result<f64> {
    Ok(c_from_xi_double(xi_double_root(h, l, true)?, l))
}

/// `C_η(h)`: double root `v > 0` of `g`, from `2v − L²/v² = 2h`.
pub fn c_eta(h: f64, l: f64) -> Result<f64> {
    let l = check_l(l)?;
    let psi = |v: f64| Ok(2.0 * v - l * l / (v * v) - 2.0 * h);
    let mut lo = l.powf(2.0 / 3.0);
    while psi(lo)? >= 0.0 {
        lo *= 0.5;
    }
    let mut hi = l.powf(2.0 / 3.0).max(h.abs());
    while psi(hi)? <= 0.0 {
        hi *= 2.0;
    }
    let v = monotone_root(psi, lo, hi, psi(lo)?, psi(hi)?)?;
    Ok(0.5 * v * v - l * l / v + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalEnergies {
    /// Energy of the stable circular orbit, `C_{1,ξ}(h₁) = C_η(h₁)`.
    pub h1: f64,
    /// Energy of the unstable circular orbit, `C_{2,ξ}(h₂) = C_η(h₂)`.
    pub h2: f64,
    /// `−(3/2)L^{2/3}`.
    pub h_top: f64,
    pub l_max_sq: f64,
    /// True at `L² = l_max_sq` where both circular orbits merge.
    pub degenerate: bool,
}

/// `h₁ < h₂ < −(3/2)L^{2/3}` by bisection on `C_{i,ξ} − C_η`, which is
/// negative at the top energy and grows without bound as `h → −∞`.
pub fn critical_energies(l: f64) -> Result<CriticalEnergies> {
    let l = check_l(l)?;
    let lsq = l * l;
    let lmax = l_max_sq();
    let top = h_top(l);
    if (lsq - lmax).abs() <= 1e-12 * lmax {
        return Ok(CriticalEnergies { h1: top, h2: top, h_top: top, l_max_sq: lmax, degenerate: true });
    }
    if lsq > lmax {
        return Err(StarkError::NoSolution(format!(
            "L^2 = {lsq} exceeds (16/27)^(3/2) = {lmax}: no bounded orbits"
        )));
    }
    let solve = |curve: fn(f64, f64) -> Result<f64>| -> Result<f64> {
        // work in s = top − h ≥ 0 so the difference increases with s
        let diff = |s: f64| Ok(curve(top - s, l)? - c_eta(top - s, l)?);
        let d0 = diff(0.0)?;
        let (s_hi, d_hi) = expand_until(diff, 0.25 * top.abs().max(1e-3), 0.25 * top.abs().max(1e-3), true, 200)?
            .ok_or_else(|| StarkError::NoSolution("no critical energy bracket".into()))?;
        Ok(top - monotone_root(diff, 0.0, s_hi, d0, d_hi)?)
    };
    let h1 = solve(c1_xi)?;
    let h2 = solve(c2_xi)?;
    Ok(CriticalEnergies { h1, h2, h_top: top, l_max_sq: lmax, degenerate: false })
}

/// Orbit type over `(L, h, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpatialClass {
    /// `L² > (16/27)^{3/2}` or `h > −(3/2)L^{2/3}`: every orbit escapes.
    UnboundedLargeL,
    /// `L² = (16/27)^{3/2}`, `h = −(3/2)L^{2/3}`, `c = −1/9`.
    DegenerateCircular,
    /// `h ∈ (h₂, −(3/2)L^{2/3}]`, `c ∈ [C_{1,ξ}, C_{2,ξ}]`.
    OscillatoryBand,
    /// `h = h₂`, `c = C_{2,ξ}`: unstable circle plus its asymptotic orbits.
    UnstableCircularPlusAsymptotic,
    /// `h ∈ (h₁, h₂]`, `c ∈ [C_{1,ξ}, C_η]` (below `C_{2,ξ}` at `h₂`).
    CompactTorusComponent,
    /// `h = h₁`, `c = C_{1,ξ}`.
    StableCircular,
    /// Any other `(h, c)` with admissible `L`.
    UnboundedOther,
}

impl SpatialClass {
    pub fn tag(&self) -> &'static str {
        match self {
            SpatialClass::UnboundedLargeL => "Unbounded_LargeL",
            SpatialClass::DegenerateCircular => "DegenerateCircular",
            SpatialClass::OscillatoryBand => "OscillatoryBand",
            SpatialClass::UnstableCircularPlusAsymptotic => "UnstableCircularPlusAsymptotic",
            SpatialClass::CompactTorusComponent => "CompactTorusComponent",
            SpatialClass::StableCircular => "StableCircular",
            SpatialClass::UnboundedOther => "Unbounded_Other",
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, SpatialClass::UnboundedLargeL | SpatialClass::UnboundedOther)
    }
}

impl Serialize for SpatialClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

/// Critical data for one angular momentum, reused across many `(h, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialCurves {
    #[serde(rename = "L")]
    pub l: f64,
    pub h_top: f64,
    /// `None` when `L²` exceeds the maximum.
    pub critical: Option<CriticalEnergies>,
}

impl SpatialCurves {
    pub fn new(l: f64) -> Result<Self> {
        let l = check_l(l)?;
        let critical = match critical_energies(l) {
            Ok(c) => Some(c),
            Err(StarkError::NoSolution(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { l, h_top: h_top(l), critical })
    }

    /// `(C_{1,ξ}, C_{2,ξ}, C_η)` at `h`; the ξ curves are `None` above the top energy.
    pub fn curves_at(&self, h: f64) -> Result<(Option<f64>, Option<f64>, f64)> {
        let eta = c_eta(h, self.l)?;
        if h > self.h_top {
            return Ok((None, None, eta));
        }
        Ok((Some(c1_xi(h, self.l)?), Some(c2_xi(h, self.l)?), eta))
    }

    pub fn classify(&self, h: f64, c: f64) -> Result<SpatialClass> {
        let tol = SPATIAL_TOL;
        let near = |a: f64, b: f64| (a - b).abs() <= tol * (1.0 + b.abs());
        let Some(crit) = self.critical else {
            return Ok(SpatialClass::UnboundedLargeL);
        };
        if h > self.h_top && !near(h, self.h_top) {
            return Ok(SpatialClass::UnboundedLargeL);
        }
        if crit.degenerate {
            return Ok(if near(h, self.h_top) && near(c, -1.0 / 9.0) {
                SpatialClass::DegenerateCircular
            } else {
                SpatialClass::UnboundedOther
            });
        }
        let h_eval = h.min(self.h_top);
        let (c1, c2, ce) = self.curves_at(h_eval)?;
        let (c1, c2) = (c1.unwrap_or(f64::NAN), c2.unwrap_or(f64::NAN));
        let inside = |lo: f64, hi: f64| c >= lo - tol * (1.0 + lo.abs()) && c <= hi + tol * (1.0 + hi.abs());
        if near(h, crit.h1) {
            return Ok(if near(c, c1) { SpatialClass::StableCircular } else { SpatialClass::UnboundedOther });
        }
        if near(h, crit.h2) {
            if near(c, c2) {
                return Ok(SpatialClass::UnstableCircularPlusAsymptotic);
            }
            return Ok(if inside(c1, c2) { SpatialClass::CompactTorusComponent } else { SpatialClass::UnboundedOther });
        }
        if h > crit.h2 {
            return Ok(if inside(c1, c2) { SpatialClass::OscillatoryBand } else { SpatialClass::UnboundedOther });
        }
        if h > crit.h1 {
            return Ok(if inside(c1, ce) { SpatialClass::CompactTorusComponent } else { SpatialClass::UnboundedOther });
        }
        Ok(SpatialClass::UnboundedOther)
    }
}

pub fn classify_spatial(cq: &Conserved3) -> Result<SpatialClass> {
    cq.require_l()?;
    SpatialCurves::new(cq.l)?.classify(cq.h, cq.c)
}

#[cfg(test)]
mod tests {
    use super::super::{f_roots, g_roots};
    use super::*;

    #[test]
    fn curves_meet_at_top_energy() {
        for l in [0.1, 0.45, 0.6] {
            let top = h_top(l);
            let want = 1.5 * l.powf(4.0 / 3.0) - 1.0;
            assert!((c1_xi(top, l).unwrap() - want).abs() < 1e-12);
            assert!((c2_xi(top, l).unwrap() - want).abs() < 1e-12);
            let eta = 1.0 - 15.0 / 8.0 * l.powf(4.0 / 3.0);
            assert!((c_eta(top, l).unwrap() - eta).abs() < 1e-12);
        }
        assert!(c1_xi(-0.1, 0.45).is_err());
    }

    #[test]
    fn c_eta_reference_value_and_monotonicity() {
        assert!((c_eta(0.5, 1.0).unwrap() - 0.5).abs() < 1e-14);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let h = -4.0 + 0.025 * i as f64;
            let c = c_eta(h, 0.45).unwrap();
            assert!(c > prev);
            if h <= 0.0 {
                assert!(c < 1.0);
            }
            prev = c;
        }
        assert!(matches!(c_eta(-1.0, 0.0), Err(StarkError::ZeroAngularMomentum)));
    }

    #[test]
    fn sandwich_between_xi_curves() {
        for l in [0.1, 0.3, 0.45, 0.6] {
            let top = h_top(l);
            for i in 1..=100 {
                let h = top - 0.04 * i as f64;
                let c1 = c1_xi(h, l).unwrap();
                let c2 = c2_xi(h, l).unwrap();
                let mid = -h * l.powf(2.0 / 3.0) - 1.0;
                assert!(-1.0 < c1 && c1 < mid && mid < c2, "L={l} h={h}: {c1} {mid} {c2}");
            }
        }
    }

    #[test]
    fn xi_curves_are_double_roots() {
        let (l, h) = (0.45, -1.0);
        for c in [c1_xi(h, l).unwrap(), c2_xi(h, l).unwrap()] {
            let t = f_roots(&Conserved3::new(h, c, l));
            assert_eq!(t.count, 3);
            assert!(t.discriminant.abs() < 1e-9, "{t:?}");
        }
        let t = g_roots(&Conserved3::new(h, c_eta(h, l).unwrap(), l));
        assert!(t.discriminant.abs() < 1e-9);
    }

    #[test]
    fn critical_energy_ordering() {
        let ce = critical_energies(0.45).unwrap();
        assert!(ce.h1 < ce.h2 && ce.h2 < ce.h_top, "{ce:?}");
        assert!((c1_xi(ce.h1, 0.45).unwrap() - c_eta(ce.h1, 0.45).unwrap()).abs() < 1e-10);
        assert!((c2_xi(ce.h2, 0.45).unwrap() - c_eta(ce.h2, 0.45).unwrap()).abs() < 1e-10);
        let mut prev_gap = f64::INFINITY;
        for frac in [0.5, 0.9, 0.99, 0.999] {
            let ce = critical_energies((frac * l_max_sq()).sqrt()).unwrap();
            let gap = ce.h2 - ce.h1;
            assert!(gap > 0.0 && gap < prev_gap);
            prev_gap = gap;
        }
        assert!(critical_energies(0.9).is_err());
        assert!(critical_energies(l_max_sq().sqrt()).unwrap().degenerate);
    }

    #[test]
    fn classification_examples() {
        let lmax = l_max_sq().sqrt();
        let top = h_top(lmax);
        let cq = Conserved3::new(top, -1.0 / 9.0, lmax);
        assert_eq!(classify_spatial(&cq).unwrap(), SpatialClass::DegenerateCircular);
        assert_eq!(classify_spatial(&Conserved3::new(-1.5, 0.0, 0.9)).unwrap(), SpatialClass::UnboundedLargeL);
        assert_eq!(classify_spatial(&Conserved3::new(-0.1, 0.0, 0.45)).unwrap(), SpatialClass::UnboundedLargeL);

        let curves = SpatialCurves::new(0.45).unwrap();
        let ce = curves.critical.unwrap();
        let h = 0.5 * (ce.h1 + ce.h2);
        let (c1, _, ce_c) = curves.curves_at(h).unwrap();
        let c = 0.5 * (c1.unwrap() + ce_c);
        assert_eq!(curves.classify(h, c).unwrap(), SpatialClass::CompactTorusComponent);
        assert_eq!(curves.classify(ce.h1, c1_xi(ce.h1, 0.45).unwrap()).unwrap(), SpatialClass::StableCircular);
        assert_eq!(
            curves.classify(ce.h2, c2_xi(ce.h2, 0.45).unwrap()).unwrap(),
            SpatialClass::UnstableCircularPlusAsymptotic
        );
        let h = 0.5 * (ce.h2 + ce.h_top);
        let (c1, c2, _) = curves.curves_at(h).unwrap();
        let c = 0.5 * (c1.unwrap() + c2.unwrap());
        assert_eq!(curves.classify(h, c).unwrap(), SpatialClass::OscillatoryBand);
        assert_eq!(curves.classify(h, c2.unwrap() + 0.1).unwrap(), SpatialClass::UnboundedOther);
        assert_eq!(curves.classify(ce.h1 - 0.05, -0.5).unwrap(), SpatialClass::UnboundedOther);
    }

    #[test]
    fn torus_points_have_admissible_roots() {
        let curves = SpatialCurves::new(0.45).unwrap();
        let ce = curves.critical.unwrap();
        for i in 1..20 {
            let h = ce.h1 + (ce.h2 - ce.h1) * i as f64 / 20.0;
            let (c1, _, c_e) = curves.curves_at(h).unwrap();
            for j in 1..20 {
                let c = c1.unwrap() + (c_e - c1.unwrap()) * j as f64 / 20.0;
                assert_eq!(curves.classify(h, c).unwrap(), SpatialClass::CompactTorusComponent);
                let cq = Conserved3::new(h, c, 0.45);
                let f = f_roots(&cq);
                assert!(f.count == 3 && f.u1 > 0.0 && f.u1 < f.u2 && f.u2 < f.u3);
                let g = g_roots(&cq);
                assert!(g.count == 3 && g.u1 < 0.0 && 0.0 < g.u2 && g.u2 < g.u3);
            }
        }
    }
}
