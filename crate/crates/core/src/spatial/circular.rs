use serde::Serialize;

use super::{l_max_sq, Conserved3};
use crate::error::{domain, Result, StarkError};
use crate::roots::monotone_root;

/// `3^{−3/2}`: circular orbits below this height are stable.
pub const Z_STABILITY: f64 = 0.192_450_089_729_875_25;

/// Uniform circular motion at height `z` where the vertical pull of the
/// centre balances the field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircularOrbit {
    pub z: f64,
    /// Cylindrical radius `√(z^{2/3} − z²)`.
    pub r: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub h: f64,
    pub c: f64,
    /// Angular rate `z^{−1/2}` in physical time.
    pub omega: f64,
    pub stable: bool,
}

impl CircularOrbit {
    pub fn conserved(&self) -> Conserved3 {
        Conserved3::new(self.h, self.c, self.l)
    }

    /// `(ξ², η²) = (|q| + z, |q| − z)` with `|q| = z^{1/3}`.
    pub fn parabolic_squares(&self) -> (f64, f64) {
        let q = self.z.cbrt();
        (q + self.z, q - self.z)
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }
}

fn angular_momentum_at(z: f64) -> f64 {
    z.powf(1.0 / 6.0) - z.powf(1.5)
}

pub fn circular_from_z(z: f64) -> Result<CircularOrbit> {
    if !(z > 0.0 && z < 1.0) {
        return domain(format!("circular orbits need z in (0, 1), got {z}"));
    }
    let q = z.cbrt();
    let l = angular_momentum_at(z);
    let u = q + z;
    Ok(CircularOrbit {
        z,
        r: (q * q - z * z).sqrt(),
        l,
        h: -0.5 / q - 1.5 * z,
        c: 0.5 * u * u + l * l / u - 1.0,
        omega: z.powf(-0.5),
        stable: z < Z_STABILITY,
    })
}

/// The circular orbits with angular momentum `L`: stable (lower z) first.
pub fn circular_from_l(l: f64) -> Result<Vec<CircularOrbit>> {
    if l == 0.0 || !l.is_finite() {
        return Err(StarkError::ZeroAngularMomentum);
    }
    let target = l.abs();
    let lmax = l_max_sq();
    let with_sign = |mut o: CircularOrbit| {
        o.l = o.l.copysign(l);
        o
    };
    if (target * target - lmax).abs() <= 1e-12 * lmax {
        return Ok(vec![with_sign(circular_from_z(Z_STABILITY)?)]);
    }
    if target * target > lmax {
        return Err(StarkError::NoSolution(format!(
            "L^2 = {} exceeds (16/27)^(3/2) = {lmax}: no circular orbit",
            target * target
        )));
    }
    // lower branch in log z, where L ≈ z^{1/6}
    let lower = |x: f64| Ok(angular_momentum_at(x.exp()) - target);
    let (x_lo, x_hi) = (6.0 * target.ln() - 1.0, Z_STABILITY.ln());
    let x = monotone_root(lower, x_lo, x_hi, lower(x_lo)?, lower(x_hi)?)?;
    let upper = |z: f64| Ok(target - angular_momentum_at(z));
    let z2 = monotone_root(upper, Z_STABILITY, 1.0, upper(Z_STABILITY)?, upper(1.0)?)?;
    Ok(vec![with_sign(circular_from_z(x.exp())?), with_sign(circular_from_z(z2)?)])
}

#[cfg(test)]
mod tests {
    use super::super::{c_eta, critical_energies, f_roots, g_roots};
    use super::*;

    #[test]
    fn reference_orbit_at_one_eighth() {
        let o = circular_from_z(0.125).unwrap();
        assert!((o.r - 15f64.sqrt() / 8.0).abs() < 1e-15);
        assert!((o.l - (2f64.powf(-0.5) - 2f64.powf(-4.5))).abs() < 1e-15);
        assert!((o.h + 1.1875).abs() < 1e-15);
        assert!(o.stable);
        assert!((o.r * o.r + o.z * o.z - o.z.powf(2.0 / 3.0)).abs() < 1e-12);
        // both cubics have a double root at the orbit
        let (u, v) = o.parabolic_squares();
        assert!((u - 0.625).abs() < 1e-15 && (v - 0.375).abs() < 1e-15);
        let cq = o.conserved();
        assert!(cq.f(u).abs() < 1e-13 && cq.g(v).abs() < 1e-13);
        let fd = |p: &dyn Fn(f64) -> f64, x: f64| (p(x + 1e-6) - p(x - 1e-6)) / 2e-6;
        assert!(fd(&|x| cq.f(x), u).abs() < 1e-8);
        assert!(fd(&|x| cq.g(x), v).abs() < 1e-8);
    }

    #[test]
    fn force_balance() {
        for z in [0.05, 0.125, 0.3, 0.7] {
            let o = circular_from_z(z).unwrap();
            let q3 = (o.r * o.r + z * z).powf(1.5);
            // vertical: z/|q|³ = 1; horizontal: ω² r = r/|q|³
            assert!((z / q3 - 1.0).abs() < 1e-12);
            assert!((o.omega * o.omega - 1.0 / q3).abs() < 1e-12);
            assert!((o.l - o.r * o.r * o.omega).abs() < 1e-12);
        }
    }

    #[test]
    fn stability_switch_and_limits() {
        assert!((Z_STABILITY - 3f64.powf(-1.5)).abs() < 1e-16);
        assert!(circular_from_z(Z_STABILITY - 1e-10).unwrap().stable);
        assert!(!circular_from_z(Z_STABILITY + 1e-10).unwrap().stable);
        let top = circular_from_z(Z_STABILITY).unwrap();
        assert!((top.l * top.l - l_max_sq()).abs() < 1e-14);
        let end = circular_from_z(1.0 - 1e-9).unwrap();
        assert!(end.r < 1e-4 && end.l < 1e-8 && (end.h + 2.0).abs() < 1e-8);
        assert!(circular_from_z(1.0).is_err() && circular_from_z(0.0).is_err());
    }

    #[test]
    fn inversion_matches_critical_energies() {
        let orbits = circular_from_l(0.45).unwrap();
        assert_eq!(orbits.len(), 2);
        let ce = critical_energies(0.45).unwrap();
        assert!((orbits[0].h - ce.h1).abs() < 1e-8);
        assert!((orbits[1].h - ce.h2).abs() < 1e-8);
        assert!(orbits[0].h < orbits[1].h && orbits[0].stable && !orbits[1].stable);
        for o in &orbits {
            assert!((o.l - 0.45).abs() < 1e-13);
            assert!((o.c - c_eta(o.h, o.l).unwrap()).abs() < 1e-9);
            let f = f_roots(&o.conserved());
            let g = g_roots(&o.conserved());
            assert!(f.discriminant.abs() < 1e-9 && g.discriminant.abs() < 1e-9);
        }
        assert_eq!(circular_from_l(l_max_sq().sqrt()).unwrap().len(), 1);
        assert!(matches!(circular_from_l(0.9), Err(StarkError::NoSolution(_))));
        let tiny = circular_from_l(1e-3).unwrap();
        assert!((tiny[0].l - 1e-3).abs() < 1e-15 && (tiny[1].l - 1e-3).abs() < 1e-15);
    }
}
