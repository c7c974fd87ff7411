//! Spatial Stark problem, field along +z, with angular momentum
//! `L = xẏ − yẋ` about the field axis.
//!
//! With `ξ² = |q| + z`, `η² = |q| − z`, azimuth φ and `dt = (ξ² + η²) dτ`,
//!
//! ```text
//! ξ′² =  ξ⁴ + 2hξ² + 2(c+1) − L²/ξ² = f(u)/u,   u = ξ²
//! η′² = −η⁴ + 2hη² − 2(c−1) − L²/η² = g(v)/v,   v = η²
//! f(u) =  u³ + 2hu² + 2(c+1)u − L²
//! g(v) = −v³ + 2hv² − 2(c−1)v − L²
//! ```
//!
//! Bounded ξ-motion needs `0 < u₁ ≤ u₂ ≤ u₃` and lives on `[u₁, u₂]`;
//! bounded η-motion needs `v₁ < 0 < v₂ ≤ v₃` and lives on `[v₂, v₃]`.

mod circular;
mod cubic;
mod curves;
mod periods;

use serde::Serialize;

use crate::error::{Result, StarkError};

pub use circular::{circular_from_l, circular_from_z, CircularOrbit, Z_STABILITY};
pub use cubic::{monic_cubic_roots, CubicTriple, DOUBLE_ROOT_TOL};
pub use curves::{
    c1_xi, c2_xi, c_eta, classify_spatial, critical_energies, h_top, CriticalEnergies, SpatialClass,
    SpatialCurves, SPATIAL_TOL,
};
pub use periods::{
    period_eta3, period_quadrature_eta3, period_quadrature_xi3, period_xi3, spatial_period_pair,
};

/// `(16/27)^{3/2} = 64/(81√3)`, the largest `L²` admitting bounded motion.
pub fn l_max_sq() -> f64 {
    64.0 / (81.0 * 3f64.sqrt())
}

/// Energy `h`, separation constant `c` and angular momentum `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conserved3 {
    pub h: f64,
    pub c: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

impl Conserved3 {
    pub fn new(h: f64, c: f64, l: f64) -> Self {
        Self { h, c, l }
    }

    pub fn f(&self, u: f64) -> f64 {
        ((u + 2.0 * self.h) * u + 2.0 * (self.c + 1.0)) * u - self.l * self.l
    }

    pub fn g(&self, v: f64) -> f64 {
        ((-v + 2.0 * self.h) * v - 2.0 * (self.c - 1.0)) * v - self.l * self.l
    }

    /// `ξ′²` as a function of ξ.
    pub fn xi_radicand(&self, xi: f64) -> f64 {
        let u = xi * xi;
        self.f(u) / u
    }

    /// `η′²` as a function of η.
    pub fn eta_radicand(&self, eta: f64) -> f64 {
        let v = eta * eta;
        self.g(v) / v
    }

    pub(crate) fn require_l(&self) -> Result<()> {
        if self.l == 0.0 || !self.l.is_finite() {
            Err(StarkError::ZeroAngularMomentum)
        } else {
            Ok(())
        }
    }
}

pub fn f_roots(cq: &Conserved3) -> CubicTriple {
    monic_cubic_roots(2.0 * cq.h, 2.0 * (cq.c + 1.0), -cq.l * cq.l)
}

/// Roots of `g`, i.e. of `v³ − 2hv² + 2(c−1)v + L²`.
pub fn g_roots(cq: &Conserved3) -> CubicTriple {
    monic_cubic_roots(-2.0 * cq.h, 2.0 * (cq.c - 1.0), cq.l * cq.l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CartesianState3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

impl CartesianState3 {
    pub fn new(x: f64, y: f64, z: f64, vx: f64, vy: f64, vz: f64) -> Self {
        Self { x, y, z, vx, vy, vz }
    }

    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn angular_momentum(&self) -> f64 {
        self.x * self.vy - self.y * self.vx
    }
}

/// `(h, c, L)` of a Cartesian state off the z-axis; `c` is read off the
/// separated ξ equation.
pub fn conserved3_from_state(s: &CartesianState3) -> Result<Conserved3> {
    let r = s.radius();
    let rho_sq = s.x * s.x + s.y * s.y;
    if !(rho_sq > 0.0) {
        return Err(StarkError::Singularity("state on the field axis".into()));
    }
    let h = 0.5 * (s.vx * s.vx + s.vy * s.vy + s.vz * s.vz) - 1.0 / r - s.z;
    let l = s.angular_momentum();
    let (u, xi_p) = xi_and_derivative(s, r);
    let c = 0.5 * (xi_p * xi_p - u * u - 2.0 * h * u + l * l / u) - 1.0;
    Ok(Conserved3 { h, c, l })
}

/// `(ξ², ξ′)` with `ξ′ = ξż + (xẋ + yẏ)/ξ`.
fn xi_and_derivative(s: &CartesianState3, r: f64) -> (f64, f64) {
    let rho_sq = s.x * s.x + s.y * s.y;
    // r + z loses digits below the plane; use ρ²/(r − z) there
    let u = if s.z >= 0.0 { r + s.z } else { rho_sq / (r - s.z) };
    let xi = u.sqrt();
    (u, xi * s.vz + (s.x * s.vx + s.y * s.vy) / xi)
}
