//! Planar Stark problem with unit field strength along +x:
//!
//! ```text
//! ẍ = −x/r³ + 1,   ÿ = −y/r³
//! ```
//!
//! In parabolic coordinates `ξ² = r + x`, `η² = r − x`, `dt = (ξ² + η²) dτ`
//! the motion separates into two anharmonic oscillators
//!
//! ```text
//! ξ′² =  ξ⁴ + 2Hξ² + 2(c + 1)
//! η′² = −η⁴ + 2Hη² − 2(c − 1)
//! ```
//!
//! so the pair of first integrals `(H, c)` fixes both invariant curves.
//! A different field strength ε reduces to this case by the scaling
//! `q → λq`, `t → λ^{3/2} t`, `ε → ε/λ²`.

mod classify;
mod periods;

use serde::Serialize;

use crate::error::{domain, Result, StarkError};

pub use classify::{classify_eta, classify_orbit, classify_state, classify_xi, EtaClass, OrbitKind, OrbitSummary, XiClass};
pub use periods::{
    analytic_eta, analytic_eta_state, analytic_xi, analytic_xi_state, period_eta, period_pair,
    period_quadrature_eta, period_quadrature_eta_with, period_quadrature_xi,
    period_quadrature_xi_with, period_xi, PeriodPair, QuadratureScheme,
};

/// Tolerance for deciding that `(H, c)` sits on a classification boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CartesianState2 {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl CartesianState2 {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64) -> Self {
        Self { x, y, vx, vy }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Energy `H` and separation constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conserved2 {
    pub h: f64,
    pub c: f64,
}

impl Conserved2 {
    pub fn new(h: f64, c: f64) -> Self {
        Self { h, c }
    }

    /// `Δ_ξ = (2H)² − 8(c + 1)`, the discriminant of the ξ-quadratic in ξ².
    pub fn delta_xi(&self) -> f64 {
        4.0 * self.h * self.h - 8.0 * (self.c + 1.0)
    }

    /// `Δ_η = (2H)² − 8(c − 1) = Δ_ξ + 16`.
    pub fn delta_eta(&self) -> f64 {
        4.0 * self.h * self.h - 8.0 * (self.c - 1.0)
    }

    /// Right-hand side of `ξ′² = ξ⁴ + 2Hξ² + 2(c + 1)`.
    pub fn xi_radicand(&self, xi: f64) -> f64 {
        let s = xi * xi;
        s * s + 2.0 * self.h * s + 2.0 * (self.c + 1.0)
    }

    /// Right-hand side of `η′² = −η⁴ + 2Hη² − 2(c − 1)`.
    pub fn eta_radicand(&self, eta: f64) -> f64 {
        let s = eta * eta;
        -s * s + 2.0 * self.h * s - 2.0 * (self.c - 1.0)
    }
}

/// Squared turning points of one separated coordinate.
///
/// For ξ these are the two positive roots `ξ₁² ≤ ξ₂²` of `s² + 2Hs + 2(c+1)`.
/// For η, `low_sq = η₁²` is the positive root of `−s² + 2Hs − 2(c−1)` and
/// `high_sq = η₂²` the magnitude of its negative root; the ordering
/// `η₁² ≤ η₂²` only holds for `H ≤ 0` since `η₁² − η₂² = 2H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningPoints2 {
    pub low_sq: f64,
    pub high_sq: f64,
}

/// `(H, c)` of an arbitrary Cartesian state; `c` comes from the
/// Laplace–Runge–Lenz component along the field,
/// `−c = ẏ(xẏ − yẋ) − x/r + y²/2`.
pub fn conserved_from_state(s: &CartesianState2) -> Result<Conserved2> {
    let r = s.radius();
    if !(r > 0.0) {
        return Err(StarkError::Singularity("state at the attracting centre".into()));
    }
    let h = 0.5 * (s.vx * s.vx + s.vy * s.vy) - 1.0 / r - s.x;
    let c = -(s.vy * (s.x * s.vy - s.y * s.vx) - s.x / r + 0.5 * s.y * s.y);
    Ok(Conserved2 { h, c })
}

/// Launch from `(a, 0)` with velocity `(0, b)`: `H = b²/2 − 1/a − a`, `c = 1 − ab²`.
pub fn conserved_from_axis_launch(a: f64, b: f64) -> Result<Conserved2> {
    if !(a > 0.0 && a <= 1.0) {
        return domain(format!("launch abscissa must lie in (0, 1], got {a}"));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return domain(format!("launch speed must be finite and non-negative, got {b}"));
    }
    Ok(Conserved2 { h: 0.5 * b * b - 1.0 / a - a, c: 1.0 - a * b * b })
}

/// Release from rest at `(a′, d)`: `H = −1/r − a′`, `c = a′/r − d²/2` with `r = √(a′² + d²)`.
pub fn conserved_from_rest(a_prime: f64, d: f64) -> Result<Conserved2> {
    let r = a_prime.hypot(d);
    if !(r > 0.0) || !r.is_finite() {
        return Err(StarkError::Singularity(format!("release point ({a_prime}, {d}) at the centre")));
    }
    Ok(Conserved2 { h: -1.0 / r - a_prime, c: a_prime / r - 0.5 * d * d })
}

/// `(ξ₁², ξ₂²) = (−H ∓ √(H² − 2(c+1)))`, both non-negative.
///
/// The small root is formed from the product of roots to avoid cancellation
/// when `|H|` is large.
pub fn xi_turning_points(cq: &Conserved2) -> Result<TurningPoints2> {
    let disc = cq.h * cq.h - 2.0 * (cq.c + 1.0);
    if disc < -BOUNDARY_TOL {
        return Err(StarkError::NoRealRoots(4.0 * disc));
    }
    let root = disc.max(0.0).sqrt();
    let high_sq = -cq.h + root;
    if cq.h > BOUNDARY_TOL || high_sq <= 0.0 {
        return domain(format!("no bounded xi oscillation for H = {}, c = {}", cq.h, cq.c));
    }
    let mut low_sq = 2.0 * (cq.c + 1.0) / high_sq;
    if low_sq < -BOUNDARY_TOL {
        return domain(format!("no bounded xi oscillation for c = {} < -1", cq.c));
    }
    low_sq = low_sq.clamp(0.0, high_sq);
    Ok(TurningPoints2 { low_sq, high_sq })
}

/// `η₁² = H + √(H² − 2(c−1))`, `η₂² = √(H² − 2(c−1)) − H`.
pub fn eta_turning_points(cq: &Conserved2) -> Result<TurningPoints2> {
    let disc = cq.h * cq.h - 2.0 * (cq.c - 1.0);
    if disc < -BOUNDARY_TOL {
        return Err(StarkError::NoRealRoots(4.0 * disc));
    }
    if cq.c > 1.0 + BOUNDARY_TOL {
        return domain(format!("eta motion does not reach the axis for c = {} > 1", cq.c));
    }
    let root = disc.max(0.0).sqrt();
    let product = (2.0 * (1.0 - cq.c)).max(0.0);
    let (low_sq, high_sq) = if cq.h >= 0.0 {
        let low = cq.h + root;
        let high = if low > 0.0 { product / low } else { 0.0 };
        (low, high)
    } else {
        let high = root - cq.h;
        (product / high, high)
    };
    Ok(TurningPoints2 { low_sq, high_sq })
}
