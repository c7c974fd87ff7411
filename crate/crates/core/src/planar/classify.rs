use serde::{Serialize, Serializer};

use super::{
    conserved_from_state, eta_turning_points, xi_turning_points, CartesianState2, Conserved2,
    BOUNDARY_TOL,
};
use crate::error::Result;

/// Invariant-curve type in the `(ξ, ξ′)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XiClass {
    /// H < 0, Δ_ξ < 0: only unbounded curves, no real turning point.
    UnboundedOnlyNoRealTurning,
    /// H < 0, Δ_ξ = 0: two hyperbolic fixed points joined by heteroclinics.
    HyperbolicFixedPoints,
    /// H < 0, Δ_ξ > 0, c > −1: a periodic oval plus unbounded branches.
    PeriodicPlusUnbounded,
    /// H < 0, c = −1: the oval has shrunk onto ξ = 0.
    DegenerateAtOriginHneg,
    /// H = 0, c = −1.
    DegenerateAtOriginHzero,
    /// H > 0, c = −1.
    DegenerateAtOriginHpos,
    /// H ≥ 0, c > −1.
    UnboundedOnlyCPos,
    /// c < −1.
    UnboundedOnlyCLtMinus1,
}

/// Invariant-curve type in the `(η, η′)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EtaClass {
    /// H > 0, c < 1.
    PeriodicOvalHpos,
    /// H > 0, c = 1: figure eight through a saddle at the origin.
    HomoclinicFigure,
    /// H > 0, c > 1, Δ_η > 0: two ovals off the axis.
    TwoOvals,
    /// H > 0, c > 1, Δ_η = 0: the two ovals shrink to fixed points.
    DegeneratePair,
    /// H ≤ 0, c < 1.
    PeriodicOvalHneg,
    /// H ≤ 0, c = 1: η ≡ 0.
    FixedPointOriginHneg,
    /// No real η-motion at all.
    Empty,
}

impl XiClass {
    pub fn tag(&self) -> &'static str {
        match self {
            XiClass::UnboundedOnlyNoRealTurning => "UnboundedOnly_NoRealTurning",
            XiClass::HyperbolicFixedPoints => "HyperbolicFixedPoints",
            XiClass::PeriodicPlusUnbounded => "PeriodicPlusUnbounded",
            XiClass::DegenerateAtOriginHneg => "DegenerateAtOrigin_Hneg",
            XiClass::DegenerateAtOriginHzero => "DegenerateAtOrigin_Hzero",
            XiClass::DegenerateAtOriginHpos => "DegenerateAtOrigin_Hpos",
            XiClass::UnboundedOnlyCPos => "UnboundedOnly_cPos",
            XiClass::UnboundedOnlyCLtMinus1 => "UnboundedOnly_cLtMinus1",
        }
    }

    pub fn has_oval(&self) -> bool {
        matches!(self, XiClass::PeriodicPlusUnbounded)
    }
}

impl EtaClass {
    pub fn tag(&self) -> &'static str {
        match self {
            EtaClass::PeriodicOvalHpos => "PeriodicOval_Hpos",
            EtaClass::HomoclinicFigure => "HomoclinicFigure",
            EtaClass::TwoOvals => "TwoOvals",
            EtaClass::DegeneratePair => "DegeneratePair",
            EtaClass::PeriodicOvalHneg => "PeriodicOval_Hneg",
            EtaClass::FixedPointOriginHneg => "FixedPointOrigin_Hneg",
            EtaClass::Empty => "Empty",
        }
    }

    pub fn has_oval(&self) -> bool {
        matches!(self, EtaClass::PeriodicOvalHpos | EtaClass::PeriodicOvalHneg)
    }
}

macro_rules! serialize_as_tag {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.tag())
            }
        }
    )*};
}
serialize_as_tag!(XiClass, EtaClass, OrbitKind);

pub fn classify_xi(cq: &Conserved2) -> XiClass {
    let tol = BOUNDARY_TOL;
    let cp1 = cq.c + 1.0;
    if cp1 < -tol {
        return XiClass::UnboundedOnlyCLtMinus1;
    }
    if cp1 <= tol {
        return if cq.h < -tol {
            XiClass::DegenerateAtOriginHneg
        } else if cq.h <= tol {
            XiClass::DegenerateAtOriginHzero
        } else {
            XiClass::DegenerateAtOriginHpos
        };
    }
    if cq.h >= -tol {
        return XiClass::UnboundedOnlyCPos;
    }
    let delta = cq.delta_xi();
    if delta < -tol {
        XiClass::UnboundedOnlyNoRealTurning
    } else if delta <= tol {
        XiClass::HyperbolicFixedPoints
    } else {
        XiClass::PeriodicPlusUnbounded
    }
}

/// The `H > 0, c > 1` cases follow the root pattern of `−s² + 2Hs − 2(c−1)`:
/// two positive roots when `Δ_η > 0`, a double root when `Δ_η = 0`.
pub fn classify_eta(cq: &Conserved2) -> EtaClass {
    let tol = BOUNDARY_TOL;
    let cm1 = cq.c - 1.0;
    if cq.h <= tol {
        return if cm1 < -tol {
            EtaClass::PeriodicOvalHneg
        } else if cm1 <= tol {
            EtaClass::FixedPointOriginHneg
        } else {
            EtaClass::Empty
        };
    }
    if cm1 < -tol {
        return EtaClass::PeriodicOvalHpos;
    }
    if cm1 <= tol {
        return EtaClass::HomoclinicFigure;
    }
    let delta = cq.delta_eta();
    if delta > tol {
        EtaClass::TwoOvals
    } else if delta >= -tol {
        EtaClass::DegeneratePair
    } else {
        EtaClass::Empty
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitKind {
    /// No bounded motion with these constants.
    Unbounded,
    /// The rest point (1, 0).
    Equilibrium,
    /// Rectilinear fall into the centre along the negative x-axis (c = −1).
    NegativeAxisCollisionEjection,
    /// Rectilinear oscillation through the centre along the positive x-axis
    /// (c = 1, H < −2, η ≡ 0).
    PositiveAxisCollisionEjection,
    /// ξ at a hyperbolic fixed point: a brake orbit.
    BrakeOrbit,
    /// ξ on a heteroclinic connection: asymptotic to the brake orbit.
    HeteroclinicToBrake,
    /// ξ and η both oscillate.
    BoundedTorus,
}

impl OrbitKind {
    pub fn tag(&self) -> &'static str {
        match self {
            OrbitKind::Unbounded => "Unbounded",
            OrbitKind::Equilibrium => "Equilibrium",
            OrbitKind::NegativeAxisCollisionEjection => "NegativeAxisCollisionEjection",
            OrbitKind::PositiveAxisCollisionEjection => "PositiveAxisCollisionEjection",
            OrbitKind::BrakeOrbit => "BrakeOrbit",
            OrbitKind::HeteroclinicToBrake => "HeteroclinicToBrake",
            OrbitKind::BoundedTorus => "BoundedTorus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitSummary {
    pub kind: OrbitKind,
    /// Upper bound on `r` over the bounded component, `(ξ₁² + η₁²)/2`.
    pub radius_bound: Option<f64>,
    /// False when the η equation has no real solution, i.e. no motion at all.
    pub realizable: bool,
}

/// Describes the bounded component carried by `(H, c)`, if any.
///
/// On the brake stratum the same constants also carry heteroclinic and
/// unbounded motions; `classify_state` tells them apart.
pub fn classify_orbit(cq: &Conserved2) -> OrbitSummary {
    let tol = BOUNDARY_TOL;
    let eta_class = classify_eta(cq);
    let unbounded = |realizable| OrbitSummary { kind: OrbitKind::Unbounded, radius_bound: None, realizable };
    if eta_class == EtaClass::Empty {
        return unbounded(false);
    }
    if (cq.h + 2.0).abs() <= tol && (cq.c - 1.0).abs() <= tol {
        return OrbitSummary { kind: OrbitKind::Equilibrium, radius_bound: Some(1.0), realizable: true };
    }
    let eta_low = eta_turning_points(cq).map(|tp| tp.low_sq).ok();
    match classify_xi(cq) {
        XiClass::DegenerateAtOriginHneg | XiClass::DegenerateAtOriginHzero | XiClass::DegenerateAtOriginHpos => {
            OrbitSummary {
                kind: OrbitKind::NegativeAxisCollisionEjection,
                radius_bound: eta_low.map(|e| 0.5 * e),
                realizable: true,
            }
        }
        XiClass::HyperbolicFixedPoints if eta_class.has_oval() => {
            let bound = xi_turning_points(cq).ok().zip(eta_low).map(|(x, e)| 0.5 * (x.low_sq + e));
            OrbitSummary { kind: OrbitKind::BrakeOrbit, radius_bound: bound, realizable: true }
        }
        XiClass::PeriodicPlusUnbounded => {
            let xi_low = xi_turning_points(cq).map(|tp| tp.low_sq).ok();
            match eta_class {
                EtaClass::PeriodicOvalHneg | EtaClass::PeriodicOvalHpos => OrbitSummary {
                    kind: OrbitKind::BoundedTorus,
                    radius_bound: xi_low.zip(eta_low).map(|(x, e)| 0.5 * (x + e)),
                    realizable: true,
                },
                EtaClass::FixedPointOriginHneg => OrbitSummary {
                    kind: OrbitKind::PositiveAxisCollisionEjection,
                    radius_bound: xi_low.map(|x| 0.5 * x),
                    realizable: true,
                },
                _ => unbounded(true),
            }
        }
        _ => unbounded(true),
    }
}

/// Like [`classify_orbit`] but decides which invariant component the given
/// state lies on, using `ξ² = r + x` against the ξ turning points.
pub fn classify_state(s: &CartesianState2) -> Result<OrbitSummary> {
    let cq = conserved_from_state(s)?;
    let summary = classify_orbit(&cq);
    let xi_sq = s.radius() + s.x;
    let rel = 1e-9;
    let outer = OrbitSummary { kind: OrbitKind::Unbounded, radius_bound: None, realizable: true };
    let resolved = match summary.kind {
        OrbitKind::BoundedTorus | OrbitKind::PositiveAxisCollisionEjection => {
            let tp = xi_turning_points(&cq)?;
            if xi_sq <= tp.low_sq * (1.0 + rel) + rel {
                summary
            } else {
                outer
            }
        }
        OrbitKind::BrakeOrbit => {
            let tp = xi_turning_points(&cq)?;
            let fixed = tp.low_sq;
            if (xi_sq - fixed).abs() <= rel * fixed.max(1.0) {
                summary
            } else if xi_sq < fixed {
                OrbitSummary { kind: OrbitKind::HeteroclinicToBrake, ..summary }
            } else {
                outer
            }
        }
        OrbitKind::NegativeAxisCollisionEjection => {
            if xi_sq <= rel {
                summary
            } else {
                outer
            }
        }
        _ => summary,
    };
    Ok(resolved)
}
