//! Confirms a solved family member by integrating it to its terminal event.

use serde::Serialize;

use super::{detect_events, integrate_parabolic2, parabolic_from_cartesian2, AxisSide, Event, EventKind, ParabolicState};
use crate::error::Result;
use crate::families::{FamilyKind, FamilySolution};
use crate::planar::{period_eta, CartesianState2};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyCheck {
    pub kind: FamilyKind,
    pub k: u32,
    /// Positive-axis crossings strictly before the terminal event.
    pub positive_crossings: usize,
    /// Label of the first negative-axis event, if any was reached.
    pub terminal: Option<&'static str>,
    pub expected_terminal: &'static str,
    pub terminal_event: Option<Event>,
    /// `T_ξ/4`, where the terminal event is predicted.
    pub tau_predicted: f64,
    pub matches: bool,
}

/// Start of the symmetric orbit: `(√(2a), 0, 0, √(2(1 − c)))` for axis
/// launches, the release point at rest otherwise.
pub fn family_initial_state(sol: &FamilySolution) -> Result<ParabolicState> {
    if sol.kind.is_rest() {
        parabolic_from_cartesian2(&CartesianState2::new(sol.anchor, sol.root, 0.0, 0.0))
    } else {
        let xi = (2.0 * sol.anchor).sqrt();
        Ok(ParabolicState::new(xi, 0.0, 0.0, (2.0 * (1.0 - sol.cq.c)).sqrt()))
    }
}

/// Integrates a quarter ξ-period plus an eighth η-period and counts
/// positive-axis crossings before the first negative-axis event.
pub fn verify_family(sol: &FamilySolution, tol: f64) -> Result<FamilyCheck> {
    let p0 = family_initial_state(sol)?;
    // T_ξ from the target ratio avoids the loss of digits in (H, c) near
    // the brake stratum
    let t_eta = period_eta(&sol.cq)?;
    let quarter = 0.25 * f64::from(sol.ratio_target) * t_eta;
    let traj = integrate_parabolic2(&p0, &sol.cq, quarter + 0.125 * t_eta, tol)?;
    let events = detect_events(&traj);
    let terminal_idx = events.iter().position(|e| match e.kind {
        EventKind::NegativeAxisCrossing | EventKind::Collision => true,
        EventKind::PerpendicularCrossing => e.side == Some(AxisSide::Negative),
        _ => false,
    });
    let before = &events[..terminal_idx.unwrap_or(events.len())];
    let positive_crossings = before.iter().filter(|e| e.on_positive_axis()).count();
    let terminal_event = terminal_idx.map(|i| events[i]);
    let terminal = terminal_event.map(|e| e.label());
    let expected_terminal = if sol.kind.terminal_is_collision() { "collision" } else { "perpendicular-negative" };
    Ok(FamilyCheck {
        kind: sol.kind,
        k: sol.k,
        positive_crossings,
        terminal,
        expected_terminal,
        terminal_event,
        tau_predicted: quarter,
        matches: positive_crossings == sol.k as usize && terminal == Some(expected_terminal),
    })
}
