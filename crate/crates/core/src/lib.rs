//! Periods, invariant-curve classification, periodic-orbit families and
//! numerical integration for the planar and spatial Stark problem
//! (Kepler problem plus a constant unit force along the x- or z-axis).

// `!(x < y)` is used on purpose so that NaN inputs fail the range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod families;
pub mod integrate;
pub mod error;
pub mod planar;
pub mod quad;
pub mod roots;
pub mod spatial;

pub use error::{Result, StarkError};
pub use planar::{CartesianState2, Conserved2, PeriodPair, TurningPoints2};
pub use integrate::{Event, EventKind, ParabolicState, Trajectory};
pub use spatial::{CartesianState3, Conserved3};
