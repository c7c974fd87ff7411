use std::io::{self, Write};

use super::Trajectory;

pub const CSV_COLUMNS_PLANAR: [&str; 10] = ["tau", "t", "xi", "xi_p", "eta", "eta_p", "x", "y", "H_err", "c_err"];
pub const CSV_COLUMNS_SPATIAL: [&str; 12] = ["tau", "t", "xi", "xi_p", "eta", "eta_p", "x", "y", "z", "phi", "H_err", "c_err"];

/// Writes one row per step end point. Spatial runs add `z` and `phi`.
pub fn write_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    let spatial = traj.coords().is_spatial();
    let header = if spatial { CSV_COLUMNS_SPATIAL.join(",") } else { CSV_COLUMNS_PLANAR.join(",") };
    writeln!(out, "{header}")?;
    for s in traj.samples() {
        if spatial {
            writeln!(out, "{},{},{},{},{},{},{},{},{},{},{},{}", s.tau, s.t, s.xi, s.xi_p, s.eta, s.eta_p, s.x, s.y, s.z, s.phi, s.h_err, s.c_err)?;
        } else {
            writeln!(out, "{},{},{},{},{},{},{},{},{},{}", s.tau, s.t, s.xi, s.xi_p, s.eta, s.eta_p, s.x, s.y, s.h_err, s.c_err)?;
        }
    }
    Ok(())
}
