//! Trajectory integration with CSV export and an event summary.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use stark_core::families::brake_orbit_params;
use stark_core::integrate::{
    conserved2_of, conserved3_of, detect_events_with, integrate_cartesian2_with, integrate_cartesian3_with,
    integrate_parabolic2_with, integrate_parabolic3_with, parabolic_from_cartesian2, parabolic_from_cartesian3, write_csv,
    IntegrateOptions, Termination, DEFAULT_EVENT_WINDOW, DEFAULT_R_MAX, DEFAULT_R_MIN, DEFAULT_TOL,
};
use stark_core::planar::period_eta;
use stark_core::{CartesianState2, CartesianState3, ParabolicState, Trajectory};

use crate::error::{usage, CliError};
use crate::output::{document, num};
use crate::planar::brake_start;
use crate::{CmdResult, Report};

/// Physical times at which `--compare` evaluates both runs.
const COMPARE_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoordsArg {
    Cartesian,
    Parabolic,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct IntegrateArgs {
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    y0: Option<f64>,
    /// Height above the plane; giving --z0 or --vz0 makes the run spatial.
    #[arg(long)]
    z0: Option<f64>,
    #[arg(long)]
    vx0: Option<f64>,
    #[arg(long)]
    vy0: Option<f64>,
    #[arg(long)]
    vz0: Option<f64>,
    /// Launch from (a, 0) with velocity (0, b).
    #[arg(long, requires = "b")]
    a: Option<f64>,
    #[arg(long, requires = "a")]
    b: Option<f64>,
    /// Start on the brake orbit launched from (A, 0).
    #[arg(long, value_name = "A")]
    brake: Option<f64>,
    #[arg(long, value_enum, default_value = "parabolic")]
    coords: CoordsArg,
    /// End of the run in physical time.
    #[arg(long, group = "span")]
    t_end: Option<f64>,
    /// End of the run in fictitious time (parabolic runs only).
    #[arg(long, group = "span")]
    tau_end: Option<f64>,
    /// Number of brake-orbit periods (with --brake only).
    #[arg(long, group = "span", requires = "brake")]
    periods: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Cartesian runs abort below this distance from the centre.
    #[arg(long, default_value_t = DEFAULT_R_MIN)]
    r_min: f64,
    /// Runs stop as escaped beyond this distance.
    #[arg(long, default_value_t = DEFAULT_R_MAX)]
    r_max: f64,
    /// Simultaneity window for brake and collision events.
    #[arg(long, default_value_t = DEFAULT_EVENT_WINDOW)]
    event_window: f64,
    /// Also integrate in the other coordinates and report the largest
    /// position difference at matched physical times.
    #[arg(long)]
    compare: bool,
    /// Trajectory CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Start {
    Planar { s: CartesianState2, p: ParabolicState },
    Spatial { s: CartesianState3, p: ParabolicState, l: f64 },
}

impl IntegrateArgs {
    fn options(&self) -> IntegrateOptions {
        IntegrateOptions {
            r_min: self.r_min,
            r_max: self.r_max,
            event_window: self.event_window,
            ..IntegrateOptions::with_tol(self.tol)
        }
    }

    fn start(&self) -> Result<Start, CliError> {
        let state = [self.x0, self.y0, self.vx0, self.vy0];
        let spatial = self.z0.is_some() || self.vz0.is_some();
        let given_state = state.iter().any(Option::is_some) || spatial;
        let forms = [given_state, self.a.is_some(), self.brake.is_some()].iter().filter(|&&b| b).count();
        if forms != 1 {
            return usage("give exactly one of a state (--x0 --y0 --vx0 --vy0 [--z0 --vz0]), --a/--b or --brake");
        }
        if let Some(a) = self.brake {
            let params = brake_orbit_params(a)?;
            let (p, _) = brake_start(a)?;
            return Ok(Start::Planar { s: CartesianState2::new(a, 0.0, 0.0, params.b_star), p });
        }
        if let (Some(a), Some(b)) = (self.a, self.b) {
            let s = CartesianState2::new(a, 0.0, 0.0, b);
            return Ok(Start::Planar { s, p: parabolic_from_cartesian2(&s)? });
        }
        let [Some(x), Some(y), Some(vx), Some(vy)] = state else {
            return usage("a state needs all of --x0 --y0 --vx0 --vy0");
        };
        if spatial {
            let s = CartesianState3::new(x, y, self.z0.unwrap_or(0.0), vx, vy, self.vz0.unwrap_or(0.0));
            return Ok(Start::Spatial { s, p: parabolic_from_cartesian3(&s)?, l: s.angular_momentum() });
        }
        let s = CartesianState2::new(x, y, vx, vy);
        Ok(Start::Planar { s, p: parabolic_from_cartesian2(&s)? })
    }
}

/// Integrates in parabolic coordinates up to `tau_end`.
fn run_parabolic(start: &Start, tau_end: f64, opts: &IntegrateOptions) -> Result<Trajectory, CliError> {
    Ok(match start {
        Start::Planar { p, .. } => integrate_parabolic2_with(p, &conserved2_of(p)?, tau_end, opts)?,
        Start::Spatial { p, l, .. } => integrate_parabolic3_with(p, &conserved3_of(p, *l)?, tau_end, opts)?,
    })
}

/// Parabolic run ending at physical time `t_end`: grows the τ span until it
/// covers `t_end`, then bisects `t(τ) = t_end` and reruns to that τ.
fn run_parabolic_to_time(start: &Start, t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory, CliError> {
    let r0 = match start {
        Start::Planar { s, .. } => s.radius(),
        Start::Spatial { s, .. } => s.radius(),
    };
    let mut tau = t_end / (2.0 * r0.max(1e-3));
    for _ in 0..60 {
        let traj = run_parabolic(start, tau, opts)?;
        let reached = traj.last().t;
        if reached >= t_end {
            let (mut lo, mut hi) = (0.0, tau);
            while hi - lo > 1e-15 * hi {
                let mid = 0.5 * (lo + hi);
                if traj.sample_at(mid).t < t_end { lo = mid } else { hi = mid }
            }
            return run_parabolic(start, hi, opts);
        }
        if matches!(traj.termination(), Termination::Escaped(_)) {
            return Ok(traj);
        }
        tau *= (1.2 * t_end / reached.max(f64::MIN_POSITIVE)).clamp(2.0, 1e6);
    }
    Err(CliError::Failure(format!("could not reach t = {t_end} in fictitious time")))
}

fn run_cartesian(start: &Start, t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory, CliError> {
    Ok(match start {
        Start::Planar { s, .. } => integrate_cartesian2_with(s, 0.0, t_end, opts)?,
        Start::Spatial { s, .. } => integrate_cartesian3_with(s, 0.0, t_end, opts)?,
    })
}

/// Largest componentwise position difference over a uniform time grid.
fn max_discrepancy(a: &Trajectory, b: &Trajectory) -> Result<(f64, f64), CliError> {
    let t_max = a.last().t.min(b.last().t);
    let mut worst = 0.0f64;
    for i in 0..=COMPARE_POINTS {
        let t = t_max * i as f64 / COMPARE_POINTS as f64;
        let (p, q) = (a.position_at_time(t)?, b.position_at_time(t)?);
        worst = p.iter().zip(&q).fold(worst, |w, (x, y)| w.max((x - y).abs()));
    }
    Ok((worst, t_max))
}

pub fn run(args: &IntegrateArgs) -> CmdResult {
    let start = args.start()?;
    let opts = args.options();
    let spatial = matches!(start, Start::Spatial { .. });
    if spatial && args.coords == CoordsArg::Parabolic {
        if let Start::Spatial { l, .. } = start {
            if l == 0.0 {
                return usage("spatial parabolic runs need non-zero angular momentum; use --coords cartesian");
            }
        }
    }
    // physical length of one brake period, needed for --periods
    let brake_period = |a: f64| -> Result<(f64, f64), CliError> {
        let cq = brake_orbit_params(a)?.conserved();
        let t_eta = period_eta(&cq)?;
        let one = run_parabolic(&start, t_eta, &opts)?;
        Ok((t_eta, one.last().t))
    };
    let traj = match (args.coords, args.t_end, args.tau_end, args.periods) {
        (CoordsArg::Parabolic, Some(t), None, None) => run_parabolic_to_time(&start, t, &opts)?,
        (CoordsArg::Parabolic, None, Some(tau), None) => run_parabolic(&start, tau, &opts)?,
        (CoordsArg::Parabolic, None, None, Some(n)) => run_parabolic(&start, n * brake_period(args.brake.unwrap())?.0, &opts)?,
        (CoordsArg::Cartesian, Some(t), None, None) => run_cartesian(&start, t, &opts)?,
        (CoordsArg::Cartesian, None, None, Some(n)) => run_cartesian(&start, n * brake_period(args.brake.unwrap())?.1, &opts)?,
        (CoordsArg::Cartesian, None, Some(_), None) => return usage("--tau-end needs --coords parabolic"),
        _ => return usage("give one of --t-end, --tau-end or --periods"),
    };

    let mut doc = document("integrate");
    doc.insert("coords".into(), if args.coords == CoordsArg::Parabolic { "parabolic" } else { "cartesian" }.into());
    doc.insert("dimension".into(), if spatial { 3 } else { 2 }.into());
    doc.insert(
        "initial".into(),
        match &start {
            Start::Planar { s, .. } => json!({"x": num(s.x), "y": num(s.y), "vx": num(s.vx), "vy": num(s.vy)}),
            Start::Spatial { s, .. } => {
                json!({"x": num(s.x), "y": num(s.y), "z": num(s.z), "vx": num(s.vx), "vy": num(s.vy), "vz": num(s.vz)})
            }
        },
    );
    let k = traj.constants();
    doc.insert("constants".into(), json!({"H": num(k.h), "c": num(k.c), "L": num(k.l)}));
    let (s0, s1) = traj.span();
    doc.insert(
        "span".into(),
        json!({"variable": if traj.coords().is_parabolic() { "tau" } else { "t" }, "start": num(s0), "end": num(s1)}),
    );
    doc.insert("t_final".into(), num(traj.last().t));
    doc.insert("steps".into(), (traj.samples().len() - 1).into());
    doc.insert(
        "options".into(),
        json!({
            "method": serde_json::to_value(traj.options().method).unwrap_or(Value::Null),
            "tol": num(opts.tol), "r_min": num(opts.r_min), "r_max": num(opts.r_max), "event_window": num(opts.event_window),
        }),
    );
    doc.insert("termination".into(), serde_json::to_value(traj.termination()).unwrap_or(Value::Null));
    doc.insert("drift".into(), json!({"H": num(traj.drift().h), "c": num(traj.drift().c)}));
    doc.insert("radius".into(), json!({"min": num(traj.min_radius()), "max": num(traj.max_radius())}));
    let events = detect_events_with(&traj, opts.event_window);
    doc.insert("event_sequence".into(), events.iter().map(|e| e.label()).collect::<Vec<_>>().into());
    doc.insert(
        "events".into(),
        events
            .iter()
            .map(|e| {
                json!({"label": e.label(), "tau": num(e.tau), "t": num(e.t), "x": num(e.state.x), "y": num(e.state.y), "residual": num(e.residual)})
            })
            .collect::<Vec<_>>()
            .into(),
    );
    if args.compare {
        let t_final = traj.last().t;
        let other = match args.coords {
            CoordsArg::Parabolic => run_cartesian(&start, t_final, &opts)?,
            CoordsArg::Cartesian => run_parabolic_to_time(&start, t_final, &opts)?,
        };
        let (worst, t_max) = max_discrepancy(&traj, &other)?;
        doc.insert(
            "compare".into(),
            json!({"max_position_discrepancy": num(worst), "t_max": num(t_max), "points": COMPARE_POINTS + 1}),
        );
    }
    if let Some(path) = &args.out {
        let file = File::create(path).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
        write_csv(&traj, BufWriter::new(file))?;
        doc.insert("out".into(), path.display().to_string().into());
    }
    Ok(Report::ok(doc.into()))
}
