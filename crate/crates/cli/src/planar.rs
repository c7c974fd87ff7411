//! Planar commands: classify, periods, brake, family, ratio-scan.

use clap::{Args, ValueEnum};
use serde_json::{json, Map, Value};
use stark_core::families::{
    alpha, brake_orbit_params, c_max, find_family_a, find_family_b, find_family_rest, min_family_index,
    min_rest_family_index, period_ratio, ratio_limits_fixed_energy, AxisLaunchSlice, FamilyKind, RestSlice,
};
use stark_core::integrate::{
    detect_events_with, integrate_parabolic2_with, verify_family, IntegrateOptions, ParabolicState, DEFAULT_EVENT_WINDOW,
    DEFAULT_TOL,
};
use stark_core::planar::{
    classify_eta, classify_orbit, classify_state, classify_xi, conserved_from_axis_launch, conserved_from_state,
    eta_turning_points, period_eta, period_quadrature_eta_with, period_quadrature_xi_with, period_xi,
    xi_turning_points, QuadratureScheme,
};
use stark_core::{CartesianState2, Conserved2};

use crate::error::{usage, CliError};
use crate::output::{document, num, opt};
use crate::{CmdResult, Report};

/// One of `{a, b}`, `{x0, y0, vx0, vy0}` or `{H, c}`.
#[derive(Debug, Args)]
pub struct PlanarInput {
    /// Launch abscissa on the positive x-axis, in (0, 1].
    #[arg(long)]
    a: Option<f64>,
    /// Launch speed perpendicular to the axis.
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    y0: Option<f64>,
    #[arg(long)]
    vx0: Option<f64>,
    #[arg(long)]
    vy0: Option<f64>,
    /// Energy.
    #[arg(long = "H")]
    h: Option<f64>,
    /// Separation constant.
    #[arg(long)]
    c: Option<f64>,
}

pub enum Input {
    AxisLaunch { a: f64, b: f64 },
    State(CartesianState2),
    Constants(Conserved2),
}

impl PlanarInput {
    pub fn resolve(&self) -> Result<Input, CliError> {
        let groups = [
            ("--a/--b", vec![self.a, self.b]),
            ("--x0/--y0/--vx0/--vy0", vec![self.x0, self.y0, self.vx0, self.vy0]),
            ("--H/--c", vec![self.h, self.c]),
        ];
        let used: Vec<_> = groups.iter().filter(|(_, v)| v.iter().any(Option::is_some)).collect();
        match used.as_slice() {
            [] => usage("give one input form: --a/--b, --x0/--y0/--vx0/--vy0 or --H/--c"),
            [(name, v)] => {
                if v.iter().any(Option::is_none) {
                    return usage(format!("input form {name} needs all of its flags"));
                }
                let v: Vec<f64> = v.iter().flatten().copied().collect();
                if v.iter().any(|x| !x.is_finite()) {
                    return usage("inputs must be finite");
                }
                Ok(match v.len() {
                    4 => Input::State(CartesianState2::new(v[0], v[1], v[2], v[3])),
                    _ if self.a.is_some() => Input::AxisLaunch { a: v[0], b: v[1] },
                    _ => Input::Constants(Conserved2::new(v[0], v[1])),
                })
            }
            many => usage(format!(
                "ambiguous input: {} given together",
                many.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(" and ")
            )),
        }
    }
}

impl Input {
    pub fn conserved(&self) -> Result<Conserved2, CliError> {
        Ok(match self {
            Input::AxisLaunch { a, b } => conserved_from_axis_launch(*a, *b)?,
            Input::State(s) => conserved_from_state(s)?,
            Input::Constants(cq) => *cq,
        })
    }

    fn describe(&self) -> Value {
        match self {
            Input::AxisLaunch { a, b } => json!({"form": "axis-launch", "a": a, "b": b}),
            Input::State(s) => json!({"form": "state", "x0": s.x, "y0": s.y, "vx0": s.vx, "vy0": s.vy}),
            Input::Constants(cq) => json!({"form": "constants", "H": cq.h, "c": cq.c}),
        }
    }
}

fn periods_value(cq: &Conserved2) -> Value {
    let t_xi = period_xi(cq).ok();
    let t_eta = period_eta(cq).ok();
    let ratio = t_xi.zip(t_eta).map(|(x, e)| x / e);
    json!({"t_xi": opt(t_xi), "t_eta": opt(t_eta), "ratio": opt(ratio)})
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ClassifyArgs {
    #[command(flatten)]
    input: PlanarInput,
}

pub fn classify(args: &ClassifyArgs) -> CmdResult {
    let input = args.input.resolve()?;
    let cq = input.conserved()?;
    let orbit = match &input {
        Input::State(s) => classify_state(s)?,
        _ => classify_orbit(&cq),
    };
    let tp = |r: Option<stark_core::TurningPoints2>| r.map_or(Value::Null, |t| json!({"low_sq": num(t.low_sq), "high_sq": num(t.high_sq)}));
    let mut doc = document("classify");
    doc.insert("input".into(), input.describe());
    doc.insert("H".into(), num(cq.h));
    doc.insert("c".into(), num(cq.c));
    doc.insert("xi_class".into(), classify_xi(&cq).tag().into());
    doc.insert("eta_class".into(), classify_eta(&cq).tag().into());
    doc.insert(
        "orbit".into(),
        json!({"kind": orbit.kind.tag(), "radius_bound": opt(orbit.radius_bound), "realizable": orbit.realizable}),
    );
    doc.insert(
        "turning_points".into(),
        json!({"xi": tp(xi_turning_points(&cq).ok()), "eta": tp(eta_turning_points(&cq).ok())}),
    );
    doc.insert("periods".into(), periods_value(&cq));
    Ok(Report::ok(doc.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Gl,
    Simpson,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PeriodsArgs {
    #[command(flatten)]
    input: PlanarInput,
    /// Adaptive quadrature used for the cross-check.
    #[arg(long, value_enum, default_value = "gl")]
    scheme: Scheme,
}

pub fn periods(args: &PeriodsArgs) -> CmdResult {
    let cq = args.input.resolve()?.conserved()?;
    let scheme = match args.scheme {
        Scheme::Gl => QuadratureScheme::GaussLegendre,
        Scheme::Simpson => QuadratureScheme::Simpson,
    };
    let xi = period_xi(&cq).and_then(|t| Ok((t, period_quadrature_xi_with(&cq, scheme)?)));
    let eta = period_eta(&cq).and_then(|t| Ok((t, period_quadrature_eta_with(&cq, scheme)?)));
    if let (Err(e), Err(_)) = (&xi, &eta) {
        return Err(CliError::Failure(format!("no finite period at H = {}, c = {}: {e}", cq.h, cq.c)));
    }
    let entry = |r: &stark_core::Result<(f64, f64)>| match r {
        Ok((closed, quad)) => json!({"closed_form": num(*closed), "quadrature": num(*quad), "rel_diff": num((closed - quad).abs() / closed)}),
        Err(e) => json!({"error": e.to_string()}),
    };
    let mut doc = document("periods");
    doc.insert("H".into(), num(cq.h));
    doc.insert("c".into(), num(cq.c));
    doc.insert("scheme".into(), if args.scheme == Scheme::Gl { "gauss-legendre" } else { "simpson" }.into());
    doc.insert("t_xi".into(), entry(&xi));
    doc.insert("t_eta".into(), entry(&eta));
    let ratio = xi.as_ref().ok().zip(eta.as_ref().ok()).map(|(x, e)| x.0 / e.0);
    doc.insert("ratio".into(), opt(ratio));
    Ok(Report::ok(doc.into()))
}

#[derive(Debug, Args)]
pub struct BrakeArgs {
    /// Launch abscissa, in (0, 1).
    #[arg(long)]
    a: f64,
    /// Integrate one η period and check the brake events and the return.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_EVENT_WINDOW)]
    event_window: f64,
}

/// Brake orbit in regularized form: ξ sits at its fixed point `√(2a)`.
pub fn brake_start(a: f64) -> Result<(ParabolicState, Conserved2), CliError> {
    let p = brake_orbit_params(a)?;
    let cq = p.conserved();
    Ok((ParabolicState::new((2.0 * a).sqrt(), 0.0, 0.0, (2.0 * (1.0 - cq.c)).sqrt()), cq))
}

pub fn brake(args: &BrakeArgs) -> CmdResult {
    let params = brake_orbit_params(args.a)?;
    let (p0, cq) = brake_start(args.a)?;
    let t_eta = period_eta(&cq)?;
    let mut doc = document("brake");
    doc.insert("a".into(), num(params.a));
    doc.insert("b_star".into(), num(params.b_star));
    doc.insert("H".into(), num(params.h));
    doc.insert("c".into(), num(params.c));
    doc.insert("t_eta".into(), num(t_eta));
    let mut code = 0;
    if args.verify {
        let opts = IntegrateOptions { event_window: args.event_window, ..IntegrateOptions::with_tol(args.tol) };
        let traj = integrate_parabolic2_with(&p0, &cq, t_eta, &opts)?;
        let events = detect_events_with(&traj, args.event_window);
        let last = traj.last();
        let ret = [last.xi - p0.xi, last.xi_p - p0.xi_p, last.eta - p0.eta, last.eta_p - p0.eta_p]
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()));
        let brakes: Vec<_> = events.iter().filter(|e| e.label() == "brake").collect();
        let unit = brakes.iter().map(|e| (e.state.radius() - 1.0).abs()).fold(0.0, f64::max);
        let ok = brakes.len() == 2 && unit < 1e-6 && ret < 1e-6;
        if !ok {
            code = 1;
        }
        doc.insert("period".into(), num(last.t));
        doc.insert(
            "verify".into(),
            json!({
                "events": events.iter().map(|e| json!({"label": e.label(), "tau": num(e.tau), "t": num(e.t), "x": num(e.state.x), "y": num(e.state.y)})).collect::<Vec<_>>(),
                "brake_events": brakes.len(),
                "max_unit_circle_error": num(unit),
                "return_error": num(ret),
                "drift": {"H": num(traj.drift().h), "c": num(traj.drift().c)},
                "passed": ok,
            }),
        );
    }
    Ok(Report { doc: doc.into(), code })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyType {
    A,
    B,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Launch abscissa for the axis-launch families, in (0, 1).
    #[arg(long, conflicts_with = "rest", required_unless_present = "rest", allow_negative_numbers = true)]
    a: Option<f64>,
    /// Release abscissa a' for the release-from-rest families, in (-1, 1).
    #[arg(long, allow_negative_numbers = true)]
    rest: Option<f64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[arg(long = "type", value_enum, default_value = "a", ignore_case = true)]
    kind: FamilyType,
    /// Integrate the orbit and count its axis crossings.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

pub fn family(args: &FamilyArgs) -> CmdResult {
    let (sol, k_min, root_name) = match (args.a, args.rest, args.kind) {
        (Some(a), _, FamilyType::A) => (find_family_a(a, args.k)?, min_family_index(a)?, "b_k"),
        (Some(a), _, FamilyType::B) => (find_family_b(a, args.k)?, min_family_index(a)?, "b'_k"),
        (None, Some(ap), t) => {
            let kind = if t == FamilyType::A { FamilyKind::ARest } else { FamilyKind::BRest };
            let name = if t == FamilyType::A { "d_k" } else { "d'_k" };
            (find_family_rest(ap, args.k, kind)?, min_rest_family_index(ap)?, name)
        }
        (None, None, _) => return usage("give --a or --rest"),
    };
    let kind = match sol.kind {
        FamilyKind::A => "A",
        FamilyKind::B => "B",
        FamilyKind::ARest => "A-rest",
        FamilyKind::BRest => "B-rest",
    };
    let mut doc = document("family");
    doc.insert("type".into(), kind.into());
    doc.insert("k".into(), sol.k.into());
    doc.insert("k_min".into(), k_min.into());
    doc.insert(if sol.kind.is_rest() { "a_prime" } else { "a" }.into(), num(sol.anchor));
    doc.insert("root_name".into(), root_name.into());
    doc.insert("root".into(), num(sol.root));
    doc.insert("gap".into(), num(sol.gap));
    doc.insert("H".into(), num(sol.cq.h));
    doc.insert("c".into(), num(sol.cq.c));
    doc.insert("ratio_target".into(), sol.ratio_target.into());
    doc.insert("ratio".into(), num(sol.ratio));
    doc.insert("residual".into(), num(sol.residual()));
    let mut code = 0;
    if args.verify {
        let check = verify_family(&sol, args.tol)?;
        let terminal = check.terminal.unwrap_or("none");
        let summary = format!("crossings: {}, terminal: {terminal}", check.positive_crossings);
        if !check.matches {
            code = 1;
        }
        doc.insert(
            "verify".into(),
            json!({
                "positive_crossings": check.positive_crossings,
                "terminal": check.terminal,
                "expected_terminal": check.expected_terminal,
                "tau_predicted": num(check.tau_predicted),
                "tau_terminal": opt(check.terminal_event.map(|e| e.tau)),
                "matches": check.matches,
                "summary": summary,
            }),
        );
    }
    Ok(Report { doc: doc.into(), code })
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct RatioScanArgs {
    /// Scan launch speeds b in (0, b*) at this abscissa.
    #[arg(long, group = "slice")]
    a: Option<f64>,
    /// Scan release heights d in (0, d_max) at this abscissa.
    #[arg(long, group = "slice")]
    rest: Option<f64>,
    /// Scan c over the torus range (-1, c_max) at this energy.
    #[arg(long = "H", group = "slice")]
    h: Option<f64>,
    /// Number of interior grid points.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(2..=100_000))]
    n: u32,
}

pub fn ratio_scan(args: &RatioScanArgs) -> CmdResult {
    let n = args.n as usize;
    let frac = |i: usize| (i + 1) as f64 / (n + 1) as f64;
    let mut doc = document("ratio-scan");
    let mut rows = Vec::with_capacity(n);
    let mut push = |name: &str, x: f64, cq: Conserved2, ratio: f64| {
        let mut row = Map::new();
        row.insert(name.into(), num(x));
        row.insert("H".into(), num(cq.h));
        row.insert("c".into(), num(cq.c));
        row.insert("t_xi".into(), opt(period_xi(&cq).ok()));
        row.insert("t_eta".into(), opt(period_eta(&cq).ok()));
        row.insert("ratio".into(), num(ratio));
        rows.push(Value::Object(row));
    };
    let ratios: Vec<f64> = match (args.a, args.rest, args.h) {
        (Some(a), None, None) => {
            let slice = AxisLaunchSlice::new(a)?;
            doc.insert("slice".into(), "axis-launch".into());
            doc.insert("a".into(), num(a));
            doc.insert("b_star".into(), num(slice.b_star()));
            doc.insert("limit_b_to_0".into(), num(alpha(a)?));
            (0..n)
                .map(|i| {
                    let b = slice.b_star() * frac(i);
                    let r = slice.ratio_at_b(b)?;
                    push("b", b, conserved_from_axis_launch(a, b)?, r);
                    Ok(r)
                })
                .collect::<Result<_, CliError>>()?
        }
        (None, Some(ap), None) => {
            let slice = RestSlice::new(ap)?;
            doc.insert("slice".into(), "rest".into());
            doc.insert("a_prime".into(), num(ap));
            doc.insert("d_max".into(), num(slice.d_max()));
            (0..n)
                .map(|i| {
                    let d = slice.d_max() * frac(i);
                    let r = slice.ratio_at_d(d)?;
                    push("d", d, stark_core::planar::conserved_from_rest(ap, d)?, r);
                    Ok(r)
                })
                .collect::<Result<_, CliError>>()?
        }
        (None, None, Some(h)) => {
            let top = c_max(h)?;
            let limits = ratio_limits_fixed_energy(h)?;
            doc.insert("slice".into(), "energy".into());
            doc.insert("H".into(), num(h));
            doc.insert("c_max".into(), num(top));
            doc.insert("limits".into(), serde_json::to_value(limits).map_err(|e| CliError::Failure(e.to_string()))?);
            (0..n)
                .map(|i| {
                    let c = -1.0 + (top + 1.0) * frac(i);
                    let cq = Conserved2::new(h, c);
                    let r = period_ratio(&cq)?;
                    push("c", c, cq, r);
                    Ok(r)
                })
                .collect::<Result<_, CliError>>()?
        }
        _ => return usage("give exactly one of --a, --rest or --H"),
    };
    doc.insert("n".into(), n.into());
    doc.insert("increasing".into(), ratios.windows(2).all(|w| w[1] > w[0]).into());
    doc.insert("ratio_min".into(), num(ratios.iter().copied().fold(f64::INFINITY, f64::min)));
    doc.insert("ratio_max".into(), num(ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)));
    doc.insert("rows".into(), rows.into());
    Ok(Report::ok(doc.into()))
}
