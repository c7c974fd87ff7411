//! Spatial commands.

use clap::{Args, Subcommand};
use serde_json::{json, Value};
use stark_core::spatial::{
    circular_from_l, circular_from_z, critical_energies, f_roots, g_roots, period_eta3, period_quadrature_eta3,
    period_quadrature_xi3, period_xi3, CircularOrbit, CubicTriple, SpatialCurves,
};
use stark_core::Conserved3;

use crate::error::{usage, CliError};
use crate::output::{document, num, opt};
use crate::{CmdResult, Report};

#[derive(Debug, Subcommand)]
pub enum SpatialCommand {
    /// Orbit class of (L, h, c).
    Classify(PointArgs),
    /// Critical energies h1 < h2 of the circular orbits at L.
    Critical(CriticalArgs),
    /// Circular orbits at height z or angular momentum L.
    Circular(CircularArgs),
    /// Periods of ξ and η at (L, h, c).
    Periods(PointArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PointArgs {
    #[arg(long = "L")]
    l: f64,
    #[arg(long)]
    h: f64,
    #[arg(long)]
    c: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CriticalArgs {
    #[arg(long = "L")]
    l: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CircularArgs {
    /// Height of the orbit plane, in (0, 1).
    #[arg(long, conflicts_with = "l", required_unless_present = "l")]
    z: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
}

pub fn run(cmd: &SpatialCommand) -> CmdResult {
    match cmd {
        SpatialCommand::Classify(a) => classify(a),
        SpatialCommand::Critical(a) => critical(a),
        SpatialCommand::Circular(a) => circular(a),
        SpatialCommand::Periods(a) => periods(a),
    }
}

fn check(args: &PointArgs) -> Result<Conserved3, CliError> {
    if ![args.l, args.h, args.c].iter().all(|x| x.is_finite()) {
        return usage("L, h and c must be finite");
    }
    if args.l == 0.0 {
        return usage("L must be non-zero; use the planar commands for L = 0");
    }
    Ok(Conserved3::new(args.h, args.c, args.l))
}

fn roots(t: &CubicTriple) -> Value {
    json!(t.roots().into_iter().map(num).collect::<Vec<_>>())
}

fn classify(args: &PointArgs) -> CmdResult {
    let cq = check(args)?;
    let curves = SpatialCurves::new(cq.l)?;
    let class = curves.classify(cq.h, cq.c)?;
    let (c1, c2, ce) = curves.curves_at(cq.h)?;
    let periods = if class.is_bounded() {
        let t_xi = period_xi3(&cq).ok();
        let t_eta = period_eta3(&cq).ok();
        json!({"t_xi": opt(t_xi), "t_eta": opt(t_eta), "ratio": opt(t_xi.zip(t_eta).map(|(x, e)| x / e))})
    } else {
        Value::Null
    };
    let mut doc = document("spatial classify");
    doc.insert("L".into(), num(cq.l));
    doc.insert("h".into(), num(cq.h));
    doc.insert("c".into(), num(cq.c));
    doc.insert("class".into(), class.tag().into());
    doc.insert("bounded".into(), class.is_bounded().into());
    doc.insert("curves".into(), json!({"C1_xi": opt(c1), "C2_xi": opt(c2), "C_eta": num(ce)}));
    doc.insert(
        "critical".into(),
        curves.critical.map_or(Value::Null, |k| json!({"h1": num(k.h1), "h2": num(k.h2), "h_top": num(k.h_top)})),
    );
    doc.insert("f_roots".into(), roots(&f_roots(&cq)));
    doc.insert("g_roots".into(), roots(&g_roots(&cq)));
    doc.insert("periods".into(), periods);
    Ok(Report::ok(doc.into()))
}

fn critical(args: &CriticalArgs) -> CmdResult {
    if args.l == 0.0 || !args.l.is_finite() {
        return usage("L must be finite and non-zero");
    }
    let k = critical_energies(args.l)?;
    let mut doc = document("spatial critical");
    doc.insert("L".into(), num(args.l));
    doc.insert("h1".into(), num(k.h1));
    doc.insert("h2".into(), num(k.h2));
    doc.insert("h_top".into(), num(k.h_top));
    doc.insert("l_max_sq".into(), num(k.l_max_sq));
    doc.insert("degenerate".into(), k.degenerate.into());
    Ok(Report::ok(doc.into()))
}

fn orbit_value(o: &CircularOrbit) -> Value {
    json!({
        "z": num(o.z), "r": num(o.r), "L": num(o.l), "h": num(o.h), "c": num(o.c),
        "omega": num(o.omega), "period": num(o.period()), "stable": o.stable,
    })
}

fn circular(args: &CircularArgs) -> CmdResult {
    let orbits = match (args.z, args.l) {
        (Some(z), _) => vec![circular_from_z(z)?],
        (None, Some(l)) => circular_from_l(l)?,
        (None, None) => return usage("give --z or --L"),
    };
    let mut doc = document("spatial circular");
    if let [o] = orbits.as_slice() {
        doc.insert("stable".into(), o.stable.into());
        doc.insert("h".into(), num(o.h));
    }
    doc.insert("orbits".into(), orbits.iter().map(orbit_value).collect::<Vec<_>>().into());
    Ok(Report::ok(doc.into()))
}

fn periods(args: &PointArgs) -> CmdResult {
    let cq = check(args)?;
    let xi = period_xi3(&cq).and_then(|t| Ok((t, period_quadrature_xi3(&cq)?)));
    let eta = period_eta3(&cq).and_then(|t| Ok((t, period_quadrature_eta3(&cq)?)));
    if let (Err(e), Err(_)) = (&xi, &eta) {
        return Err(CliError::Failure(format!("no finite period at L = {}, h = {}, c = {}: {e}", cq.l, cq.h, cq.c)));
    }
    let entry = |r: &stark_core::Result<(f64, f64)>| match r {
        Ok((closed, quad)) => json!({"closed_form": num(*closed), "quadrature": num(*quad), "rel_diff": num((closed - quad).abs() / closed)}),
        Err(e) => json!({"error": e.to_string()}),
    };
    let mut doc = document("spatial periods");
    doc.insert("L".into(), num(cq.l));
    doc.insert("h".into(), num(cq.h));
    doc.insert("c".into(), num(cq.c));
    doc.insert("t_xi".into(), entry(&xi));
    doc.insert("t_eta".into(), entry(&eta));
    doc.insert("ratio".into(), opt(xi.as_ref().ok().zip(eta.as_ref().ok()).map(|(x, e)| x.0 / e.0)));
    Ok(Report::ok(doc.into()))
}
