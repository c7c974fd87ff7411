//! Classification atlas over an `(h, c)` grid.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde_json::json;
use stark_core::planar::{classify_eta, classify_orbit, classify_xi, period_eta, period_xi};
use stark_core::spatial::{period_eta3, period_xi3, SpatialCurves};
use stark_core::{Conserved2, Conserved3};

use crate::error::{usage, CliError};
use crate::output::{document, num};
use crate::{CmdResult, Report};

/// Largest number of grid cells one run may request.
pub const MAX_CELLS: u64 = 1_000_000;

pub const PLANAR_COLUMNS: [&str; 8] = ["h", "c", "class", "xi_class", "eta_class", "t_xi", "t_eta", "ratio"];
pub const SPATIAL_COLUMNS: [&str; 7] = ["L", "h", "c", "class", "t_xi", "t_eta", "ratio"];
pub const CURVE_COLUMNS: [&str; 4] = ["h", "C1_xi", "C2_xi", "C_eta"];

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct AtlasArgs {
    #[arg(long, default_value_t = -4.0)]
    h_min: f64,
    #[arg(long, default_value_t = 0.0)]
    h_max: f64,
    #[arg(long, default_value_t = -2.0)]
    c_min: f64,
    #[arg(long, default_value_t = 2.0)]
    c_max: f64,
    /// Grid points per axis; the grid has n² cells.
    #[arg(long, default_value_t = 100)]
    n: u64,
    /// Angular momentum; switches to the spatial classification.
    #[arg(long = "L")]
    l: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

struct Row {
    h: f64,
    c: f64,
    class: &'static str,
    xi_class: &'static str,
    eta_class: &'static str,
    t_xi: Option<f64>,
    t_eta: Option<f64>,
}

impl Row {
    fn ratio(&self) -> Option<f64> {
        self.t_xi.zip(self.t_eta).map(|(x, e)| x / e).filter(|r| r.is_finite())
    }
}

fn field(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map(|v| v.to_string()).unwrap_or_default()
}

fn grid(lo: f64, hi: f64, n: u64, i: u64) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

fn planar_row(h: f64, c: f64) -> Row {
    let cq = Conserved2::new(h, c);
    Row {
        h,
        c,
        class: classify_orbit(&cq).kind.tag(),
        xi_class: classify_xi(&cq).tag(),
        eta_class: classify_eta(&cq).tag(),
        t_xi: period_xi(&cq).ok(),
        t_eta: period_eta(&cq).ok(),
    }
}

fn spatial_row(curves: &SpatialCurves, h: f64, c: f64) -> Result<Row, CliError> {
    let class = curves.classify(h, c)?;
    let cq = Conserved3::new(h, c, curves.l);
    let (t_xi, t_eta) = if class.is_bounded() { (period_xi3(&cq).ok(), period_eta3(&cq).ok()) } else { (None, None) };
    Ok(Row { h, c, class: class.tag(), xi_class: "", eta_class: "", t_xi, t_eta })
}

/// `out.csv` → `out_curves.csv`.
pub fn curves_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "atlas".into());
    out.with_file_name(format!("{stem}_curves.csv"))
}

pub fn run(args: &AtlasArgs) -> CmdResult {
    let n = args.n;
    if n < 2 {
        return usage("--n must be at least 2");
    }
    if n.saturating_mul(n) > MAX_CELLS {
        return usage(format!("{n}^2 cells exceed the cap of {MAX_CELLS}"));
    }
    let bounds = [args.h_min, args.h_max, args.c_min, args.c_max];
    if bounds.iter().any(|x| !x.is_finite()) || !(args.h_min < args.h_max && args.c_min < args.c_max) {
        return usage("ranges need finite bounds with min < max");
    }
    let curves = match args.l {
        Some(l) if l == 0.0 || !l.is_finite() => return usage("--L must be finite and non-zero"),
        Some(l) => Some(SpatialCurves::new(l)?),
        None => None,
    };
    let file = File::create(&args.out).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", args.out.display())))?;

    let rows: Vec<Row> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let h = grid(args.h_min, args.h_max, n, idx / n);
            let c = grid(args.c_min, args.c_max, n, idx % n);
            match &curves {
                Some(k) => spatial_row(k, h, c),
                None => Ok(planar_row(h, c)),
            }
        })
        .collect::<Result<_, _>>()?;

    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    match &curves {
        Some(k) => {
            w.write_record(SPATIAL_COLUMNS)?;
            let l = k.l.to_string();
            for r in &rows {
                w.write_record([l.clone(), r.h.to_string(), r.c.to_string(), r.class.into(), field(r.t_xi), field(r.t_eta), field(r.ratio())])?;
            }
        }
        None => {
            w.write_record(PLANAR_COLUMNS)?;
            for r in &rows {
                w.write_record([
                    r.h.to_string(),
                    r.c.to_string(),
                    r.class.into(),
                    r.xi_class.into(),
                    r.eta_class.into(),
                    field(r.t_xi),
                    field(r.t_eta),
                    field(r.ratio()),
                ])?;
            }
        }
    }
    w.flush()?;

    let mut doc = document("atlas");
    if let Some(k) = &curves {
        let path = curves_path(&args.out);
        let file = File::create(&path).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(CURVE_COLUMNS)?;
        for i in 0..n {
            let h = grid(args.h_min, args.h_max, n, i);
            let (c1, c2, ce) = k.curves_at(h)?;
            w.write_record([h.to_string(), field(c1), field(c2), field(Some(ce))])?;
        }
        w.flush()?;
        doc.insert("L".into(), num(k.l));
        doc.insert(
            "critical".into(),
            k.critical.map_or(serde_json::Value::Null, |c| json!({"h1": num(c.h1), "h2": num(c.h2), "h_top": num(c.h_top)})),
        );
        doc.insert("curves_out".into(), path.display().to_string().into());
    }
    let mut counts = BTreeMap::new();
    for r in &rows {
        *counts.entry(r.class).or_insert(0u64) += 1;
    }
    let ratios: Vec<f64> = rows.iter().filter_map(Row::ratio).collect();
    doc.insert("out".into(), args.out.display().to_string().into());
    doc.insert("n".into(), n.into());
    doc.insert("row_count".into(), rows.len().into());
    doc.insert("columns".into(), if curves.is_some() { &SPATIAL_COLUMNS[..] } else { &PLANAR_COLUMNS[..] }.into());
    doc.insert("class_counts".into(), json!(counts));
    doc.insert("with_both_periods".into(), ratios.len().into());
    doc.insert("ratio_min".into(), ratios.iter().copied().reduce(f64::min).map_or(serde_json::Value::Null, num));
    Ok(Report::ok(doc.into()))
}
