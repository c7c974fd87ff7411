//! `stark`: command-line front end for the planar and spatial Stark problem.
//!
//! Every command prints one JSON document (or its CSV rendering with
//! `--csv`) on stdout. Exit codes: 0 success, 1 no solution or numerical
//! failure, 2 usage error.

mod atlas;
mod error;
mod integrate;
mod output;
mod planar;
mod spatial;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "stark", version, about = "Periods, orbit classes and periodic families of the Stark problem")]
struct Cli {
    /// Print JSON (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Print CSV: the row table when the command has one, key/value pairs otherwise.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a planar orbit from (a, b), a Cartesian state or (H, c).
    Classify(planar::ClassifyArgs),
    /// Closed-form and quadrature periods of the ξ and η oscillations.
    Periods(planar::PeriodsArgs),
    /// The brake orbit launched from (a, 0).
    Brake(planar::BrakeArgs),
    /// Solve for a member of the periodic families.
    Family(planar::FamilyArgs),
    /// Period ratio along a one-parameter slice.
    RatioScan(planar::RatioScanArgs),
    /// Spatial problem with angular momentum L about the field axis.
    #[command(subcommand)]
    Spatial(spatial::SpatialCommand),
    /// Classify a grid of (h, c) and write it as CSV.
    Atlas(atlas::AtlasArgs),
    /// Integrate an orbit and report its events.
    Integrate(integrate::IntegrateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.csv { Format::Csv } else { Format::Json };
    let result = match &cli.command {
        Command::Classify(a) => planar::classify(a),
        Command::Periods(a) => planar::periods(a),
        Command::Brake(a) => planar::brake(a),
        Command::Family(a) => planar::family(a),
        Command::RatioScan(a) => planar::ratio_scan(a),
        Command::Spatial(c) => spatial::run(c),
        Command::Atlas(a) => atlas::run(a),
        Command::Integrate(a) => integrate::run(a),
    };
    match result.and_then(|report| output::emit(&report, format).map(|_| report.code)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

/// A finished command: the document to print and the exit code.
pub struct Report {
    pub doc: serde_json::Value,
    pub code: u8,
}

impl Report {
    pub fn ok(doc: serde_json::Value) -> Self {
        Self { doc, code: 0 }
    }
}

pub type CmdResult = Result<Report, CliError>;
