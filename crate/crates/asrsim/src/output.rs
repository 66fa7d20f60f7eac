//! CSV and JSON emitters. Every file starts with (or embeds) a provenance
//! block: the resolved configuration and the engine version, so outputs are
//! self-describing.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde_json::{json, Value};

use asrsim_core::grid::{CellOutcome, LandscapeGrid};
use asrsim_core::sensitivity::{SampleRecord, SensitivityReport, INPUT_NAMES};

pub const ENGINE_VERSION: &str = concat!("asrsim ", env!("CARGO_PKG_VERSION"));

/// Decimal float serialization with 17 significant digits, enough for an
/// exact f64 round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Provenance header lines for CSV files: `# engine: ...` and a single-line
/// `# config: {...}` echo of the resolved configuration.
fn csv_provenance(config: &Value) -> String {
    format!("# engine: {ENGINE_VERSION}\n# config: {config}\n")
}

pub fn provenance_value(config: &Value) -> Value {
    json!({ "engine": ENGINE_VERSION, "config": config })
}

/// One row per grid cell: L, t1, asr, R, P, classification.
pub fn grid_csv(grid: &LandscapeGrid, config: &Value) -> String {
    let mut out = csv_provenance(config);
    out.push_str("L,t1,asr,R,P,classification\n");
    for cell in &grid.cells {
        let (asr, r, p, class) = match &cell.outcome {
            CellOutcome::Simulated(rep) => (
                fmt_opt(rep.asr),
                fmt_opt(rep.mm_fraction),
                fmt_f64(rep.population),
                rep.classification.as_str().to_string(),
            ),
            CellOutcome::Invalid => (String::new(), String::new(), String::new(), "invalid".into()),
            CellOutcome::Failed(_) => {
                (String::new(), String::new(), String::new(), "failed".into())
            }
        };
        let _ = writeln!(
            out,
            "{},{},{asr},{r},{p},{class}",
            fmt_f64(cell.longevity),
            fmt_f64(cell.fertility_end)
        );
    }
    out
}

fn polylines_value(polylines: &[asrsim_core::contour::Polyline]) -> Value {
    Value::Array(
        polylines
            .iter()
            .map(|pl| {
                Value::Array(
                    pl.points
                        .iter()
                        .map(|&(x, y)| json!([x, y]))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// ASR contours and the strategy boundary as JSON polylines.
pub fn contours_json(grid: &LandscapeGrid, config: &Value) -> String {
    let doc = json!({
        "provenance": provenance_value(config),
        "asr_contours": grid.asr_contours.iter().map(|(level, pls)| {
            json!({ "level": level, "polylines": polylines_value(pls) })
        }).collect::<Vec<_>>(),
        "strategy_boundary": polylines_value(&grid.strategy_boundary),
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// One row per ensemble sample: inputs, derived rates, outcomes, exclusion.
pub fn records_csv(records: &[SampleRecord], config: &Value) -> String {
    let mut out = csv_provenance(config);
    out.push_str(&INPUT_NAMES.join(","));
    out.push_str(",delta,mu,asr,R,classification,excluded\n");
    for rec in records {
        let inputs = rec
            .inputs
            .iter()
            .map(|&v| fmt_f64(v))
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(
            out,
            "{inputs},{},{},{},{},{},{}",
            fmt_opt(rec.delta),
            fmt_opt(rec.mu),
            fmt_opt(rec.asr),
            fmt_opt(rec.mm_fraction),
            rec.classification.map(|c| c.as_str()).unwrap_or(""),
            rec.exclusion
                .as_ref()
                .map(|e| e.as_str().replace(',', ";"))
                .unwrap_or_default()
        );
    }
    out
}

/// Sensitivity report as JSON, mirroring the tabular layout: one entry per
/// analysis variable with PRCCs against ASR and R, plus the headline
/// controlled correlations.
pub fn sensitivity_report_json(report: &SensitivityReport, config: &Value) -> String {
    let vars: Vec<Value> = report
        .rows
        .iter()
        .map(|v| {
            json!({
                "name": v.name,
                "asr": { "prcc": v.asr.coefficient, "p": v.asr.p_value, "strength": v.asr_label() },
                "R": { "prcc": v.mm.coefficient, "p": v.mm.p_value, "strength": v.mm_label() },
            })
        })
        .collect();
    let doc = json!({
        "provenance": provenance_value(config),
        "samples": report.n_total,
        "retained": report.n_retained,
        "excluded": {
            "extinct": report.n_extinct,
            "non_converged": report.n_non_converged,
            "asr_out_of_range": report.n_asr_filtered,
            "failed": report.n_failed,
        },
        "variables": vars,
        "headline": {
            "r_vs_asr_given_death_rates": {
                "prcc": report.strategy_vs_asr_basic.coefficient,
                "p": report.strategy_vs_asr_basic.p_value,
            },
            "r_vs_asr_given_extended_controls": {
                "prcc": report.strategy_vs_asr_extended.coefficient,
                "p": report.strategy_vs_asr_extended.p_value,
            },
        },
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)
}

/// Parses a data CSV produced by this module back into float columns,
/// skipping provenance comments and the header. Empty fields become NaN.
pub fn parse_csv_floats(doc: &str) -> Vec<Vec<Option<f64>>> {
    doc.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|line| {
            line.split(',')
                .map(|f| f.parse::<f64>().ok())
                .collect()
        })
        .collect()
}
