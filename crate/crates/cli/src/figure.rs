use std::path::PathBuf;

use phasecorr_core::figure::{figure_sweep, FigurePoint};
use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;
use crate::output::{self, num, Check, Document, Outcome};

pub const DEFAULT_B_OVER_DQ: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
pub const DEFAULT_DQDP: [f64; 5] = [0.5, 0.75, 1.0, 2.0, 5.0];
/// Largest tolerated `|numeric − closed form|`.
pub const RATIO_TOLERANCE: f64 = 1e-3;

pub struct FigureSettings {
    pub b_over_dq: Vec<f64>,
    pub dqdp: Vec<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Row {
    b_over_dq: f64,
    dqdp: f64,
    ratio_numeric: f64,
    ratio_closed_form: f64,
    abs_error: f64,
}

#[derive(Debug, Serialize)]
struct FigureDocument {
    schema_version: u32,
    units: &'static str,
    rows: Vec<Row>,
    checks: Vec<Check>,
}

fn row(p: &FigurePoint) -> Row {
    Row {
        b_over_dq: p.b_over_dq,
        dqdp: p.dqdp,
        ratio_numeric: p.ratio_numeric,
        ratio_closed_form: p.ratio_closed_form,
        abs_error: p.abs_error,
    }
}

pub fn run(s: &FigureSettings) -> Result<Outcome, CliError> {
    let points = figure_sweep(&s.b_over_dq, &s.dqdp)?;
    let worst = points.iter().fold(0.0f64, |m, p| m.max(p.abs_error));
    let checks = vec![Check::below("ratio_abs_error", worst, RATIO_TOLERANCE)];
    let text = match s.format {
        Format::Csv => output::csv(
            &["b_over_dq", "dqdp", "ratio_numeric", "ratio_closed_form", "abs_error"],
            points.iter().map(|p| {
                [p.b_over_dq, p.dqdp, p.ratio_numeric, p.ratio_closed_form, p.abs_error]
                    .map(num)
                    .to_vec()
            }),
        ),
        Format::Json => output::json(&FigureDocument {
            schema_version: output::SCHEMA_VERSION,
            units: output::UNITS,
            rows: points.iter().map(row).collect(),
            checks: checks.clone(),
        }),
    };
    Ok(Outcome {
        documents: vec![Document {
            path: s.out.clone(),
            text,
        }],
        failed_checks: output::failed(&checks),
    })
}
