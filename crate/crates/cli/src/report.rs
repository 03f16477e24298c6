use phasecorr_core::arthurs_kelly::{
    conditional_curve, default_grids, default_joint, ApparatusParams, DEFAULT_JOINT_POINTS,
};
use phasecorr_core::causal::{
    causal_report, combine, combo_correlations, convex_weights, correlationless_reference, CausalCombo, TransportCurve,
    PUSHFORWARD_TRIM,
};
use phasecorr_core::numerics::GridSpec;
use phasecorr_core::quantum::{self, Axis, LocalCorrelationCurve};
use phasecorr_core::states::{moments, MomentReport, WaveFunction};
use phasecorr_core::Error;
use serde::Serialize;

use crate::config::{Format, GridOverride, StateSpec};
use crate::error::CliError;
use crate::output::{self, num, Check, Document, Outcome};

/// Exactness tolerance on the measured global moment.
pub const GLOBAL_TOLERANCE: f64 = 1e-5;
/// Tolerance on the fitted combination's global correlation.
pub const FIT_TOLERANCE: f64 = 1e-8;
/// Pushforward distance bound, in momentum grid steps.
pub const PUSHFORWARD_BOUND: f64 = 2.0;

pub struct ReportSettings {
    pub state: StateSpec,
    pub grid: GridOverride,
    pub b_values: Vec<f64>,
    pub format: Format,
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct Curve {
    pub points: Vec<f64>,
    /// `null` outside the support.
    pub means: Vec<Option<f64>>,
}

impl From<&LocalCorrelationCurve> for Curve {
    fn from(c: &LocalCorrelationCurve) -> Self {
        Self {
            points: c.points.clone(),
            means: c.means.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GridInfo {
    pub n_points: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

#[derive(Debug, Serialize)]
pub struct Moments {
    pub mean_q: f64,
    pub mean_p: f64,
    pub delta_q: f64,
    pub delta_p: f64,
    pub uncertainty_product: f64,
}

impl From<&MomentReport> for Moments {
    fn from(m: &MomentReport) -> Self {
        Self {
            mean_q: m.mean_q,
            mean_p: m.mean_p,
            delta_q: m.delta_q,
            delta_p: m.delta_p,
            uncertainty_product: m.uncertainty_product(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct QuantumSection {
    pub global: f64,
    pub given_q: Curve,
    pub given_p: Curve,
}

#[derive(Debug, Serialize)]
pub struct MeasurementSection {
    pub b: f64,
    pub global_moment: f64,
    pub delta_x1: f64,
    pub delta_x2: f64,
    pub predicted_delta_x1: f64,
    pub predicted_delta_x2: f64,
    pub noise_product: f64,
    pub joint_mass: f64,
    pub given_x1: Curve,
    pub given_x2: Curve,
}

#[derive(Debug, Serialize)]
pub struct CurveSection {
    pub global: f64,
    pub pushforward_steps: f64,
    pub given_q: Curve,
    pub given_p: Curve,
}

#[derive(Debug, Serialize)]
pub struct Infeasibility {
    pub quantum: f64,
    pub plus: f64,
    pub minus: f64,
}

#[derive(Debug, Serialize)]
pub struct ComboSection {
    pub feasible: bool,
    pub lambda_plus: Option<f64>,
    pub lambda_minus: Option<f64>,
    pub global: Option<f64>,
    pub given_q: Option<Curve>,
    pub given_p: Option<Curve>,
    pub infeasibility: Option<Infeasibility>,
}

#[derive(Debug, Serialize)]
pub struct CausalSection {
    pub epsilon_plus: CurveSection,
    pub epsilon_minus: CurveSection,
    pub combo: ComboSection,
}

#[derive(Debug, Serialize)]
pub struct ReferenceSection {
    pub global: f64,
    pub given_q: Curve,
    pub given_p: Curve,
}

#[derive(Debug, Serialize)]
pub struct MeasuredResidual {
    pub b: f64,
    /// `|global_moment − quantum.global|`.
    pub global: f64,
}

#[derive(Debug, Serialize)]
pub struct Residuals {
    pub arthurs_kelly: Vec<MeasuredResidual>,
    /// `|combo.global − quantum.global|`.
    pub combo_global: Option<f64>,
    /// Sup over the support of `|combo − quantum|` conditional means.
    pub combo_given_q: Option<f64>,
    pub combo_given_p: Option<f64>,
    pub correlationless_global: f64,
    pub correlationless_given_q: Option<f64>,
    pub correlationless_given_p: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CorrelationReport {
    pub schema_version: u32,
    pub units: &'static str,
    pub state: StateSpec,
    pub grid: GridInfo,
    pub moments: Moments,
    pub quantum: QuantumSection,
    pub arthurs_kelly: Vec<MeasurementSection>,
    pub causal: CausalSection,
    pub correlationless: ReferenceSection,
    pub residuals: Residuals,
    pub checks: Vec<Check>,
}

fn measurement(wf: &WaveFunction, m: &MomentReport, b: f64) -> Result<MeasurementSection, CliError> {
    let app = ApparatusParams::new(b)?;
    let joint = default_joint(wf, &app)?;
    let (g1, g2): (GridSpec, GridSpec) = default_grids(wf, &app, DEFAULT_JOINT_POINTS)?;
    let (d1, d2) = joint.dispersions();
    let (p1, p2) = app.smeared_dispersions(m);
    Ok(MeasurementSection {
        b,
        global_moment: joint.global_moment(),
        delta_x1: d1,
        delta_x2: d2,
        predicted_delta_x1: p1,
        predicted_delta_x2: p2,
        noise_product: d1 * d2,
        joint_mass: joint.mass,
        given_x1: (&conditional_curve(wf, &app, Axis::GivenPosition, &g1)?).into(),
        given_x2: (&conditional_curve(wf, &app, Axis::GivenMomentum, &g2)?).into(),
    })
}

fn curve_section(curve: &TransportCurve) -> Result<CurveSection, CliError> {
    let r = causal_report(curve)?;
    Ok(CurveSection {
        global: r.global,
        pushforward_steps: curve.pushforward_distance(PUSHFORWARD_TRIM),
        given_q: (&r.given_q).into(),
        given_p: (&r.given_p).into(),
    })
}

pub fn build(settings: &ReportSettings) -> Result<CorrelationReport, CliError> {
    let wf = settings.state.build(&settings.grid)?;
    let m = moments(&wf)?;
    let exact = quantum::report(&wf)?;

    let arthurs_kelly = settings
        .b_values
        .iter()
        .map(|&b| measurement(&wf, &m, b))
        .collect::<Result<Vec<_>, _>>()?;

    let mut combo: CausalCombo = combine(&wf, 0.5)?;
    let epsilon_plus = curve_section(&combo.curve_plus)?;
    let epsilon_minus = curve_section(&combo.curve_minus)?;
    let (combo_section, combo_report) = match convex_weights(exact.global, combo.global_plus, combo.global_minus) {
        Ok((lp, lm)) => {
            combo.lambda_plus = lp;
            combo.lambda_minus = lm;
            let r = combo_correlations(&combo)?;
            let section = ComboSection {
                feasible: true,
                lambda_plus: Some(lp),
                lambda_minus: Some(lm),
                global: Some(r.global),
                given_q: Some((&r.given_q).into()),
                given_p: Some((&r.given_p).into()),
                infeasibility: None,
            };
            (section, Some(r))
        }
        Err(Error::Infeasible { quantum, plus, minus }) => (
            ComboSection {
                feasible: false,
                lambda_plus: None,
                lambda_minus: None,
                global: None,
                given_q: None,
                given_p: None,
                infeasibility: Some(Infeasibility { quantum, plus, minus }),
            },
            None,
        ),
        Err(e) => return Err(e.into()),
    };
    let reference = correlationless_reference(&wf)?;

    let residuals = Residuals {
        arthurs_kelly: arthurs_kelly
            .iter()
            .map(|s| MeasuredResidual {
                b: s.b,
                global: (s.global_moment - exact.global).abs(),
            })
            .collect(),
        combo_global: combo_report.as_ref().map(|r| (r.global - exact.global).abs()),
        combo_given_q: combo_report
            .as_ref()
            .and_then(|r| r.given_q.max_deviation(&exact.given_q)),
        combo_given_p: combo_report
            .as_ref()
            .and_then(|r| r.given_p.max_deviation(&exact.given_p)),
        correlationless_global: exact.global.abs(),
        correlationless_given_q: reference.given_q.max_deviation(&exact.given_q),
        correlationless_given_p: reference.given_p.max_deviation(&exact.given_p),
    };

    let mut checks: Vec<Check> = residuals
        .arthurs_kelly
        .iter()
        .map(|r| Check::below(format!("arthurs_kelly_global_b={}", r.b), r.global, GLOBAL_TOLERANCE))
        .collect();
    checks.push(Check::below(
        "pushforward_plus",
        epsilon_plus.pushforward_steps,
        PUSHFORWARD_BOUND,
    ));
    checks.push(Check::below(
        "pushforward_minus",
        epsilon_minus.pushforward_steps,
        PUSHFORWARD_BOUND,
    ));
    if let Some(g) = residuals.combo_global {
        checks.push(Check::below("combo_global", g, FIT_TOLERANCE));
    }

    let (q, p) = (wf.position_grid(), wf.momentum_grid());
    Ok(CorrelationReport {
        schema_version: output::SCHEMA_VERSION,
        units: output::UNITS,
        state: settings.state.clone(),
        grid: GridInfo {
            n_points: q.len(),
            q_min: q.x_min(),
            q_max: q.x_max(),
            p_min: p.x_min(),
            p_max: p.x_max(),
        },
        moments: (&m).into(),
        quantum: QuantumSection {
            global: exact.global,
            given_q: (&exact.given_q).into(),
            given_p: (&exact.given_p).into(),
        },
        arthurs_kelly,
        causal: CausalSection {
            epsilon_plus,
            epsilon_minus,
            combo: combo_section,
        },
        correlationless: ReferenceSection {
            global: reference.global,
            given_q: (&reference.given_q).into(),
            given_p: (&reference.given_p).into(),
        },
        residuals,
        checks,
    })
}

/// Long-format rows `section,axis,b,x,value`; masked points are omitted and
/// scalar results use axis `global` with an empty `x`.
pub fn to_csv(r: &CorrelationReport) -> String {
    let mut rows: Vec<Vec<String>> = Vec::new();
    let scalar = |section: &str, b: Option<f64>, value: f64, rows: &mut Vec<Vec<String>>| {
        rows.push(vec![
            section.into(),
            "global".into(),
            b.map(num).unwrap_or_default(),
            String::new(),
            num(value),
        ]);
    };
    let curve = |section: &str, axis: &str, b: Option<f64>, c: &Curve, rows: &mut Vec<Vec<String>>| {
        for (x, m) in c.points.iter().zip(&c.means) {
            if let Some(v) = m {
                rows.push(vec![
                    section.into(),
                    axis.into(),
                    b.map(num).unwrap_or_default(),
                    num(*x),
                    num(*v),
                ]);
            }
        }
    };
    scalar("quantum", None, r.quantum.global, &mut rows);
    curve("quantum", "given_q", None, &r.quantum.given_q, &mut rows);
    curve("quantum", "given_p", None, &r.quantum.given_p, &mut rows);
    for s in &r.arthurs_kelly {
        scalar("arthurs_kelly", Some(s.b), s.global_moment, &mut rows);
        curve("arthurs_kelly", "given_x1", Some(s.b), &s.given_x1, &mut rows);
        curve("arthurs_kelly", "given_x2", Some(s.b), &s.given_x2, &mut rows);
    }
    for (name, s) in [
        ("causal_plus", &r.causal.epsilon_plus),
        ("causal_minus", &r.causal.epsilon_minus),
    ] {
        scalar(name, None, s.global, &mut rows);
        curve(name, "given_q", None, &s.given_q, &mut rows);
        curve(name, "given_p", None, &s.given_p, &mut rows);
    }
    let c = &r.causal.combo;
    if let (Some(g), Some(cq), Some(cp)) = (c.global, &c.given_q, &c.given_p) {
        scalar("combo", None, g, &mut rows);
        curve("combo", "given_q", None, cq, &mut rows);
        curve("combo", "given_p", None, cp, &mut rows);
    }
    scalar("correlationless", None, r.correlationless.global, &mut rows);
    curve(
        "correlationless",
        "given_q",
        None,
        &r.correlationless.given_q,
        &mut rows,
    );
    curve(
        "correlationless",
        "given_p",
        None,
        &r.correlationless.given_p,
        &mut rows,
    );
    output::csv(&["section", "axis", "b", "x", "value"], rows)
}

pub fn run(settings: &ReportSettings) -> Result<Outcome, CliError> {
    let report = build(settings)?;
    let text = match settings.format {
        Format::Json => output::json(&report),
        Format::Csv => to_csv(&report),
    };
    Ok(Outcome {
        documents: vec![Document {
            path: settings.out.clone(),
            text,
        }],
        failed_checks: output::failed(&report.checks),
    })
}
