use std::path::PathBuf;

use num_complex::Complex64;
use phasecorr_core::causal::combo_correlations;
use phasecorr_core::composite::{
    build_entangled_coherent_density, build_epr_density, pair_marginal, verify_pairs, EprParams, Factor, LinearForm,
    PairMarginal, TwoModeProductDensity,
};
use phasecorr_core::quantum::global_correlation;
use phasecorr_core::Error;
use serde::Serialize;

use crate::config::CompositeSpec;
use crate::error::{config, CliError};
use crate::output::{self, Check, Document, Outcome};
use crate::pairs::parse_pair;

/// Largest tolerated sup-norm residual of a pair marginal.
pub const PAIR_TOLERANCE: f64 = 1e-5;

pub struct CompositeSettings {
    pub spec: CompositeSpec,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Coordinates {
    position: String,
    momentum: String,
}

#[derive(Debug, Serialize)]
struct FactorOut {
    coordinates: Coordinates,
    lambda_plus: f64,
    lambda_minus: f64,
    global_plus: f64,
    global_minus: f64,
    combo_global: f64,
    quantum_global: f64,
}

#[derive(Debug, Serialize)]
struct PairOut {
    x: String,
    y: String,
    residual: f64,
    mass: f64,
}

#[derive(Debug, Serialize)]
struct CompositeReport {
    schema_version: u32,
    units: &'static str,
    composite: CompositeSpec,
    factors: Vec<FactorOut>,
    listed_pairs: Vec<PairOut>,
    requested_pairs: Vec<PairOut>,
    max_residual: f64,
    checks: Vec<Check>,
}

fn factor_out(f: &Factor, position: LinearForm, momentum: LinearForm) -> Result<FactorOut, CliError> {
    Ok(FactorOut {
        coordinates: Coordinates {
            position: position.to_string(),
            momentum: momentum.to_string(),
        },
        lambda_plus: f.combo.lambda_plus,
        lambda_minus: f.combo.lambda_minus,
        global_plus: f.combo.global_plus,
        global_minus: f.combo.global_minus,
        combo_global: combo_correlations(&f.combo)?.global,
        quantum_global: global_correlation(&f.wave)?,
    })
}

fn pair_out(m: &PairMarginal) -> PairOut {
    PairOut {
        x: m.pair.0.to_string(),
        y: m.pair.1.to_string(),
        residual: m.residual,
        mass: m.mass,
    }
}

fn requested(pairs: &[[String; 2]]) -> Result<Vec<(LinearForm, LinearForm)>, CliError> {
    pairs
        .iter()
        .map(|[a, b]| parse_pair(&format!("{a},{b}")).map_err(config))
        .collect()
}

pub fn run(s: &CompositeSettings) -> Result<Outcome, CliError> {
    let (density, extra): (TwoModeProductDensity, _) = match &s.spec {
        CompositeSpec::Epr {
            alpha1,
            alpha2,
            q0,
            p0,
            pairs,
        } => {
            let params = EprParams::new(*alpha1, *alpha2, *q0, *p0).map_err(|e| config(e.to_string()))?;
            let extra = requested(pairs)?;
            (build_epr_density(&params)?, extra)
        }
        CompositeSpec::EntangledCoherent {
            m,
            n,
            alpha,
            beta,
            omega,
            t0,
            pairs,
        } => {
            let extra = requested(pairs)?;
            let d = build_entangled_coherent_density(
                *m,
                *n,
                Complex64::new(alpha[0], alpha[1]),
                Complex64::new(beta[0], beta[1]),
                *omega,
                *t0,
            )
            .map_err(|e| match e {
                Error::InvalidParameter { .. } | Error::HermiteOrder { .. } => config(e.to_string()),
                e => e.into(),
            })?;
            (d, extra)
        }
    };
    let requested_pairs = extra
        .iter()
        .map(|&p| match pair_marginal(&density, p) {
            Ok(m) => Ok(pair_out(&m)),
            Err(Error::UnsupportedPair) => Err(config(format!(
                "pair ({}, {}) is not a commuting pair of collective coordinates",
                p.0, p.1
            ))),
            Err(e) => Err(e.into()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let listed: Vec<PairOut> = verify_pairs(&density)?.iter().map(pair_out).collect();
    let t = density.transform;
    let factors = vec![
        factor_out(&density.factor_a, t.a.position, t.a.momentum)?,
        factor_out(&density.factor_b, t.b.position, t.b.momentum)?,
    ];
    let max_residual = listed
        .iter()
        .chain(&requested_pairs)
        .fold(0.0f64, |m, p| m.max(p.residual));
    let checks = vec![Check::below("pair_marginal_residual", max_residual, PAIR_TOLERANCE)];
    let report = CompositeReport {
        schema_version: output::SCHEMA_VERSION,
        units: output::UNITS,
        composite: s.spec.clone(),
        factors,
        listed_pairs: listed,
        requested_pairs,
        max_residual,
        checks: checks.clone(),
    };
    Ok(Outcome {
        documents: vec![Document {
            path: s.out.clone(),
            text: output::json(&report),
        }],
        failed_checks: output::failed(&checks),
    })
}
