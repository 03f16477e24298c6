//! Ratio of the Arthurs-Kelly local correlation to the `ε = +1` causal
//! local correlation for spreading Gaussian packets with `Δq = Δp`.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::arthurs_kelly::{conditional_mean, ApparatusParams};
use crate::causal::{build_transport_curve, causal_conditional, Epsilon};
use crate::error::{Error, Result};
use crate::quantum::Axis;
use crate::states::{build_gaussian_packet, moments, GaussianPacketParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigurePoint {
    pub b_over_dq: f64,
    pub dqdp: f64,
    pub ratio_numeric: f64,
    pub ratio_closed_form: f64,
    pub abs_error: f64,
}

/// `√(1 − (2ΔqΔp)⁻²) / (1 + (b/Δq)²)`.
pub fn ratio_closed_form(b_over_dq: f64, dqdp: f64) -> f64 {
    (1.0 - (2.0 * dqdp).powi(-2)).max(0.0).sqrt() / (1.0 + b_over_dq * b_over_dq)
}

/// Both correlations are read one position dispersion above the mean.
pub fn figure_point(b_over_dq: f64, dqdp: f64) -> Result<FigurePoint> {
    if !(b_over_dq > 0.0 && b_over_dq.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "b_over_dq",
            value: b_over_dq,
        });
    }
    let params = GaussianPacketParams::with_uncertainty_product(dqdp)?;
    let wf = build_gaussian_packet(&params, &params.auto_grid()?)?;
    let m = moments(&wf)?;
    let q = m.mean_q + m.delta_q;
    let app = ApparatusParams::new(b_over_dq * m.delta_q)?;
    let measured = conditional_mean(&wf, &app, Axis::GivenPosition, q)? - m.mean_p;
    let curve = build_transport_curve(&wf, Epsilon::Plus)?;
    let causal = causal_conditional(&curve, Axis::GivenPosition, q)? - m.mean_p;
    let ratio_numeric = measured / causal;
    let ratio_closed_form = ratio_closed_form(b_over_dq, dqdp);
    Ok(FigurePoint {
        b_over_dq,
        dqdp,
        ratio_numeric,
        ratio_closed_form,
        abs_error: (ratio_numeric - ratio_closed_form).abs(),
    })
}

/// Rows in schedule order, `b/Δq` varying fastest.
pub fn figure_sweep(b_over_dq: &[f64], dqdp: &[f64]) -> Result<Vec<FigurePoint>> {
    if b_over_dq.is_empty() || dqdp.is_empty() {
        return Err(Error::InvalidParameter {
            name: "schedule_length",
            value: 0.0,
        });
    }
    let mut rows = Vec::with_capacity(b_over_dq.len() * dqdp.len());
    for &product in dqdp {
        for &b in b_over_dq {
            rows.push(figure_point(b, product)?);
        }
    }
    Ok(rows)
}
