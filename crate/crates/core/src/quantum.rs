//! Exact quantum local and global correlations of position and momentum.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate, GridSpec};
use crate::states::{moments, MomentReport, WaveFunction};

/// Conditional means are defined where the marginal density is at least
/// this fraction of its maximum.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

/// The variable a conditional mean is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Mean momentum at fixed position (or `x₂` at fixed `x₁`).
    GivenPosition,
    /// Mean position at fixed momentum (or `x₁` at fixed `x₂`).
    GivenMomentum,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::GivenPosition => "given_q",
            Axis::GivenMomentum => "given_p",
        }
    }
}

/// Conditional mean sampled on a grid, masked outside the support.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCorrelationCurve {
    pub axis: Axis,
    pub points: Vec<f64>,
    /// `None` where the marginal density falls below the support threshold.
    pub means: Vec<Option<f64>>,
}

impl LocalCorrelationCurve {
    pub fn support(&self) -> impl Iterator<Item = bool> + '_ {
        self.means.iter().map(Option::is_some)
    }

    /// `(point, mean)` pairs on the support.
    pub fn supported(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .zip(&self.means)
            .filter_map(|(&x, m)| m.map(|m| (x, m)))
    }

    /// Largest deviation from `other` over the points both curves support.
    pub fn max_deviation(&self, other: &LocalCorrelationCurve) -> Option<f64> {
        self.means
            .iter()
            .zip(&other.means)
            .filter_map(|(a, b)| Some((a.as_ref()? - b.as_ref()?).abs()))
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
    }
}

pub(crate) fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

fn ratio(numerator: Complex64, density: f64, floor: f64, value: f64) -> Result<f64> {
    if !(density >= floor) || density <= 0.0 {
        return Err(Error::Unsupported { value });
    }
    Ok(numerator.re / density)
}

/// `⟨p̂⟩(q) = Re(φ*(q)(−i)φ′(q)) / |φ(q)|²`.
pub fn local_p_given_q(wf: &WaveFunction, q: f64) -> Result<f64> {
    let phi = wf.position_at(q);
    let floor = SUPPORT_THRESHOLD * max_of(&wf.position_density());
    ratio(phi.conj() * wf.momentum_operator_at(q), phi.norm_sqr(), floor, q)
}

/// `⟨q̂⟩(p) = Re(φ̃*(p)(+i)φ̃′(p)) / |φ̃(p)|²`.
pub fn local_q_given_p(wf: &WaveFunction, p: f64) -> Result<f64> {
    let phi = wf.momentum_at(p);
    let floor = SUPPORT_THRESHOLD * max_of(&wf.momentum_density());
    ratio(phi.conj() * wf.position_operator_at(p), phi.norm_sqr(), floor, p)
}

fn curve_from(axis: Axis, grid: &GridSpec, amps: &[Complex64], op: &[Complex64]) -> LocalCorrelationCurve {
    let density: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let floor = SUPPORT_THRESHOLD * max_of(&density);
    let means = amps
        .iter()
        .zip(op)
        .zip(&density)
        .map(|((a, o), &d)| (d >= floor && d > 0.0).then(|| (a.conj() * o).re / d))
        .collect();
    LocalCorrelationCurve {
        axis,
        points: grid.points().collect(),
        means,
    }
}

/// The local correlation on every point of the matching grid.
pub fn local_curve(wf: &WaveFunction, axis: Axis) -> Result<LocalCorrelationCurve> {
    Ok(match axis {
        Axis::GivenPosition => curve_from(
            axis,
            wf.position_grid(),
            wf.position_amplitudes(),
            &wf.momentum_operator_position()?,
        ),
        Axis::GivenMomentum => curve_from(
            axis,
            wf.momentum_grid(),
            wf.momentum_amplitudes(),
            &wf.position_operator_momentum()?,
        ),
    })
}

/// `⟨q̂p̂ + p̂q̂⟩ − 2⟨q̂⟩⟨p̂⟩`.
pub fn global_correlation(wf: &WaveFunction) -> Result<f64> {
    let current = wf.momentum_operator_position()?;
    let integrand: Vec<f64> = wf
        .position_amplitudes()
        .iter()
        .zip(&current)
        .zip(wf.position_grid().points())
        .map(|((a, o), q)| 2.0 * q * (a.conj() * o).re)
        .collect();
    let m = moments(wf)?;
    Ok(integrate(&integrand, wf.position_grid())? - 2.0 * m.mean_q * m.mean_p)
}

/// Local curves on the state's grids and the global correlation produced by
/// one method.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub given_q: LocalCorrelationCurve,
    pub given_p: LocalCorrelationCurve,
    pub global: f64,
    pub moments: MomentReport,
}

/// The exact quantum correlations.
pub fn report(wf: &WaveFunction) -> Result<CorrelationReport> {
    Ok(CorrelationReport {
        given_q: local_curve(wf, Axis::GivenPosition)?,
        given_p: local_curve(wf, Axis::GivenMomentum)?,
        global: global_correlation(wf)?,
        moments: moments(wf)?,
    })
}
