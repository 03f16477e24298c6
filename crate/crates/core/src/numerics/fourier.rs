//! Continuous Fourier transform sampled on a conjugate pair of grids.
//!
//! Convention (ħ = 1):
//!
//! ```text
//! φ̃(p) = (2π)^{-1/2} ∫ dq e^{-ipq} φ(q),   φ(q) = (2π)^{-1/2} ∫ dp e^{ipq} φ̃(p)
//! ```
//!
//! Both integrals are discretized by the rectangle rule, which for
//! functions decaying at the grid edges is the spectrally accurate choice and
//! makes the discrete transform exactly unitary.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::fft::{fft, Direction};
use super::grid::GridSpec;
use crate::error::Result;

/// A position grid and the momentum grid conjugate to it.
///
/// Both grids have `N` points and `step_q · step_p = 2π / N`; the momentum grid
/// may be centred anywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPair {
    position: GridSpec,
    momentum: GridSpec,
}

impl GridPair {
    pub fn new(position: GridSpec, momentum_center: f64) -> Result<Self> {
        let n = position.len();
        let dp = 2.0 * PI / (n as f64 * position.step());
        let momentum = GridSpec::centered(momentum_center, dp, n)?;
        Ok(Self { position, momentum })
    }

    /// Smallest power-of-two grid pair (at least `min_points`) whose position
    /// grid covers `q_center ± q_half_width` and whose momentum grid covers
    /// `p_center ± p_half_width`. The step is chosen so both ranges carry the
    /// same relative margin.
    pub fn covering(
        q_center: f64,
        q_half_width: f64,
        p_center: f64,
        p_half_width: f64,
        min_points: usize,
    ) -> Result<Self> {
        let mut n = min_points.next_power_of_two().max(16);
        // need (n-1)·h/2 ≥ Rq and π/h·(n-1)/n ≥ Rp
        while 2.0 * q_half_width * p_half_width > PI * (n - 1) as f64 * (n - 1) as f64 / n as f64 {
            n *= 2;
        }
        let h = (2.0 * PI * q_half_width / (n as f64 * p_half_width)).sqrt();
        let position = GridSpec::centered(q_center, h, n)?;
        Self::new(position, p_center)
    }

    pub fn position(&self) -> &GridSpec {
        &self.position
    }

    pub fn momentum(&self) -> &GridSpec {
        &self.momentum
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Pair with `factor`× finer momentum spacing, obtained by padding the
    /// position grid symmetrically (same position step, wider range).
    pub fn finer_momentum(&self, factor: usize) -> Result<Self> {
        let n = self.len() * factor;
        let position = GridSpec::centered(self.position.center(), self.position.step(), n)?;
        Self::new(position, self.momentum.center())
    }

    /// Pair with `factor`× finer position spacing (same momentum step, wider
    /// momentum range).
    pub fn finer_position(&self, factor: usize) -> Result<Self> {
        let n = self.len() * factor;
        let position = GridSpec::centered(self.position.center(), self.position.step() / factor as f64, n)?;
        Self::new(position, self.momentum.center())
    }
}

fn phase(angle: f64) -> Complex64 {
    Complex64::new(angle.cos(), angle.sin())
}

/// Position amplitudes → momentum amplitudes.
pub fn forward(psi: &[Complex64], grids: &GridPair) -> Result<Vec<Complex64>> {
    let (q, p) = (grids.position(), grids.momentum());
    q.check_len(psi.len())?;
    let (h, x0, p0, dp) = (q.step(), q.x_min(), p.x_min(), p.step());
    let mut buf: Vec<Complex64> = psi
        .iter()
        .enumerate()
        .map(|(j, a)| a * phase(-p0 * j as f64 * h))
        .collect();
    fft(&mut buf, Direction::Forward);
    let scale = h / (2.0 * PI).sqrt();
    for (k, a) in buf.iter_mut().enumerate() {
        let pk = p0 + k as f64 * dp;
        *a *= phase(-pk * x0) * scale;
    }
    Ok(buf)
}

/// Momentum amplitudes → position amplitudes.
pub fn inverse(phi: &[Complex64], grids: &GridPair) -> Result<Vec<Complex64>> {
    let (q, p) = (grids.position(), grids.momentum());
    p.check_len(phi.len())?;
    let (h, x0, p0, dp) = (q.step(), q.x_min(), p.x_min(), p.step());
    let mut buf: Vec<Complex64> = phi
        .iter()
        .enumerate()
        .map(|(k, a)| a * phase((p0 + k as f64 * dp) * x0))
        .collect();
    fft(&mut buf, Direction::Backward);
    let scale = dp / (2.0 * PI).sqrt();
    for (j, a) in buf.iter_mut().enumerate() {
        *a *= phase(p0 * j as f64 * h) * scale;
    }
    Ok(buf)
}

/// Evaluates `(2π)^{-1/2} Σ_k w · c_k e^{i s y_k x}` at an arbitrary `x`:
/// the band-limited interpolant of the conjugate-side samples.
pub(crate) fn synthesize(coeffs: &[Complex64], conjugate: &GridSpec, x: f64, sign: f64) -> Complex64 {
    let (y0, dy) = (conjugate.x_min(), conjugate.step());
    // e^{i s (y0 + k dy) x} by recurrence from one exact phase per block
    let base = phase(sign * dy * x);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut rot = phase(sign * y0 * x);
    for (k, c) in coeffs.iter().enumerate() {
        if k % 64 == 0 {
            rot = phase(sign * (y0 + k as f64 * dy) * x);
        }
        acc += c * rot;
        rot *= base;
    }
    acc * dy / (2.0 * PI).sqrt()
}
