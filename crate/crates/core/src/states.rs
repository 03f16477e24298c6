//! One-mode wavefunctions on a conjugate grid pair, the two worked state
//! families (spreading Gaussian packets, displaced Fock states) and their
//! first and second moments.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::fourier::{self, synthesize};
use crate::numerics::grid::MIN_STATE_POINTS;
use crate::numerics::{hermite_functions, integrate, GridPair, GridSpec, MAX_HERMITE_ORDER};

/// Largest amplitude tolerated at either end of either grid.
pub const EDGE_TOLERANCE: f64 = 1e-12;
/// Normalization must survive the transform to this accuracy.
pub const TRANSFORM_NORM_TOLERANCE: f64 = 1e-6;
/// Half-width of auto-sized grids, in units of the state's dispersion.
pub const SPAN_DISPERSIONS: f64 = 12.0;
pub const DEFAULT_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        }
    }
}

/// Normalized pure state sampled on a conjugate grid pair.
///
/// Both representations are held; `representation` records which one the
/// state was specified in.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grids: GridPair,
    position: Vec<Complex64>,
    momentum: Vec<Complex64>,
    representation: Representation,
}

impl WaveFunction {
    fn from_parts(grids: GridPair, amplitudes: Vec<Complex64>, representation: Representation) -> Result<Self> {
        if grids.len() < MIN_STATE_POINTS {
            return Err(Error::InvalidRange {
                x_min: grids.position().x_min(),
                x_max: grids.position().x_max(),
                n_points: grids.len(),
            });
        }
        let (position, momentum) = match representation {
            Representation::Position => {
                let m = fourier::forward(&amplitudes, &grids)?;
                (amplitudes, m)
            }
            Representation::Momentum => {
                let p = fourier::inverse(&amplitudes, &grids)?;
                (p, amplitudes)
            }
        };
        let wf = Self {
            grids,
            position,
            momentum,
            representation,
        };
        let other = match representation {
            Representation::Position => wf.momentum_norm()?,
            Representation::Momentum => wf.position_norm()?,
        };
        if (other - 1.0).abs() > TRANSFORM_NORM_TOLERANCE {
            return Err(Error::GridTooCoarse { deviation: other - 1.0 });
        }
        Ok(wf)
    }

    fn position_norm(&self) -> Result<f64> {
        integrate(&self.position_density(), self.grids.position())
    }

    fn momentum_norm(&self) -> Result<f64> {
        integrate(&self.momentum_density(), self.grids.momentum())
    }

    pub fn grids(&self) -> &GridPair {
        &self.grids
    }

    /// Grid of the representation the state was specified in.
    pub fn grid(&self) -> &GridSpec {
        match self.representation {
            Representation::Position => self.grids.position(),
            Representation::Momentum => self.grids.momentum(),
        }
    }

    pub fn position_grid(&self) -> &GridSpec {
        self.grids.position()
    }

    pub fn momentum_grid(&self) -> &GridSpec {
        self.grids.momentum()
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        match self.representation {
            Representation::Position => &self.position,
            Representation::Momentum => &self.momentum,
        }
    }

    pub fn position_amplitudes(&self) -> &[Complex64] {
        &self.position
    }

    pub fn momentum_amplitudes(&self) -> &[Complex64] {
        &self.momentum
    }

    pub fn position_density(&self) -> Vec<f64> {
        self.position.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn momentum_density(&self) -> Vec<f64> {
        self.momentum.iter().map(|a| a.norm_sqr()).collect()
    }

    /// The same state viewed in the momentum representation.
    pub fn fourier_transform(&self) -> Result<WaveFunction> {
        if self.representation != Representation::Position {
            return Err(Error::Representation { expected: "position" });
        }
        Ok(Self {
            representation: Representation::Momentum,
            ..self.clone()
        })
    }

    pub fn inverse_fourier_transform(&self) -> Result<WaveFunction> {
        if self.representation != Representation::Momentum {
            return Err(Error::Representation { expected: "momentum" });
        }
        Ok(Self {
            representation: Representation::Position,
            ..self.clone()
        })
    }

    /// `φ(q)` at any `q`, by band-limited synthesis from the momentum samples.
    pub fn position_at(&self, q: f64) -> Complex64 {
        synthesize(&self.momentum, self.grids.momentum(), q, 1.0)
    }

    /// `φ̃(p)` at any `p`.
    pub fn momentum_at(&self, p: f64) -> Complex64 {
        synthesize(&self.position, self.grids.position(), p, -1.0)
    }

    /// `(−i) ∂φ/∂q` on the position grid, computed spectrally.
    pub fn momentum_operator_position(&self) -> Result<Vec<Complex64>> {
        let scaled: Vec<Complex64> = self
            .momentum
            .iter()
            .zip(self.grids.momentum().points())
            .map(|(a, p)| a * p)
            .collect();
        fourier::inverse(&scaled, &self.grids)
    }

    /// `(+i) ∂φ̃/∂p` on the momentum grid, computed spectrally.
    pub fn position_operator_momentum(&self) -> Result<Vec<Complex64>> {
        let scaled: Vec<Complex64> = self
            .position
            .iter()
            .zip(self.grids.position().points())
            .map(|(a, q)| a * q)
            .collect();
        fourier::forward(&scaled, &self.grids)
    }

    /// `(−i) ∂φ/∂q` at an arbitrary point.
    pub fn momentum_operator_at(&self, q: f64) -> Complex64 {
        let scaled: Vec<Complex64> = self
            .momentum
            .iter()
            .zip(self.grids.momentum().points())
            .map(|(a, p)| a * p)
            .collect();
        synthesize(&scaled, self.grids.momentum(), q, 1.0)
    }

    /// `(+i) ∂φ̃/∂p` at an arbitrary point.
    pub fn position_operator_at(&self, p: f64) -> Complex64 {
        let scaled: Vec<Complex64> = self
            .position
            .iter()
            .zip(self.grids.position().points())
            .map(|(a, q)| a * q)
            .collect();
        synthesize(&scaled, self.grids.position(), p, -1.0)
    }

    /// Resamples onto grids `position_factor`× finer in q and
    /// `momentum_factor`× finer in p by zero-padding the conjugate side.
    pub fn refined(&self, position_factor: usize, momentum_factor: usize) -> Result<WaveFunction> {
        let mut wf = self.clone();
        if position_factor > 1 {
            let grids = wf.grids.finer_position(position_factor)?;
            let padded = pad(&wf.momentum, grids.len())?;
            wf = Self::from_parts(grids, padded, Representation::Momentum)?;
        }
        if momentum_factor > 1 {
            let grids = wf.grids.finer_momentum(momentum_factor)?;
            let padded = pad(&wf.position, grids.len())?;
            wf = Self::from_parts(grids, padded, Representation::Position)?;
        }
        wf.representation = self.representation;
        Ok(wf)
    }

    /// Refinement factors (powers of two) that bring both steps below the
    /// requested resolutions.
    pub fn refined_to(&self, max_q_step: f64, max_p_step: f64) -> Result<WaveFunction> {
        let factor = |step: f64, target: f64| {
            let mut f = 1usize;
            while step / f as f64 > target {
                f *= 2;
            }
            f
        };
        self.refined(
            factor(self.position_grid().step(), max_q_step),
            factor(self.momentum_grid().step(), max_p_step),
        )
    }

    fn edge_amplitude(&self) -> (f64, &'static str) {
        let edge = |a: &[Complex64]| {
            let n = a.len();
            a[0].norm().max(a[n - 1].norm())
        };
        let (q, p) = (edge(&self.position), edge(&self.momentum));
        if q >= p {
            (q, Representation::Position.name())
        } else {
            (p, Representation::Momentum.name())
        }
    }

    pub(crate) fn check_span(self) -> Result<Self> {
        let (amplitude, representation) = self.edge_amplitude();
        if amplitude >= EDGE_TOLERANCE {
            return Err(Error::GridSpan {
                amplitude,
                representation,
            });
        }
        Ok(self)
    }
}

fn pad(values: &[Complex64], len: usize) -> Result<Vec<Complex64>> {
    let extra = len - values.len();
    if !extra.is_multiple_of(2) {
        return Err(Error::LengthMismatch {
            expected: len - 1,
            found: len,
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    out[extra / 2..extra / 2 + values.len()].copy_from_slice(values);
    Ok(out)
}

fn normalize(mut amplitudes: Vec<Complex64>, grid: &GridSpec) -> Result<Vec<Complex64>> {
    let density: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let norm = integrate(&density, grid)?;
    if !(norm > 0.0) {
        return Err(Error::ZeroState);
    }
    let scale = 1.0 / norm.sqrt();
    amplitudes.iter_mut().for_each(|a| *a *= scale);
    Ok(amplitudes)
}

/// Free-particle spreading Gaussian packet, specified in momentum space:
///
/// `φ̃(p) = (πα)^{-1/4} exp[−(p−β)²/(2α) − i (t₀/m) p²/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacketParams {
    pub alpha: f64,
    pub beta: f64,
    /// Elapsed time over mass; the only way `t₀` and `m` enter.
    pub t0_over_m: f64,
}

impl GaussianPacketParams {
    pub fn new(alpha: f64, beta: f64, t0_over_m: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
            });
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
            });
        }
        if !t0_over_m.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t0_over_m",
                value: t0_over_m,
            });
        }
        Ok(Self { alpha, beta, t0_over_m })
    }

    /// Packet with `Δq = Δp = √(ΔqΔp)` and the requested uncertainty product
    /// (≥ 1/2), centred at the origin with positive spreading time.
    pub fn with_uncertainty_product(product: f64) -> Result<Self> {
        if !(product >= 0.5 && product.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "uncertainty_product",
                value: product,
            });
        }
        let alpha = 2.0 * product;
        let t = (4.0 * product * product - 1.0).max(0.0).sqrt() / alpha;
        Self::new(alpha, 0.0, t)
    }

    pub fn delta_p(&self) -> f64 {
        (self.alpha / 2.0).sqrt()
    }

    pub fn delta_q(&self) -> f64 {
        ((1.0 + (self.alpha * self.t0_over_m).powi(2)) / (2.0 * self.alpha)).sqrt()
    }

    pub fn mean_q(&self) -> f64 {
        self.beta * self.t0_over_m
    }

    pub fn mean_p(&self) -> f64 {
        self.beta
    }

    pub fn auto_grid(&self) -> Result<GridPair> {
        GridPair::covering(
            self.mean_q(),
            SPAN_DISPERSIONS * self.delta_q() + 1.0,
            self.mean_p(),
            SPAN_DISPERSIONS * self.delta_p() + 1.0,
            DEFAULT_POINTS,
        )
    }

    pub fn momentum_amplitude(&self, p: f64) -> Complex64 {
        let envelope = (PI * self.alpha).powf(-0.25) * (-(p - self.beta).powi(2) / (2.0 * self.alpha)).exp();
        Complex64::from_polar(envelope, -0.5 * self.t0_over_m * p * p)
    }
}

/// Packet sampled exactly in momentum space; the position representation
/// follows by inverse transform.
pub fn build_gaussian_packet(params: &GaussianPacketParams, grids: &GridPair) -> Result<WaveFunction> {
    let amplitudes: Vec<Complex64> = grids
        .momentum()
        .points()
        .map(|p| params.momentum_amplitude(p))
        .collect();
    let amplitudes = normalize(amplitudes, grids.momentum())?;
    WaveFunction::from_parts(*grids, amplitudes, Representation::Momentum)?.check_span()
}

/// Displaced `n`-th oscillator eigenstate.
///
/// `α = A e^{−i(ωt₀+θ)}`, `q̄ = Re α`, `p̄ = Im α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedCoherentParams {
    pub n: usize,
    pub amplitude: f64,
    pub theta: f64,
    pub omega: f64,
    pub t0: f64,
}

impl GeneralizedCoherentParams {
    pub fn new(n: usize, amplitude: f64, theta: f64, omega: f64, t0: f64) -> Result<Self> {
        if n > MAX_HERMITE_ORDER {
            return Err(Error::HermiteOrder {
                n,
                max: MAX_HERMITE_ORDER,
            });
        }
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                value: amplitude,
            });
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: omega,
            });
        }
        for (name, value) in [("theta", theta), ("t0", t0)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Self {
            n,
            amplitude,
            theta,
            omega,
            t0,
        })
    }

    /// Parameters reproducing a given complex displacement `α` at time `t₀`.
    pub fn from_alpha(n: usize, alpha: Complex64, omega: f64, t0: f64) -> Result<Self> {
        let theta = -alpha.arg() - omega * t0;
        Self::new(n, alpha.norm(), theta, omega, t0)
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, -(self.omega * self.t0 + self.theta))
    }

    pub fn q_bar(&self) -> f64 {
        self.alpha().re
    }

    pub fn p_bar(&self) -> f64 {
        self.alpha().im
    }

    /// `Δq = Δp = √(n + 1/2)`.
    pub fn dispersion(&self) -> f64 {
        (self.n as f64 + 0.5).sqrt()
    }

    pub fn auto_grid(&self) -> Result<GridPair> {
        let r = SPAN_DISPERSIONS * self.dispersion() + 1.0;
        GridPair::covering(self.q_bar(), r, self.p_bar(), r, DEFAULT_POINTS)
    }

    pub fn position_amplitude(&self, q: f64) -> Result<Complex64> {
        let (qb, pb) = (self.q_bar(), self.p_bar());
        let h = hermite_functions(self.n, q - qb)?[self.n];
        let phase = -self.omega * self.t0 * (self.n as f64 + 0.5) + pb * (q - 0.5 * qb);
        Ok(Complex64::from_polar(1.0, phase) * h)
    }
}

pub fn build_generalized_coherent(params: &GeneralizedCoherentParams, grids: &GridPair) -> Result<WaveFunction> {
    let amplitudes = grids
        .position()
        .points()
        .map(|q| params.position_amplitude(q))
        .collect::<Result<Vec<_>>>()?;
    let amplitudes = normalize(amplitudes, grids.position())?;
    WaveFunction::from_parts(*grids, amplitudes, Representation::Position)?.check_span()
}

/// Arbitrary state from samples in either representation, normalized.
pub fn build_custom(
    amplitudes: Vec<Complex64>,
    grids: &GridPair,
    representation: Representation,
) -> Result<WaveFunction> {
    let grid = match representation {
        Representation::Position => grids.position(),
        Representation::Momentum => grids.momentum(),
    };
    grid.check_len(amplitudes.len())?;
    if amplitudes.iter().all(|a| a.norm_sqr() == 0.0) {
        return Err(Error::ZeroState);
    }
    let amplitudes = normalize(amplitudes, grid)?;
    let wf = WaveFunction::from_parts(*grids, amplitudes, representation)?;
    let (amplitude, _) = wf.edge_amplitude();
    if amplitude >= EDGE_TOLERANCE {
        return Err(Error::EdgeLeakage { amplitude });
    }
    Ok(wf)
}

/// Position-space superposition `Σ c_k h_k(q − center)` of Hermite functions.
pub fn build_hermite_superposition(coefficients: &[Complex64], center: f64, grids: &GridPair) -> Result<WaveFunction> {
    let top = coefficients.len().saturating_sub(1);
    let amplitudes = grids
        .position()
        .points()
        .map(|q| {
            let h = hermite_functions(top, q - center)?;
            Ok(coefficients.iter().zip(&h).map(|(c, h)| c * h).sum())
        })
        .collect::<Result<Vec<Complex64>>>()?;
    build_custom(amplitudes, grids, Representation::Position)
}

/// Auto-sized grid pair for a superposition of Hermite functions up to order
/// `top` centred at `center`.
pub fn hermite_superposition_grid(top: usize, center: f64) -> Result<GridPair> {
    let r = SPAN_DISPERSIONS * (top as f64 + 0.5).sqrt() + 1.0;
    GridPair::covering(center, r, 0.0, r, DEFAULT_POINTS)
}

/// Means and dispersions of position and momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub mean_q: f64,
    pub mean_p: f64,
    pub delta_q: f64,
    pub delta_p: f64,
}

impl MomentReport {
    pub fn uncertainty_product(&self) -> f64 {
        self.delta_q * self.delta_p
    }
}

fn mean_and_dispersion(density: &[f64], grid: &GridSpec) -> Result<(f64, f64)> {
    let first: Vec<f64> = density.iter().zip(grid.points()).map(|(d, x)| d * x).collect();
    let mean = integrate(&first, grid)?;
    let second: Vec<f64> = density
        .iter()
        .zip(grid.points())
        .map(|(d, x)| d * (x - mean) * (x - mean))
        .collect();
    Ok((mean, integrate(&second, grid)?.sqrt()))
}

pub fn moments(wf: &WaveFunction) -> Result<MomentReport> {
    let (mean_q, delta_q) = mean_and_dispersion(&wf.position_density(), wf.position_grid())?;
    let (mean_p, delta_p) = mean_and_dispersion(&wf.momentum_density(), wf.momentum_grid())?;
    Ok(MomentReport {
        mean_q,
        mean_p,
        delta_q,
        delta_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn packet(alpha: f64, beta: f64, t: f64) -> WaveFunction {
        let p = GaussianPacketParams::new(alpha, beta, t).unwrap();
        build_gaussian_packet(&p, &p.auto_grid().unwrap()).unwrap()
    }

    fn coherent(n: usize, a: f64, theta: f64) -> WaveFunction {
        let p = GeneralizedCoherentParams::new(n, a, theta, 1.0, 0.0).unwrap();
        build_generalized_coherent(&p, &p.auto_grid().unwrap()).unwrap()
    }

    #[test]
    fn minimum_uncertainty_packet_widths() {
        let m = moments(&packet(1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(m.delta_q, 0.5f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(m.delta_p, 0.5f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn spreading_packet_widths() {
        let m = moments(&packet(1.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(m.delta_q * m.delta_q, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(m.delta_p * m.delta_p, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(m.uncertainty_product(), 0.5f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn packet_mean_momentum() {
        for t in [0.0, 0.7, -2.0] {
            let m = moments(&packet(2.0, 3.0, t)).unwrap();
            assert_abs_diff_eq!(m.mean_p, 3.0, epsilon = 1e-10);
            assert_abs_diff_eq!(m.mean_q, 3.0 * t, epsilon = 1e-9);
        }
    }

    #[test]
    fn position_representation_matches_direct_transform_quadrature() {
        // Oracle: (2π)^{-1/2} ∫ dp e^{ipq} φ̃(p) by Simpson on an independent grid.
        let params = GaussianPacketParams::new(1.0, 0.0, 0.0).unwrap();
        let wf = build_gaussian_packet(&params, &params.auto_grid().unwrap()).unwrap();
        let pg = GridSpec::new(-12.0, 12.0, 2401).unwrap();
        for k in (0..wf.position_grid().len()).step_by(97) {
            let q = wf.position_grid().point(k);
            let re: Vec<f64> = pg
                .points()
                .map(|p| (params.momentum_amplitude(p) * Complex64::from_polar(1.0, p * q)).re)
                .collect();
            let im: Vec<f64> = pg
                .points()
                .map(|p| (params.momentum_amplitude(p) * Complex64::from_polar(1.0, p * q)).im)
                .collect();
            let direct = Complex64::new(integrate(&re, &pg).unwrap(), integrate(&im, &pg).unwrap()) / (2.0 * PI).sqrt();
            assert!((wf.position_amplitudes()[k] - direct).norm() < 1e-10);
            // real Gaussian in both representations
            assert!(wf.position_amplitudes()[k].im.abs() < 1e-12);
        }
    }

    #[test]
    fn ground_state_is_self_reciprocal() {
        let wf = coherent(0, 0.0, 0.0);
        for (p, a) in wf.momentum_grid().points().zip(wf.momentum_amplitudes()) {
            assert!((a - PI.powf(-0.25) * (-p * p / 2.0).exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn coherent_ground_state_moments() {
        let m = moments(&coherent(0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(m.mean_q, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.mean_p, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.uncertainty_product(), 0.5, epsilon = 1e-8);
    }

    #[test]
    fn displaced_second_excited_state() {
        let m = moments(&coherent(2, 1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(m.mean_q, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(m.mean_p, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(m.delta_q.powi(2), 2.5, epsilon = 1e-10);
        assert_abs_diff_eq!(m.delta_p.powi(2), 2.5, epsilon = 1e-10);
    }

    #[test]
    fn displaced_fock_uncertainty_products() {
        for n in 0..5 {
            for (a, theta) in [(0.0, 0.0), (1.3, 0.4), (2.5, -2.0)] {
                let m = moments(&coherent(n, a, theta)).unwrap();
                assert_abs_diff_eq!(m.uncertainty_product(), n as f64 + 0.5, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn displacement_covariance() {
        let params = GeneralizedCoherentParams::new(3, 1.3, 0.4, 1.0, 0.2).unwrap();
        let grids = params.auto_grid().unwrap();
        let wf = build_generalized_coherent(&params, &grids).unwrap();
        let qb = params.q_bar();
        for (q, a) in grids.position().points().zip(wf.position_amplitudes()) {
            let shifted = hermite_functions(3, q - qb).unwrap()[3].abs();
            assert!((a.norm() - shifted).abs() < 1e-10);
        }
        assert_abs_diff_eq!(params.q_bar(), 1.3 * (0.2f64 + 0.4).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(params.p_bar(), -1.3 * (0.2f64 + 0.4).sin(), epsilon = 1e-15);
    }

    #[test]
    fn momentum_density_is_time_independent() {
        let grids = GaussianPacketParams::new(1.0, 0.5, 2.0).unwrap().auto_grid().unwrap();
        let d0 = build_gaussian_packet(&GaussianPacketParams::new(1.0, 0.5, 0.0).unwrap(), &grids)
            .unwrap()
            .momentum_density();
        let d2 = build_gaussian_packet(&GaussianPacketParams::new(1.0, 0.5, 2.0).unwrap(), &grids)
            .unwrap()
            .momentum_density();
        for (a, b) in d0.iter().zip(&d2) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn custom_superposition_mean_position() {
        let grids = hermite_superposition_grid(1, 0.0).unwrap();
        let raw: Vec<Complex64> = grids
            .position()
            .points()
            .map(|q| {
                let h = hermite_functions(1, q).unwrap();
                Complex64::new(h[0] + h[1], 0.0)
            })
            .collect();
        let wf = build_custom(raw.clone(), &grids, Representation::Position).unwrap();
        // quadrature oracle on the unnormalized samples
        let d: Vec<f64> = raw.iter().map(|a| a.norm_sqr()).collect();
        let qd: Vec<f64> = d.iter().zip(grids.position().points()).map(|(d, q)| d * q).collect();
        let oracle = integrate(&qd, grids.position()).unwrap() / integrate(&d, grids.position()).unwrap();
        assert_abs_diff_eq!(oracle, 0.5f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(moments(&wf).unwrap().mean_q, oracle, epsilon = 1e-12);
    }

    #[test]
    fn custom_normalized_input_is_unchanged() {
        let wf = coherent(1, 0.7, 0.1);
        let again = build_custom(wf.position_amplitudes().to_vec(), wf.grids(), Representation::Position).unwrap();
        for (a, b) in wf.position_amplitudes().iter().zip(again.position_amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn custom_rejects_zero_and_leaky_states() {
        let grids = hermite_superposition_grid(0, 0.0).unwrap();
        let zero = vec![Complex64::new(0.0, 0.0); grids.len()];
        assert_eq!(
            build_custom(zero, &grids, Representation::Position),
            Err(Error::ZeroState)
        );
        let flat = vec![Complex64::new(1.0, 0.0); grids.len()];
        assert!(matches!(
            build_custom(flat, &grids, Representation::Position),
            Err(Error::EdgeLeakage { .. }) | Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let params = GaussianPacketParams::new(1.0, 0.0, 5.0).unwrap();
        let small = GridPair::new(GridSpec::centered(0.0, 0.05, 256).unwrap(), 0.0).unwrap();
        assert!(build_gaussian_packet(&params, &small).is_err());
    }

    #[test]
    fn transform_direction_is_checked() {
        let wf = coherent(0, 0.0, 0.0);
        let m = wf.fourier_transform().unwrap();
        assert_eq!(m.representation(), Representation::Momentum);
        assert!(m.fourier_transform().is_err());
        assert_eq!(m.inverse_fourier_transform().unwrap(), wf);
        assert!(wf.inverse_fourier_transform().is_err());
    }

    #[test]
    fn refinement_preserves_the_state() {
        let wf = packet(1.0, 0.3, 1.0);
        let fine = wf.refined(4, 2).unwrap();
        assert_eq!(fine.position_grid().len(), 8 * wf.position_grid().len());
        for q in [-2.0, -0.3, 0.0, 1.1, 2.9] {
            assert!((fine.position_at(q) - wf.position_at(q)).norm() < 1e-12);
        }
        for p in [-1.0, 0.3, 1.4] {
            assert!((fine.momentum_at(p) - wf.momentum_at(p)).norm() < 1e-12);
        }
    }

    fn l2_distance(a: &[Complex64], b: &[Complex64], grid: &GridSpec) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).collect();
        integrate(&d, grid).unwrap().sqrt()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn transform_round_trip_and_parseval(
            coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
            center in -2.0f64..2.0,
        ) {
            let c: Vec<Complex64> = coeffs.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
            prop_assume!(c.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
            let grids = hermite_superposition_grid(c.len() - 1, center).unwrap();
            let wf = build_hermite_superposition(&c, center, &grids).unwrap();
            let back = fourier::inverse(&fourier::forward(wf.position_amplitudes(), &grids).unwrap(), &grids).unwrap();
            prop_assert!(l2_distance(&back, wf.position_amplitudes(), grids.position()) < 1e-8);
            let nq = integrate(&wf.position_density(), grids.position()).unwrap();
            let np = integrate(&wf.momentum_density(), grids.momentum()).unwrap();
            prop_assert!((nq - np).abs() < 1e-8);
            prop_assert!((nq - 1.0).abs() < 1e-8);
        }

        #[test]
        fn preparation_uncertainty_holds(
            alpha in 0.2f64..4.0, beta in -2.0f64..2.0, t in -3.0f64..3.0,
            n in 0usize..6, a in 0.0f64..2.5, theta in -3.0f64..3.0,
        ) {
            let m = moments(&packet(alpha, beta, t)).unwrap();
            prop_assert!(m.uncertainty_product() >= 0.5 - 1e-9);
            let m = moments(&coherent(n, a, theta)).unwrap();
            prop_assert!(m.uncertainty_product() >= 0.5 - 1e-9);
        }
    }
}
