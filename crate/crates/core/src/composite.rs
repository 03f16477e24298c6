//! Two-mode product densities in collective coordinates: a normalizable EPR
//! state and entangled generalized coherent states.
//!
//! Each state factorizes into two one-mode states living in conjugate pairs
//! of linear combinations of `(q₁, q₂, p₁, p₂)`. The phase-space density is
//! the product of one causal combination per factor.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::causal::{combine, fit_convex_combination, CausalCombo, TransportCurve};
use crate::error::{Error, Result};
use crate::numerics::{integrate, GridPair, GridSpec};
use crate::quantum::Axis;
use crate::states::{
    build_custom, build_gaussian_packet, build_generalized_coherent, GaussianPacketParams, GeneralizedCoherentParams,
    Representation, WaveFunction, DEFAULT_POINTS, SPAN_DISPERSIONS,
};

/// Names of the mode variables, in coefficient order.
pub const MODE_VARIABLES: [&str; 4] = ["q1", "q2", "p1", "p2"];

const RATIO_TOLERANCE: f64 = 1e-12;

/// `c₀q₁ + c₁q₂ + c₂p₁ + c₃p₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearForm {
    pub coefficients: [f64; 4],
}

impl LinearForm {
    pub const Q1: Self = Self::new([1.0, 0.0, 0.0, 0.0]);
    pub const Q2: Self = Self::new([0.0, 1.0, 0.0, 0.0]);
    pub const P1: Self = Self::new([0.0, 0.0, 1.0, 0.0]);
    pub const P2: Self = Self::new([0.0, 0.0, 0.0, 1.0]);

    pub const fn new(coefficients: [f64; 4]) -> Self {
        Self { coefficients }
    }

    pub fn scaled(self, s: f64) -> Self {
        Self::new(self.coefficients.map(|c| s * c))
    }

    pub fn plus(self, other: Self) -> Self {
        let mut c = self.coefficients;
        c.iter_mut().zip(other.coefficients).for_each(|(a, b)| *a += b);
        Self::new(c)
    }

    pub fn minus(self, other: Self) -> Self {
        self.plus(other.scaled(-1.0))
    }

    /// Poisson bracket `{self, other}`.
    pub fn bracket(&self, other: &Self) -> f64 {
        let (a, b) = (&self.coefficients, &other.coefficients);
        a[0] * b[2] - a[2] * b[0] + a[1] * b[3] - a[3] * b[1]
    }

    /// `s` with `self = s · other`, if any.
    pub fn ratio_to(&self, other: &Self) -> Option<f64> {
        let k = other.coefficients.iter().position(|c| c.abs() > RATIO_TOLERANCE)?;
        let s = self.coefficients[k] / other.coefficients[k];
        let scale = self.coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let matches = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .all(|(a, b)| (a - s * b).abs() <= RATIO_TOLERANCE * scale.max(1.0));
        (matches && s != 0.0).then_some(s)
    }
}

impl fmt::Display for LinearForm {
    /// Renders as e.g. `q1-q2`, `(p1-p2)/2`, `(q1+q2)/sqrt2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, f64)> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, &c)| (k, c))
            .collect();
        if terms.is_empty() {
            return f.write_str("0");
        }
        let m = terms[0].1.abs();
        let common = terms.iter().all(|(_, c)| (c.abs() - m).abs() <= RATIO_TOLERANCE * m);
        let suffix = if !common {
            None
        } else if (m - 1.0).abs() < RATIO_TOLERANCE {
            Some("")
        } else if (m - 0.5).abs() < RATIO_TOLERANCE {
            Some("/2")
        } else if (m - FRAC_1_SQRT_2).abs() < RATIO_TOLERANCE {
            Some("/sqrt2")
        } else {
            None
        };
        let wrap = matches!(suffix, Some(s) if !s.is_empty()) && terms.len() > 1;
        if wrap {
            f.write_str("(")?;
        }
        for (i, &(k, c)) in terms.iter().enumerate() {
            match suffix {
                Some(_) => {
                    if c < 0.0 {
                        f.write_str("-")?;
                    } else if i > 0 {
                        f.write_str("+")?;
                    }
                }
                None => {
                    if i > 0 && c >= 0.0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{c}*")?;
                }
            }
            f.write_str(MODE_VARIABLES[k])?;
        }
        if wrap {
            f.write_str(")")?;
        }
        f.write_str(suffix.unwrap_or(""))
    }
}

/// A position-like coordinate and its conjugate momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatePair {
    pub position: LinearForm,
    pub momentum: LinearForm,
}

/// Two conjugate pairs forming canonical coordinates on the two-mode phase
/// space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveTransform {
    pub a: ConjugatePair,
    pub b: ConjugatePair,
}

impl CollectiveTransform {
    /// Rejects pairs whose brackets differ from the canonical ones.
    pub fn new(a: ConjugatePair, b: ConjugatePair) -> Result<Self> {
        let t = Self { a, b };
        let m = t.matrix();
        for (i, row) in m.iter().enumerate() {
            for (j, col) in m.iter().enumerate() {
                let f = LinearForm::new(*row);
                let g = LinearForm::new(*col);
                let expected = match (i, j) {
                    (0, 2) | (1, 3) => 1.0,
                    (2, 0) | (3, 1) => -1.0,
                    _ => 0.0,
                };
                let bracket = f.bracket(&g);
                if (bracket - expected).abs() > 1e-12 {
                    return Err(Error::NonCanonical { bracket, expected });
                }
            }
        }
        Ok(t)
    }

    /// Rows `a.position, b.position, a.momentum, b.momentum` over
    /// `(q₁, q₂, p₁, p₂)`.
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        [
            self.a.position.coefficients,
            self.b.position.coefficients,
            self.a.momentum.coefficients,
            self.b.momentum.coefficients,
        ]
    }

    /// `(q₁−q₂, (p₁−p₂)/2)` and `((q₁+q₂)/2, p₁+p₂)`.
    pub fn epr() -> Self {
        use LinearForm as L;
        Self::new(
            ConjugatePair {
                position: L::Q1.minus(L::Q2),
                momentum: L::P1.minus(L::P2).scaled(0.5),
            },
            ConjugatePair {
                position: L::Q1.plus(L::Q2).scaled(0.5),
                momentum: L::P1.plus(L::P2),
            },
        )
        .expect("EPR coordinates are canonical")
    }

    /// `((q₁+q₂)/√2, (p₁+p₂)/√2)` and `((q₁−q₂)/√2, (p₁−p₂)/√2)`.
    pub fn rotated() -> Self {
        use LinearForm as L;
        let s = FRAC_1_SQRT_2;
        Self::new(
            ConjugatePair {
                position: L::Q1.plus(L::Q2).scaled(s),
                momentum: L::P1.plus(L::P2).scaled(s),
            },
            ConjugatePair {
                position: L::Q1.minus(L::Q2).scaled(s),
                momentum: L::P1.minus(L::P2).scaled(s),
            },
        )
        .expect("rotated coordinates are canonical")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositeKind {
    Epr,
    EntangledCoherent,
}

impl CompositeKind {
    pub fn name(self) -> &'static str {
        match self {
            CompositeKind::Epr => "epr",
            CompositeKind::EntangledCoherent => "entangled-coherent",
        }
    }
}

/// One-mode state of a factor with its causal combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub wave: WaveFunction,
    pub combo: CausalCombo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorId {
    A,
    B,
}

/// `ρ_a(a.position, a.momentum) · ρ_b(b.position, b.momentum)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeProductDensity {
    pub kind: CompositeKind,
    pub transform: CollectiveTransform,
    pub factor_a: Factor,
    pub factor_b: Factor,
    /// The commuting pairs whose joint densities are reproduced.
    pub pairs: [(LinearForm, LinearForm); 4],
}

impl TwoModeProductDensity {
    pub fn factor(&self, id: FactorId) -> &Factor {
        match id {
            FactorId::A => &self.factor_a,
            FactorId::B => &self.factor_b,
        }
    }

    /// Factor, axis and scale `s` with `form = s · coordinate`.
    fn locate(&self, form: &LinearForm) -> Option<(FactorId, Axis, f64)> {
        let t = &self.transform;
        [
            (FactorId::A, Axis::GivenPosition, &t.a.position),
            (FactorId::A, Axis::GivenMomentum, &t.a.momentum),
            (FactorId::B, Axis::GivenPosition, &t.b.position),
            (FactorId::B, Axis::GivenMomentum, &t.b.momentum),
        ]
        .into_iter()
        .find_map(|(id, axis, c)| form.ratio_to(c).map(|s| (id, axis, s)))
    }
}

/// Gaussian widths and centres of the EPR factors:
/// `φ₁(u) ∝ exp(−(u−q₀)²/(2α₁))`, `φ̃₂(v) ∝ exp(−(v−P₀)²/(2α₂))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub q0: f64,
    pub p0: f64,
}

impl EprParams {
    pub fn new(alpha1: f64, alpha2: f64, q0: f64, p0: f64) -> Result<Self> {
        for (name, value) in [("alpha1", alpha1), ("alpha2", alpha2)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        for (name, value) in [("q0", q0), ("p0", p0)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Self { alpha1, alpha2, q0, p0 })
    }

    /// `Δu = √(α₁/2)`.
    pub fn delta_u(&self) -> f64 {
        (self.alpha1 / 2.0).sqrt()
    }

    /// `Δv = √(α₂/2)`.
    pub fn delta_v(&self) -> f64 {
        (self.alpha2 / 2.0).sqrt()
    }

    fn packet_v(&self) -> Result<GaussianPacketParams> {
        GaussianPacketParams::new(self.alpha2, self.p0, 0.0)
    }

    /// Grid pairs for `(u, (p₁−p₂)/2)` and `((q₁+q₂)/2, v)`.
    pub fn auto_grids(&self) -> Result<(GridPair, GridPair)> {
        let du = self.delta_u();
        let u = GridPair::covering(
            self.q0,
            SPAN_DISPERSIONS * du + 1.0,
            0.0,
            SPAN_DISPERSIONS / (2.0 * du) + 1.0,
            DEFAULT_POINTS,
        )?;
        Ok((u, self.packet_v()?.auto_grid()?))
    }
}

/// `φ₁` in the position representation of `u = q₁−q₂` and `φ̃₂` in the
/// momentum representation of `v = p₁+p₂`.
pub fn build_epr_state(
    params: &EprParams,
    grid_u: &GridPair,
    grid_v: &GridPair,
) -> Result<(WaveFunction, WaveFunction)> {
    let a = params.alpha1;
    let amplitudes: Vec<Complex64> = grid_u
        .position()
        .points()
        .map(|u| Complex64::new((PI * a).powf(-0.25) * (-(u - params.q0).powi(2) / (2.0 * a)).exp(), 0.0))
        .collect();
    let phi1 = build_custom(amplitudes, grid_u, Representation::Position)?.check_span()?;
    let phi2 = build_gaussian_packet(&params.packet_v()?, grid_v)?;
    Ok((phi1, phi2))
}

pub fn build_epr_density(params: &EprParams) -> Result<TwoModeProductDensity> {
    let (gu, gv) = params.auto_grids()?;
    let (phi1, phi2) = build_epr_state(params, &gu, &gv)?;
    let transform = CollectiveTransform::epr();
    let (a, b) = (transform.a, transform.b);
    Ok(TwoModeProductDensity {
        kind: CompositeKind::Epr,
        transform,
        factor_a: Factor {
            combo: fit_convex_combination(&phi1)?,
            wave: phi1,
        },
        factor_b: Factor {
            combo: fit_convex_combination(&phi2)?,
            wave: phi2,
        },
        pairs: [
            (a.position, b.position),
            (a.position, b.momentum),
            (b.position, a.momentum.scaled(2.0)),
            (b.momentum, a.momentum),
        ],
    })
}

/// `φ_{m,α}((q₁+q₂)/√2) φ_{n,β}((q₁−q₂)/√2)` with each factor carried by the
/// arithmetic mean of its two causal densities.
pub fn build_entangled_coherent_density(
    m: usize,
    n: usize,
    alpha: Complex64,
    beta: Complex64,
    omega: f64,
    t0: f64,
) -> Result<TwoModeProductDensity> {
    let factor = |k: usize, z: Complex64| -> Result<Factor> {
        let params = GeneralizedCoherentParams::from_alpha(k, z, omega, t0)?;
        let wave = build_generalized_coherent(&params, &params.auto_grid()?)?;
        Ok(Factor {
            combo: combine(&wave, 0.5)?,
            wave,
        })
    };
    let transform = CollectiveTransform::rotated();
    let (a, b) = (transform.a, transform.b);
    Ok(TwoModeProductDensity {
        kind: CompositeKind::EntangledCoherent,
        transform,
        factor_a: factor(m, alpha)?,
        factor_b: factor(n, beta)?,
        pairs: [
            (a.position, b.position),
            (a.position, b.momentum),
            (b.position, a.momentum),
            (a.momentum, b.momentum),
        ],
    })
}

/// Joint density of a commuting coordinate pair on the product of the two
/// factor grids, stored as its two one-dimensional factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMarginal {
    pub pair: (LinearForm, LinearForm),
    pub x_grid: GridSpec,
    pub y_grid: GridSpec,
    /// Marginals of the phase-space density.
    pub x_density: Vec<f64>,
    pub y_density: Vec<f64>,
    /// Quantum marginals from the factor wavefunctions.
    pub x_quantum: Vec<f64>,
    pub y_quantum: Vec<f64>,
    /// Sup-norm of density minus quantum prediction over the 2D grid.
    pub residual: f64,
    pub mass: f64,
}

impl PairMarginal {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.x_density[i] * self.y_density[j]
    }

    pub fn quantum(&self, i: usize, j: usize) -> f64 {
        self.x_quantum[i] * self.y_quantum[j]
    }
}

struct Marginal1d {
    grid: GridSpec,
    density: Vec<f64>,
    quantum: Vec<f64>,
}

fn combo_marginal(combo: &CausalCombo, axis: Axis, x: f64) -> f64 {
    let one = |c: &TransportCurve| match axis {
        Axis::GivenPosition => c.source_density_at(x),
        Axis::GivenMomentum => c.pushforward_density(x),
    };
    combo.lambda_plus * one(&combo.curve_plus) + combo.lambda_minus * one(&combo.curve_minus)
}

/// Marginal of `s · coordinate` for one factor coordinate.
fn factor_marginal(factor: &Factor, axis: Axis, s: f64) -> Result<Marginal1d> {
    let base = match axis {
        Axis::GivenPosition => factor.wave.position_grid(),
        Axis::GivenMomentum => factor.wave.momentum_grid(),
    };
    let (lo, hi) = (s * base.x_min(), s * base.x_max());
    let grid = GridSpec::new(lo.min(hi), lo.max(hi), base.len())?;
    let jacobian = 1.0 / s.abs();
    let mut density = Vec::with_capacity(grid.len());
    let mut quantum = Vec::with_capacity(grid.len());
    for w in grid.points() {
        let x = w / s;
        density.push(jacobian * combo_marginal(&factor.combo, axis, x));
        let amplitude = match axis {
            Axis::GivenPosition => factor.wave.position_at(x),
            Axis::GivenMomentum => factor.wave.momentum_at(x),
        };
        quantum.push(jacobian * amplitude.norm_sqr());
    }
    Ok(Marginal1d { grid, density, quantum })
}

/// Joint density of `(pair.0, pair.1)`. Both coordinates must be multiples of
/// collective coordinates belonging to different factors.
pub fn pair_marginal(density: &TwoModeProductDensity, pair: (LinearForm, LinearForm)) -> Result<PairMarginal> {
    let (fx, ax, sx) = density.locate(&pair.0).ok_or(Error::UnsupportedPair)?;
    let (fy, ay, sy) = density.locate(&pair.1).ok_or(Error::UnsupportedPair)?;
    if fx == fy || pair.0.bracket(&pair.1) != 0.0 {
        return Err(Error::UnsupportedPair);
    }
    let x = factor_marginal(density.factor(fx), ax, sx)?;
    let y = factor_marginal(density.factor(fy), ay, sy)?;
    let mut residual: f64 = 0.0;
    for (dx, qx) in x.density.iter().zip(&x.quantum) {
        for (dy, qy) in y.density.iter().zip(&y.quantum) {
            residual = residual.max((dx * dy - qx * qy).abs());
        }
    }
    let mass = integrate(&x.density, &x.grid)? * integrate(&y.density, &y.grid)?;
    Ok(PairMarginal {
        pair,
        x_grid: x.grid,
        y_grid: y.grid,
        x_density: x.density,
        y_density: y.density,
        x_quantum: x.quantum,
        y_quantum: y.quantum,
        residual,
        mass,
    })
}

/// Marginals of all listed pairs.
pub fn verify_pairs(density: &TwoModeProductDensity) -> Result<Vec<PairMarginal>> {
    density.pairs.iter().map(|&p| pair_marginal(density, p)).collect()
}
