//! Monotone cubic Hermite maps, cumulative distributions and quantiles.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::grid::GridSpec;
use super::quadrature::cumulative_panels;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Increasing,
    Decreasing,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        }
    }
}

/// Piecewise cubic Hermite interpolant through monotone samples.
///
/// Slopes are limited (Fritsch–Carlson) so the interpolant never leaves the
/// declared orientation. Outputs may repeat (flat runs); inverting inside a
/// flat run returns the midpoint of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneMap {
    inputs: Vec<f64>,
    outputs: Vec<f64>,
    slopes: Vec<f64>,
    orientation: Orientation,
}

impl MonotoneMap {
    /// Builds the map from samples and (optionally) known derivatives. Without
    /// derivatives the three-point harmonic-mean estimate is used.
    pub fn new(inputs: Vec<f64>, outputs: Vec<f64>, slopes: Option<Vec<f64>>) -> Result<Self> {
        let n = inputs.len();
        if outputs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: outputs.len(),
            });
        }
        if n < 2 {
            return Err(Error::LengthMismatch { expected: 2, found: n });
        }
        if let Some(k) = inputs.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NotMonotone { index: k + 1 });
        }
        let orientation = if outputs[n - 1] >= outputs[0] {
            Orientation::Increasing
        } else {
            Orientation::Decreasing
        };
        let s = orientation.sign();
        if let Some(k) = outputs.windows(2).position(|w| s * (w[1] - w[0]) < 0.0) {
            return Err(Error::NotMonotone { index: k + 1 });
        }
        let mut slopes = match slopes {
            Some(m) if m.len() == n => m,
            Some(m) => {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: m.len(),
                })
            }
            None => harmonic_slopes(&inputs, &outputs),
        };
        limit_slopes(&inputs, &outputs, &mut slopes, s);
        Ok(Self {
            inputs,
            outputs,
            slopes,
            orientation,
        })
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.inputs[0], self.inputs[self.inputs.len() - 1])
    }

    pub fn range(&self) -> (f64, f64) {
        let (a, b) = (self.outputs[0], self.outputs[self.outputs.len() - 1]);
        (a.min(b), a.max(b))
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.inputs.iter().copied().zip(self.outputs.iter().copied())
    }

    fn interval(&self, x: f64) -> usize {
        let k = self.inputs.partition_point(|&v| v <= x);
        k.saturating_sub(1).min(self.inputs.len() - 2)
    }

    /// Value at `x`; constant extrapolation outside the sampled domain.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if x <= lo {
            return self.outputs[0];
        }
        if x >= hi {
            return self.outputs[self.outputs.len() - 1];
        }
        let k = self.interval(x);
        let h = self.inputs[k + 1] - self.inputs[k];
        self.cubic(k, (x - self.inputs[k]) / h)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return 0.0;
        }
        let k = self.interval(x);
        let h = self.inputs[k + 1] - self.inputs[k];
        self.cubic_dt(k, (x - self.inputs[k]) / h) / h
    }

    fn cubic(&self, k: usize, t: f64) -> f64 {
        let h = self.inputs[k + 1] - self.inputs[k];
        let (t2, t3) = (t * t, t * t * t);
        self.outputs[k] * (2.0 * t3 - 3.0 * t2 + 1.0)
            + h * self.slopes[k] * (t3 - 2.0 * t2 + t)
            + self.outputs[k + 1] * (-2.0 * t3 + 3.0 * t2)
            + h * self.slopes[k + 1] * (t3 - t2)
    }

    fn cubic_dt(&self, k: usize, t: f64) -> f64 {
        let h = self.inputs[k + 1] - self.inputs[k];
        let t2 = t * t;
        self.outputs[k] * (6.0 * t2 - 6.0 * t)
            + h * self.slopes[k] * (3.0 * t2 - 4.0 * t + 1.0)
            + self.outputs[k + 1] * (-6.0 * t2 + 6.0 * t)
            + h * self.slopes[k + 1] * (3.0 * t2 - 2.0 * t)
    }

    /// Input at which the map takes the value `y` (clamped to the domain).
    pub fn inverse(&self, y: f64) -> f64 {
        let s = self.orientation.sign();
        let n = self.outputs.len();
        let key = |v: f64| s * v;
        let target = key(y);
        // first knot with value >= y and first knot with value > y
        let lo = self.outputs.partition_point(|&v| key(v) < target);
        let hi = self.outputs.partition_point(|&v| key(v) <= target);
        if lo == n {
            return self.inputs[n - 1];
        }
        if hi == 0 {
            return self.inputs[0];
        }
        if lo < hi {
            // y hit one or more knots exactly: cross the tie linearly
            return 0.5 * (self.inputs[lo] + self.inputs[hi - 1]);
        }
        let k = lo - 1;
        self.solve_interval(k, y)
    }

    fn solve_interval(&self, k: usize, y: f64) -> f64 {
        let s = self.orientation.sign();
        let (y0, y1) = (self.outputs[k], self.outputs[k + 1]);
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let mut t = ((y - y0) / (y1 - y0)).clamp(0.0, 1.0);
        for _ in 0..100 {
            let r = s * (self.cubic(k, t) - y);
            if r == 0.0 {
                break;
            }
            if r > 0.0 {
                b = t;
            } else {
                a = t;
            }
            let d = s * self.cubic_dt(k, t);
            let newton = if d > 0.0 { t - r / d } else { f64::NAN };
            let next = if newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if (next - t).abs() <= 1e-16 || b - a <= 1e-16 {
                t = next;
                break;
            }
            t = next;
        }
        let h = self.inputs[k + 1] - self.inputs[k];
        self.inputs[k] + t * h
    }
}

fn harmonic_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
    let mut m = Vec::with_capacity(n);
    m.push(delta[0]);
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        m.push(if a * b <= 0.0 { 0.0 } else { 2.0 * a * b / (a + b) });
    }
    m.push(delta[n - 2]);
    m
}

fn limit_slopes(x: &[f64], y: &[f64], m: &mut [f64], s: f64) {
    for v in m.iter_mut() {
        if s * *v < 0.0 || !v.is_finite() {
            *v = 0.0;
        }
    }
    for k in 0..x.len() - 1 {
        let delta = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        if delta == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let a = m[k] / delta;
        let b = m[k + 1] / delta;
        let r2 = a * a + b * b;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            m[k] = tau * a * delta;
            m[k + 1] = tau * b * delta;
        }
    }
}

/// Probability split at a point: mass below and mass above.
///
/// Carrying both halves keeps full relative precision in the upper tail,
/// where `1 − F` would cancel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail {
    pub below: f64,
    pub above: f64,
}

impl Tail {
    pub fn reflect(self) -> Self {
        Self {
            below: self.above,
            above: self.below,
        }
    }
}

/// Cumulative distribution of a gridded density, with both tails
/// accumulated from their own end.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    lower: MonotoneMap,
    upper: MonotoneMap,
}

/// Tolerance on the total mass of densities handed to [`Cdf::from_density`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

impl Cdf {
    pub fn from_density(density: &[f64], grid: &GridSpec) -> Result<Self> {
        grid.check_len(density.len())?;
        if let Some((index, &value)) = density.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeDensity { index, value });
        }
        let panels = cumulative_panels(density, grid.step());
        let total: f64 = panels.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateDensity);
        }
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { mass: total });
        }
        let n = density.len();
        let mut below = Vec::with_capacity(n);
        let mut acc = 0.0;
        below.push(0.0);
        for p in &panels {
            acc += p;
            below.push(acc / total);
        }
        let mut above = alloc::vec![0.0; n];
        let mut acc = 0.0;
        for k in (0..n - 1).rev() {
            acc += panels[k];
            above[k] = acc / total;
        }
        let xs: Vec<f64> = grid.points().collect();
        let slopes: Vec<f64> = density.iter().map(|f| f / total).collect();
        let neg: Vec<f64> = slopes.iter().map(|f| -f).collect();
        Ok(Self {
            lower: MonotoneMap::new(xs.clone(), below, Some(slopes))?,
            upper: MonotoneMap::new(xs, above, Some(neg))?,
        })
    }

    /// `P(X ≤ x)`.
    pub fn below(&self, x: f64) -> f64 {
        self.lower.eval(x)
    }

    /// `P(X > x)`.
    pub fn above(&self, x: f64) -> f64 {
        self.upper.eval(x)
    }

    pub fn tail(&self, x: f64) -> Tail {
        Tail {
            below: self.below(x),
            above: self.above(x),
        }
    }

    /// Density of the interpolated distribution.
    pub fn density(&self, x: f64) -> f64 {
        self.lower.derivative(x)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.5 {
            self.lower.inverse(u)
        } else {
            self.upper.inverse(1.0 - u)
        }
    }

    /// Point splitting the mass as `tail`, resolved from whichever tail is
    /// smaller.
    pub fn quantile_of(&self, tail: Tail) -> f64 {
        if tail.below <= tail.above {
            self.lower.inverse(tail.below)
        } else {
            self.upper.inverse(tail.above)
        }
    }

    pub fn lower_map(&self) -> &MonotoneMap {
        &self.lower
    }
}

/// Quantile function `u ↦ x` with `CDF(x) = u`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileMap {
    cdf: Cdf,
}

impl QuantileMap {
    pub fn eval(&self, u: f64) -> f64 {
        self.cdf.quantile(u)
    }

    pub fn orientation(&self) -> Orientation {
        Orientation::Increasing
    }

    pub fn cdf(&self) -> &Cdf {
        &self.cdf
    }
}

/// Quantile map of a normalized density sampled on `grid`.
pub fn inverse_cdf(density: &[f64], grid: &GridSpec) -> Result<QuantileMap> {
    Ok(QuantileMap {
        cdf: Cdf::from_density(density, grid)?,
    })
}
