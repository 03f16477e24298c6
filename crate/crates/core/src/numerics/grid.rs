use crate::error::{Error, Result};

/// Smallest grid accepted for sampling a wavefunction.
pub const MIN_STATE_POINTS: usize = 16;

/// Uniform one-dimensional grid with exact endpoints.
///
/// Point `k` is `x_min + k * step` with `step = (x_max - x_min) / (n_points - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min || n_points < 2 {
            return Err(Error::InvalidRange { x_min, x_max, n_points });
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Grid of `n_points` symmetric about `center` with the given spacing.
    pub fn centered(center: f64, step: f64, n_points: usize) -> Result<Self> {
        let half = 0.5 * step * (n_points.max(1) - 1) as f64;
        Self::new(center - half, center + half, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_min + self.x_max)
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.step()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let step = self.step();
        (0..self.n_points).map(move |k| self.x_min + k as f64 * step)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Index of the cell `[x_k, x_{k+1}]` containing `x`, clamped to the grid.
    pub fn cell_of(&self, x: f64) -> usize {
        let t = (x - self.x_min) / self.step();
        if !(t > 0.0) {
            0
        } else {
            (t as usize).min(self.n_points - 2)
        }
    }

    pub(crate) fn check_len(&self, found: usize) -> Result<()> {
        if found == self.n_points {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.n_points,
                found,
            })
        }
    }
}
