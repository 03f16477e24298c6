//! Composite Simpson quadrature on uniform grids.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::Result;

/// Composite Simpson weights for `n` equally spaced samples.
///
/// Odd sample counts use the plain 1-4-2-...-4-1 rule. Even counts average the
/// two rules that close with Simpson's 3/8 panel at either end, which keeps
/// the weights symmetric under reversal.
pub fn simpson_weights(n: usize, step: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        2 => vec![0.5 * step, 0.5 * step],
        _ if n % 2 == 1 => {
            let mut w = vec![0.0; n];
            add_simpson(&mut w, 0, n - 1, 1.0);
            w.iter_mut().for_each(|x| *x *= step);
            w
        }
        4 => three_eighths(step),
        _ => {
            let mut w = vec![0.0; n];
            // 3/8 panel on the right, Simpson on the rest
            add_simpson(&mut w, 0, n - 4, 0.5);
            add_three_eighths(&mut w, n - 4, 0.5);
            // and the mirror image
            add_three_eighths(&mut w, 0, 0.5);
            add_simpson(&mut w, 3, n - 1, 0.5);
            w.iter_mut().for_each(|x| *x *= step);
            w
        }
    }
}

fn three_eighths(step: f64) -> Vec<f64> {
    let mut w = vec![0.0; 4];
    add_three_eighths(&mut w, 0, 1.0);
    w.iter_mut().for_each(|x| *x *= step);
    w
}

fn add_simpson(w: &mut [f64], first: usize, last: usize, scale: f64) {
    debug_assert!((last - first).is_multiple_of(2));
    let third = scale / 3.0;
    let mut k = first;
    while k < last {
        w[k] += third;
        w[k + 1] += 4.0 * third;
        w[k + 2] += third;
        k += 2;
    }
}

fn add_three_eighths(w: &mut [f64], first: usize, scale: f64) {
    let c = 3.0 * scale / 8.0;
    w[first] += c;
    w[first + 1] += 3.0 * c;
    w[first + 2] += 3.0 * c;
    w[first + 3] += c;
}

/// Integral of sampled `values` over `grid`.
pub fn integrate(values: &[f64], grid: &GridSpec) -> Result<f64> {
    grid.check_len(values.len())?;
    let w = simpson_weights(grid.len(), grid.step());
    Ok(dot(&w, values))
}

pub fn integrate_complex(values: &[Complex64], grid: &GridSpec) -> Result<Complex64> {
    grid.check_len(values.len())?;
    let w = simpson_weights(grid.len(), grid.step());
    Ok(w.iter()
        .zip(values)
        .fold(Complex64::new(0.0, 0.0), |acc, (w, v)| acc + v * *w))
}

#[inline]
pub(crate) fn dot(weights: &[f64], values: &[f64]) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}

/// Running integral `F_k = ∫_{x_0}^{x_k} f` at every grid point.
///
/// Interior panels use the fourth-order four-point rule; the two boundary
/// panels fall back to the three-point rule. A panel whose high-order estimate
/// comes out negative (possible next to sharp zeros of a nonnegative
/// integrand) is replaced by its trapezoid value so that the result stays
/// monotone for nonnegative input.
pub(crate) fn cumulative_panels(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    let mut panels = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let f0 = values[k];
        let f1 = values[k + 1];
        let trap = 0.5 * step * (f0 + f1);
        let high = if n < 3 {
            trap
        } else if k == 0 {
            step / 12.0 * (5.0 * f0 + 8.0 * f1 - values[2])
        } else if k + 2 == n {
            step / 12.0 * (-values[k - 1] + 8.0 * f0 + 5.0 * f1)
        } else {
            step / 24.0 * (-values[k - 1] + 13.0 * f0 + 13.0 * f1 - values[k + 2])
        };
        panels.push(if high < 0.0 && trap >= 0.0 { trap } else { high });
    }
    panels
}
