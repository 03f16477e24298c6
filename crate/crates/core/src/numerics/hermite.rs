//! Normalized Hermite functions (harmonic-oscillator eigenfunctions).

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};

pub const MAX_HERMITE_ORDER: usize = 64;

/// `h_n(x) = (2ⁿ n! √π)^{-1/2} H_n(x) e^{-x²/2}`.
pub fn hermite_function(n: usize, x: f64) -> Result<f64> {
    Ok(*hermite_functions(n, x)?.last().expect("n+1 values"))
}

/// `h_0(x) … h_n(x)` from the normalized three-term recurrence
/// `h_{k+1} = √(2/(k+1)) x h_k − √(k/(k+1)) h_{k−1}`.
pub fn hermite_functions(n: usize, x: f64) -> Result<Vec<f64>> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrder {
            n,
            max: MAX_HERMITE_ORDER,
        });
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n >= 1 {
        out.push(2.0.sqrt() * x * out[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, GridSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_order_values() {
        assert_abs_diff_eq!(hermite_function(0, 0.0).unwrap(), PI.powf(-0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(hermite_function(0, 0.0).unwrap(), 0.7511255444649425, epsilon = 1e-15);
        assert_eq!(hermite_function(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn matches_explicit_polynomials() {
        // physicists' H_3 = 8x³ − 12x, H_4 = 16x⁴ − 48x² + 12
        for x in [-2.3, -0.4, 0.0, 1.1, 3.7] {
            let g = (-0.5 * x * x).exp() * PI.powf(-0.25);
            let h3 = (8.0 * x * x * x - 12.0 * x) / (8.0 * 6.0f64).sqrt() * g;
            let h4 = (16.0 * x.powi(4) - 48.0 * x * x + 12.0) / (16.0 * 24.0f64).sqrt() * g;
            assert_abs_diff_eq!(hermite_function(3, x).unwrap(), h3, epsilon = 1e-13);
            assert_abs_diff_eq!(hermite_function(4, x).unwrap(), h4, epsilon = 1e-13);
        }
    }

    #[test]
    fn orthonormality_by_quadrature() {
        let g = GridSpec::new(-14.0, 14.0, 2049).unwrap();
        let h5: Vec<f64> = g.points().map(|x| hermite_function(5, x).unwrap()).collect();
        let h3: Vec<f64> = g.points().map(|x| hermite_function(3, x).unwrap()).collect();
        let sq: Vec<f64> = h5.iter().map(|v| v * v).collect();
        let cross: Vec<f64> = h5.iter().zip(&h3).map(|(a, b)| a * b).collect();
        assert_abs_diff_eq!(integrate(&sq, &g).unwrap(), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(integrate(&cross, &g).unwrap(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn oscillator_equation_residual() {
        // -h'' + x² h = (2n+1) h, checked with a sixth-order central difference
        let d = 1e-2;
        for n in [0usize, 2, 7, 20] {
            for x in [-1.5, 0.3, 2.2] {
                let f = |y: f64| hermite_function(n, y).unwrap();
                let second = (2.0 * f(x - 3.0 * d) - 27.0 * f(x - 2.0 * d) + 270.0 * f(x - d) - 490.0 * f(x)
                    + 270.0 * f(x + d)
                    - 27.0 * f(x + 2.0 * d)
                    + 2.0 * f(x + 3.0 * d))
                    / (180.0 * d * d);
                let residual = -second + x * x * f(x) - (2 * n + 1) as f64 * f(x);
                assert!(residual.abs() < 1e-7, "n={n} x={x} residual={residual}");
            }
        }
    }

    #[test]
    fn order_guard() {
        assert!(hermite_functions(64, 1.0).is_ok());
        assert_eq!(hermite_function(65, 1.0), Err(Error::HermiteOrder { n: 65, max: 64 }));
    }
}
