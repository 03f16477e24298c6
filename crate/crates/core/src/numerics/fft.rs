//! In-place complex FFT: iterative radix-2 for powers of two, Bluestein's
//! chirp-z reduction for every other length.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// Kernel `exp(-2πi jk/n)`.
    Forward,
    /// Kernel `exp(+2πi jk/n)`, no 1/n scaling.
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Backward => 1.0,
        }
    }
}

pub(crate) fn fft(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, direction);
    } else {
        bluestein(data, direction);
    }
}

fn twiddle(k: usize, n: usize, sign: f64) -> Complex64 {
    // Reduce the angle first so large k/n keep full precision.
    let angle = 2.0 * PI * (k % n) as f64 / n as f64;
    Complex64::new(angle.cos(), sign * angle.sin())
}

fn radix2(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let sign = direction.sign();
    let roots: Vec<Complex64> = (0..n / 2).map(|k| twiddle(k, n, sign)).collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = roots[k * stride];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

fn bluestein(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    let m = (2 * n - 1).next_power_of_two();
    let sign = direction.sign();
    // chirp_k = exp(sign·iπ k²/n); k² taken mod 2n to keep the angle small
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k2 = (k as u128 * k as u128 % (2 * n as u128)) as usize;
            let angle = PI * k2 as f64 / n as f64;
            Complex64::new(angle.cos(), sign * angle.sin())
        })
        .collect();
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = data[k] * chirp[k];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    radix2(&mut a, Direction::Forward);
    radix2(&mut b, Direction::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    radix2(&mut a, Direction::Backward);
    let scale = 1.0 / m as f64;
    for k in 0..n {
        data[k] = a[k] * chirp[k] * scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(data: &[Complex64], direction: Direction) -> Vec<Complex64> {
        let n = data.len();
        (0..n)
            .map(|k| {
                data.iter()
                    .enumerate()
                    .map(|(j, x)| x * twiddle(j * k % n, n, direction.sign()))
                    .sum()
            })
            .collect()
    }

    fn test_signal(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                let t = j as f64;
                Complex64::new((0.3 * t).sin() + 0.1 * t / n as f64, (1.7 * t).cos() - 0.2)
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for n in [1, 2, 3, 5, 8, 12, 17, 64, 100, 257] {
            for dir in [Direction::Forward, Direction::Backward] {
                let x = test_signal(n);
                let expected = naive(&x, dir);
                let mut y = x.clone();
                fft(&mut y, dir);
                for (a, b) in y.iter().zip(&expected) {
                    assert!((a - b).norm() < 1e-10 * (n as f64), "n={n}");
                }
            }
        }
    }

    #[test]
    fn round_trip() {
        for n in [1024, 1000] {
            let x = test_signal(n);
            let mut y = x.clone();
            fft(&mut y, Direction::Forward);
            fft(&mut y, Direction::Backward);
            for (a, b) in y.iter().zip(&x) {
                assert!((a / n as f64 - b).norm() < 1e-12);
            }
        }
    }
}
