//! FFT-based operations on uniformly sampled periodic data.
//!
//! Samples are taken at `t_j = 2πj/n`, `j = 0..n`. Fourier coefficients are
//! returned in "centered" order: index `i` holds frequency `i - n/2`.

use rustfft::FftPlanner;

use crate::Complex;

fn fft_in_place(buf: &mut [Complex], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(buf);
}

/// Map a signed frequency to its FFT bin.
fn bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Signed frequency of FFT bin `j` (Nyquist reported as `-n/2`).
pub fn frequency(j: usize, n: usize) -> i64 {
    let j = j as i64;
    let n = n as i64;
    if j < n / 2 || (n % 2 == 1 && j == n / 2) {
        j
    } else {
        j - n
    }
}

/// Fourier coefficients `ĉ_k` with `u(t_j) = Σ_k ĉ_k e^{i k t_j}`, in FFT
/// bin order.
pub fn fourier_bins(samples: &[Complex]) -> Vec<Complex> {
    let n = samples.len() as f64;
    let mut buf = samples.to_vec();
    fft_in_place(&mut buf, false);
    buf.iter_mut().for_each(|c| *c /= n);
    buf
}

/// Inverse of [`fourier_bins`].
pub fn from_fourier_bins(bins: &[Complex]) -> Vec<Complex> {
    let mut buf = bins.to_vec();
    fft_in_place(&mut buf, true);
    buf
}

/// Spectral derivative `du/dt` of periodic samples. The Nyquist mode is
/// dropped.
pub fn derivative(samples: &[Complex]) -> Vec<Complex> {
    let n = samples.len();
    let mut bins = fourier_bins(samples);
    for (j, c) in bins.iter_mut().enumerate() {
        let k = frequency(j, n);
        if n.is_multiple_of(2) && k == -(n as i64) / 2 {
            *c = Complex::new(0.0, 0.0);
        } else {
            *c *= Complex::new(0.0, k as f64);
        }
    }
    from_fourier_bins(&bins)
}

/// Periodic antiderivative of `u` plus its mean.
///
/// Returns `(v, mean)` with `v' = u - mean`, `v(0) = 0`; the full
/// antiderivative is `v(t) + mean·t`.
pub fn antiderivative(samples: &[Complex]) -> (Vec<Complex>, Complex) {
    let n = samples.len();
    let mut bins = fourier_bins(samples);
    let mean = bins[0];
    bins[0] = Complex::new(0.0, 0.0);
    for (j, c) in bins.iter_mut().enumerate().skip(1) {
        let k = frequency(j, n);
        if n.is_multiple_of(2) && k == -(n as i64) / 2 {
            *c = Complex::new(0.0, 0.0);
        } else {
            *c /= Complex::new(0.0, k as f64);
        }
    }
    let mut v = from_fourier_bins(&bins);
    let v0 = v[0];
    v.iter_mut().for_each(|x| *x -= v0);
    (v, mean)
}

/// Evaluate the trigonometric interpolant of `samples` at arbitrary `t`.
pub fn interpolate_at(bins: &[Complex], t: f64) -> Complex {
    let n = bins.len();
    let mut acc = Complex::new(0.0, 0.0);
    for (j, c) in bins.iter().enumerate() {
        let k = frequency(j, n);
        if n.is_multiple_of(2) && k == -(n as i64) / 2 {
            // Split the Nyquist mode symmetrically so real data stays real.
            acc += c * (Complex::new(0.0, k as f64 * t)).exp().re;
        } else {
            acc += c * Complex::new(0.0, k as f64 * t).exp();
        }
    }
    acc
}

/// Trigonometric interpolation onto a grid `factor` times finer.
pub fn upsample(samples: &[Complex], factor: usize) -> Vec<Complex> {
    if factor <= 1 {
        return samples.to_vec();
    }
    let n = samples.len();
    let m = n * factor;
    let bins = fourier_bins(samples);
    let mut fine = vec![Complex::new(0.0, 0.0); m];
    for (j, c) in bins.iter().enumerate() {
        let k = frequency(j, n);
        if n.is_multiple_of(2) && k == -(n as i64) / 2 {
            fine[bin(k, m)] += c * 0.5;
            fine[bin(-k, m)] += c * 0.5;
        } else {
            fine[bin(k, m)] += c;
        }
    }
    from_fourier_bins(&fine)
}

/// Convert signed-frequency coefficients `coeffs[i]` for `k = i - K` into
/// FFT bins of length `n`. Frequencies outside the band are aliased.
pub fn centered_to_bins(coeffs: &[Complex], n: usize) -> Vec<Complex> {
    let big_k = (coeffs.len() / 2) as i64;
    let mut bins = vec![Complex::new(0.0, 0.0); n];
    for (i, c) in coeffs.iter().enumerate() {
        bins[bin(i as i64 - big_k, n)] += c;
    }
    bins
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
    }

    #[test]
    fn derivative_of_trig_polynomial_is_exact() {
        let t = grid(32);
        let u: Vec<Complex> = t
            .iter()
            .map(|&t| Complex::new(0.0, 3.0 * t).exp() + Complex::new(t.cos(), 0.0))
            .collect();
        let du = derivative(&u);
        for (j, &t) in t.iter().enumerate() {
            let exact = Complex::new(0.0, 3.0) * Complex::new(0.0, 3.0 * t).exp() - Complex::new(t.sin(), 0.0);
            assert!((du[j] - exact).norm() < 1e-13);
        }
    }

    #[test]
    fn antiderivative_recovers_mean_and_primitive() {
        let t = grid(64);
        let u: Vec<Complex> = t.iter().map(|&t| Complex::new(2.0 + (2.0 * t).cos(), 0.0)).collect();
        let (v, mean) = antiderivative(&u);
        assert!((mean - Complex::new(2.0, 0.0)).norm() < 1e-14);
        for (j, &t) in t.iter().enumerate() {
            assert!((v[j].re - 0.5 * (2.0 * t).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn upsample_matches_exact_values() {
        let u: Vec<Complex> = grid(16)
            .iter()
            .map(|&t| Complex::new(0.0, -2.0 * t).exp() * 1.5)
            .collect();
        let fine = upsample(&u, 4);
        for (j, &t) in grid(64).iter().enumerate() {
            assert!((fine[j] - Complex::new(0.0, -2.0 * t).exp() * 1.5).norm() < 1e-13);
        }
        let bins = fourier_bins(&u);
        let v = interpolate_at(&bins, 0.3);
        assert!((v - Complex::new(0.0, -0.6).exp() * 1.5).norm() < 1e-13);
    }
}
