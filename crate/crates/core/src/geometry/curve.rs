use std::f64::consts::PI;

use crate::geometry::polygon;
use crate::numerics::spectral;
use crate::{Complex, QdError, Real, Result};

/// A closed curve `z(t) = Σ_{k=-K}^{K} c_k e^{ikt}` sampled on a uniform grid.
///
/// Samples and derivatives are exact evaluations of the trigonometric
/// polynomial, so spectral differentiation of the stored data is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    /// `coeffs[i]` multiplies `e^{i(i-K)t}`.
    coeffs: Vec<Complex>,
    n: usize,
    samples: Vec<Complex>,
    d1: Vec<Complex>,
    d2: Vec<Complex>,
}

fn effective_degree(coeffs: &[Complex]) -> usize {
    let k = (coeffs.len() / 2) as i64;
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, _)| (i as i64 - k).unsigned_abs() as usize)
        .max()
        .unwrap_or(0)
}

/// `z^{(order)}(t_i)` on a uniform grid of `n` nodes, by inverse FFT.
fn sample_derivative(coeffs: &[Complex], n: usize, order: i32) -> Vec<Complex> {
    let k0 = (coeffs.len() / 2) as i64;
    let c: Vec<Complex> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex::new(0.0, (i as i64 - k0) as f64).powi(order))
        .collect();
    spectral::from_fourier_bins(&spectral::centered_to_bins(&c, n))
}

impl Curve {
    /// Build a curve from centered Fourier coefficients (frequencies `-K..=K`,
    /// lowest first).
    pub fn new(coeffs: Vec<Complex>, n_samples: usize) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(QdError::InvalidInput(format!(
                "expected an odd number of coefficients (frequencies -K..=K), got {}",
                coeffs.len()
            )));
        }
        if !n_samples.is_power_of_two() || n_samples < 8 {
            return Err(QdError::InvalidInput(format!(
                "n_samples must be a power of two >= 8, got {n_samples}"
            )));
        }
        let degree = effective_degree(&coeffs);
        if n_samples < 4 * degree {
            return Err(QdError::InvalidInput(format!(
                "n_samples = {n_samples} is below 4 x degree = {}",
                4 * degree
            )));
        }
        let samples = sample_derivative(&coeffs, n_samples, 0);
        let d1 = sample_derivative(&coeffs, n_samples, 1);
        let d2 = sample_derivative(&coeffs, n_samples, 2);
        if let Some(node) = d1
            .iter()
            .position(|d| d.norm() <= 1e-12 * (1.0 + coeffs.iter().map(|c| c.norm()).sum::<f64>()))
        {
            return Err(QdError::DegenerateParametrization { node });
        }
        if let Some((a, b)) = polygon::first_self_intersection(&samples) {
            return Err(QdError::SelfIntersection {
                curve: 0,
                seg_a: a,
                seg_b: b,
            });
        }
        Ok(Self {
            coeffs,
            n: n_samples,
            samples,
            d1,
            d2,
        })
    }

    /// Circle of the given radius, counterclockwise when `positive`.
    pub fn circle(center: Complex, radius: Real, n_samples: usize, positive: bool) -> Result<Self> {
        let r = Complex::new(radius, 0.0);
        let coeffs = if positive {
            vec![Complex::new(0.0, 0.0), center, r]
        } else {
            vec![r, center, Complex::new(0.0, 0.0)]
        };
        Self::new(coeffs, n_samples)
    }

    /// Axis-aligned ellipse `center + a cos t + i b sin t`.
    pub fn ellipse(center: Complex, a: Real, b: Real, n_samples: usize) -> Result<Self> {
        // a cos t + i b sin t = ((a-b)/2) e^{-it} + ((a+b)/2) e^{it}
        let coeffs = vec![
            Complex::new((a - b) / 2.0, 0.0),
            center,
            Complex::new((a + b) / 2.0, 0.0),
        ];
        Self::new(coeffs, n_samples)
    }

    /// Least-squares trigonometric fit of degree `≤ max_degree` to points at
    /// uniform parameter values.
    pub fn fit_points(points: &[Complex], max_degree: usize, n_samples: usize) -> Result<Self> {
        let m = points.len();
        if m < 8 {
            return Err(QdError::InvalidInput("need at least 8 points to fit a curve".into()));
        }
        let k = max_degree.min(m / 2 - 1);
        let bins = spectral::fourier_bins(points);
        let mut coeffs: Vec<Complex> = (-(k as i64)..=(k as i64))
            .map(|f| bins[f.rem_euclid(m as i64) as usize])
            .collect();
        let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        coeffs
            .iter_mut()
            .filter(|c| c.norm() < 1e-14 * cmax)
            .for_each(|c| *c = Complex::new(0.0, 0.0));
        Self::new(coeffs, n_samples)
    }

    /// The same curve traversed backwards, `t ↦ z(-t)`.
    pub fn reversed(&self) -> Result<Self> {
        let c: Vec<Complex> = self.coeffs.iter().rev().copied().collect();
        Self::new(c, self.n)
    }

    /// Samples and derivative samples on a finer or coarser grid, without
    /// re-running the validity checks.
    pub fn sample_on_grid(&self, n_samples: usize) -> (Vec<Complex>, Vec<Complex>) {
        (
            sample_derivative(&self.coeffs, n_samples, 0),
            sample_derivative(&self.coeffs, n_samples, 1),
        )
    }

    /// The same curve on a different grid.
    pub fn resampled(&self, n_samples: usize) -> Result<Self> {
        Self::new(self.coeffs.clone(), n_samples)
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        effective_degree(&self.coeffs)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Parameter spacing `2π/n`.
    pub fn step(&self) -> Real {
        2.0 * PI / self.n as f64
    }

    pub fn params(&self) -> impl Iterator<Item = Real> + '_ {
        (0..self.n).map(move |j| j as f64 * self.step())
    }

    pub fn samples(&self) -> &[Complex] {
        &self.samples
    }

    pub fn derivative_samples(&self) -> &[Complex] {
        &self.d1
    }

    pub fn second_derivative_samples(&self) -> &[Complex] {
        &self.d2
    }

    /// `z^{(order)}(t)` at an arbitrary parameter.
    pub fn eval_derivative(&self, t: Real, order: u32) -> Complex {
        let k0 = (self.coeffs.len() / 2) as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i as i64 - k0) as f64;
                c * Complex::new(0.0, k).powu(order) * Complex::new(0.0, k * t).exp()
            })
            .sum()
    }

    pub fn eval(&self, t: Real) -> Complex {
        self.eval_derivative(t, 0)
    }

    /// Unit tangent `T = z'/|z'|` and trapezoidal arc-length weights
    /// `(2π/n)|z'|` at the grid nodes.
    pub fn tangent_frame(&self) -> (Vec<Complex>, Vec<Real>) {
        let h = self.step();
        let t = self.d1.iter().map(|d| d / d.norm()).collect();
        let ds = self.d1.iter().map(|d| d.norm() * h).collect();
        (t, ds)
    }

    /// Signed curvature at the nodes.
    pub fn curvature(&self) -> Vec<Real> {
        self.d1
            .iter()
            .zip(&self.d2)
            .map(|(d1, d2)| (d1.conj() * d2).im / d1.norm().powi(3))
            .collect()
    }

    /// Signed enclosed area (positive for counterclockwise curves).
    pub fn signed_area(&self) -> Real {
        0.5 * self.step()
            * self
                .samples
                .iter()
                .zip(&self.d1)
                .map(|(z, d)| (z.conj() * d).im)
                .sum::<f64>()
    }

    pub fn length(&self) -> Real {
        self.step() * self.d1.iter().map(|d| d.norm()).sum::<f64>()
    }

    /// Winding number about `p` by trapezoidal contour integration of
    /// `1/(2πi(z - p))`. Accurate when `p` is well separated from the curve.
    pub fn winding_number(&self, p: Complex) -> Real {
        let s: Complex = self.samples.iter().zip(&self.d1).map(|(z, d)| d / (z - p)).sum();
        (s * self.step() / Complex::new(0.0, 2.0 * PI)).re
    }

    /// Integer winding number of the sample polygon about `p`.
    pub fn polygon_winding(&self, p: Complex) -> i64 {
        polygon::polygon_winding(&self.samples, p)
    }

    /// Distance from `p` to the sample polygon.
    pub fn distance_to(&self, p: Complex) -> Real {
        let n = self.n;
        (0..n)
            .map(|i| polygon::point_segment_distance(p, self.samples[i], self.samples[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the sample closest to `p`.
    pub fn nearest_sample(&self, p: Complex) -> usize {
        self.samples
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - p).norm().partial_cmp(&(b.1 - p).norm()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn unit_circle_samples_and_derivative() {
        let c = Curve::new(vec![c64(0., 0.), c64(0., 0.), c64(1., 0.)], 256).unwrap();
        for (t, (z, d)) in c.params().zip(c.samples().iter().zip(c.derivative_samples())) {
            let e = Complex::new(0.0, t).exp();
            assert!((z - e).norm() < 1e-14);
            assert!((d - Complex::new(0.0, 1.0) * e).norm() < 1e-14);
        }
    }

    #[test]
    fn ellipse_speed_range() {
        let c = Curve::ellipse(c64(0., 0.), 2.0, 1.0, 256).unwrap();
        let speeds: Vec<f64> = c.derivative_samples().iter().map(|d| d.norm()).collect();
        let lo = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = speeds.iter().cloned().fold(0.0, f64::max);
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn figure_eight_rejected() {
        // z(t) = sin t + (i/2) sin 2t passes through 0 at t = 0 and t = π.
        let coeffs = vec![c64(-0.25, 0.), c64(0., 0.5), c64(0., 0.), c64(0., -0.5), c64(0.25, 0.)];
        let err = Curve::new(coeffs, 256).unwrap_err();
        assert!(matches!(err, QdError::SelfIntersection { .. }));
    }

    #[test]
    fn constant_curve_is_degenerate() {
        let err = Curve::new(vec![c64(1., 0.)], 16).unwrap_err();
        assert!(matches!(err, QdError::DegenerateParametrization { .. }));
    }

    #[test]
    fn grid_requirements_enforced() {
        assert!(Curve::circle(c64(0., 0.), 1.0, 100, true).is_err());
        let mut c = vec![c64(0., 0.); 21];
        c[11] = c64(1.0, 0.0);
        c[20] = c64(0.01, 0.0);
        assert!(Curve::new(c.clone(), 32).is_err());
        assert!(Curve::new(c, 64).is_ok());
    }

    #[test]
    fn reversed_circle_flips_orientation() {
        let c = Curve::circle(c64(0., 0.), 1.0, 64, true).unwrap();
        let r = c.reversed().unwrap();
        assert!(c.signed_area() > 0.0 && r.signed_area() < 0.0);
        assert!((r.winding_number(c64(0.1, 0.0)) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_trig_polynomial() {
        let c = Curve::ellipse(c64(0.3, -0.1), 1.5, 1.0, 64).unwrap();
        let fit = Curve::fit_points(c.samples(), 8, 64).unwrap();
        for (a, b) in fit.samples().iter().zip(c.samples()) {
            assert!((a - b).norm() < 1e-13);
        }
        assert_eq!(fit.degree(), 1);
    }
}
