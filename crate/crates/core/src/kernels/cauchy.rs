//! Interior evaluation of Hardy-class boundary data by the Cauchy integral.
//!
//! Values use the barycentric form
//! `Σ u_k dz_k/(w_k−z) / Σ dz_k/(w_k−z)`, whose denominator is the discrete
//! version of `2πi`; the quotient cancels most of the quadrature error for
//! points close to the boundary. Points closer than a few grid spacings are
//! handled on a spectrally upsampled copy of the boundary.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::geometry::{BoundaryFunction, Domain};
use crate::kernels::szego::{factorial, DEFAULT_CLEARANCE};
use crate::numerics::spectral;
use crate::{Complex, QdError, Real, Result};

/// Upsampled boundary nodes and `dz` weights.
#[derive(Debug)]
struct Level {
    points: Vec<Complex>,
    dz: Vec<Complex>,
}

/// Evaluates Cauchy integrals of boundary functions on one domain, caching
/// upsampled boundaries.
#[derive(Debug)]
pub struct CauchyEvaluator<'a> {
    domain: &'a Domain,
    max_factor: usize,
    /// Resolve `w − z` down to `h / ratio` before upsampling.
    ratio: Real,
    levels: RefCell<HashMap<usize, std::rc::Rc<Level>>>,
}

impl<'a> CauchyEvaluator<'a> {
    pub fn new(domain: &'a Domain) -> Self {
        Self {
            domain,
            max_factor: 256,
            ratio: 4.0,
            levels: RefCell::new(HashMap::new()),
        }
    }

    pub fn domain(&self) -> &Domain {
        self.domain
    }

    /// Upsampling factor needed so that the grid spacing on every curve is
    /// below `distance/ratio` (scaled by `stretch` for derivatives).
    fn factor_for(&self, z: Complex, stretch: Real) -> usize {
        let mut need: Real = 1.0;
        for (k, c) in self.domain.curves().iter().enumerate() {
            let dist = c.distance_to(z);
            let range = self.domain.grid().range(k);
            let h = self.domain.ds()[range].iter().cloned().fold(0.0, f64::max);
            need = need.max(self.ratio * stretch * h / dist.max(1e-300));
        }
        let f = if need <= 1.0 {
            1
        } else {
            (need.ceil() as usize).next_power_of_two()
        };
        f.min(self.max_factor)
    }

    fn level(&self, factor: usize) -> Result<std::rc::Rc<Level>> {
        if let Some(l) = self.levels.borrow().get(&factor) {
            return Ok(l.clone());
        }
        let mut points = Vec::new();
        let mut dz = Vec::new();
        for c in self.domain.curves() {
            let n = c.len() * factor;
            let (z, d1) = c.sample_on_grid(n);
            let h = 2.0 * PI / n as f64;
            points.extend(z);
            dz.extend(d1.iter().map(|d| d * h));
        }
        let l = std::rc::Rc::new(Level { points, dz });
        self.levels.borrow_mut().insert(factor, l.clone());
        Ok(l)
    }

    fn upsampled_values(&self, u: &BoundaryFunction, factor: usize) -> Vec<Complex> {
        let mut out = Vec::with_capacity(u.len() * factor);
        for k in 0..self.domain.connectivity() {
            if factor == 1 {
                out.extend_from_slice(u.curve(k));
            } else {
                out.extend(spectral::upsample(u.curve(k), factor));
            }
        }
        out
    }

    fn check_inside(&self, z: Complex) -> Result<()> {
        if !z.re.is_finite() || !z.im.is_finite() || !self.domain.contains(z) {
            return Err(QdError::OutsideDomain { point: z });
        }
        Ok(())
    }

    /// `(1/2πi)∮ u(w)/(w−z) dw` for each function and point; result is
    /// indexed `[function][point]`.
    pub fn evaluate(&self, us: &[&BoundaryFunction], points: &[Complex]) -> Result<Vec<Vec<Complex>>> {
        self.evaluate_derivative(us, points, 0)
    }

    /// `(k!/2πi)∮ u(w)/(w−z)^{k+1} dw`. For `k = 0` the barycentric form is
    /// used.
    pub fn evaluate_derivative(
        &self,
        us: &[&BoundaryFunction],
        points: &[Complex],
        k: usize,
    ) -> Result<Vec<Vec<Complex>>> {
        for u in us {
            self.domain.grid().check(u.grid())?;
        }
        let mut out = vec![vec![Complex::new(0.0, 0.0); points.len()]; us.len()];
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &z) in points.iter().enumerate() {
            self.check_inside(z)?;
            groups.entry(self.factor_for(z, 1.0 + k as Real)).or_default().push(i);
        }
        let mut factors: Vec<usize> = groups.keys().copied().collect();
        factors.sort_unstable();
        let kf = factorial(k);
        let two_pi_i = Complex::new(0.0, 2.0 * PI);
        for f in factors {
            let level = self.level(f)?;
            let vals: Vec<Vec<Complex>> = us.iter().map(|u| self.upsampled_values(u, f)).collect();
            for &i in &groups[&f] {
                let z = points[i];
                if k == 0 {
                    let mut den = Complex::new(0.0, 0.0);
                    let mut num = vec![Complex::new(0.0, 0.0); us.len()];
                    for (j, (&w, &dw)) in level.points.iter().zip(&level.dz).enumerate() {
                        let c = dw / (w - z);
                        den += c;
                        for (n, v) in num.iter_mut().zip(&vals) {
                            *n += v[j] * c;
                        }
                    }
                    for (o, n) in out.iter_mut().zip(num) {
                        o[i] = n / den;
                    }
                } else {
                    let mut num = vec![Complex::new(0.0, 0.0); us.len()];
                    for (j, (&w, &dw)) in level.points.iter().zip(&level.dz).enumerate() {
                        let c = dw / (w - z).powu(k as u32 + 1);
                        for (n, v) in num.iter_mut().zip(&vals) {
                            *n += v[j] * c;
                        }
                    }
                    for (o, n) in out.iter_mut().zip(num) {
                        o[i] = n * kf / two_pi_i;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn check_clearance(domain: &Domain, points: &[Complex]) -> Result<()> {
    for &z in points {
        domain.check_clearance(z, DEFAULT_CLEARANCE)?;
    }
    Ok(())
}

/// `(1/2πi)∮ u(w)/(w−z) dw` at interior points kept at least five grid
/// spacings from the boundary.
pub fn evaluate_hardy_interior(domain: &Domain, u: &BoundaryFunction, points: &[Complex]) -> Result<Vec<Complex>> {
    check_clearance(domain, points)?;
    Ok(CauchyEvaluator::new(domain)
        .evaluate(&[u], points)?
        .pop()
        .expect("one function"))
}

/// Like [`evaluate_hardy_interior`] but accepts any interior point,
/// upsampling the boundary as needed.
pub fn evaluate_hardy_near(domain: &Domain, u: &BoundaryFunction, points: &[Complex]) -> Result<Vec<Complex>> {
    Ok(CauchyEvaluator::new(domain)
        .evaluate(&[u], points)?
        .pop()
        .expect("one function"))
}

/// `u^{(k)}(z)` at interior points with clearance.
pub fn evaluate_hardy_derivative(
    domain: &Domain,
    u: &BoundaryFunction,
    points: &[Complex],
    k: usize,
) -> Result<Vec<Complex>> {
    check_clearance(domain, points)?;
    Ok(CauchyEvaluator::new(domain)
        .evaluate_derivative(&[u], points, k)?
        .pop()
        .expect("one function"))
}

/// Taylor jets `f(a), f'(a), …, f^{(order)}(a)` of a holomorphic function
/// from its values on the circle `|z − a| = r`, by FFT.
pub fn circle_jets<F>(f: F, a: Complex, r: Real, order: usize) -> Result<Vec<Complex>>
where
    F: FnOnce(&[Complex]) -> Result<Vec<Complex>>,
{
    let m = (4 * (order + 1)).max(64).next_power_of_two();
    let pts: Vec<Complex> = (0..m)
        .map(|j| a + Complex::from_polar(r, 2.0 * PI * j as f64 / m as f64))
        .collect();
    let vals = f(&pts)?;
    let bins = spectral::fourier_bins(&vals);
    Ok((0..=order).map(|k| bins[k] * factorial(k) / r.powi(k as i32)).collect())
}
