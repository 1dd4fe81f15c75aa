use std::f64::consts::PI;
use std::sync::Arc;

use crate::geometry::{BoundaryFunction, Domain};
use crate::kernels::szego::factorial;
use crate::kernels::{evaluate_hardy_derivative, CauchyEvaluator};
use crate::{Complex, QdError, Real, Result, I};

/// A finite combination `σ = Σ c_m S^m(·, a)` with its Garabedian companion
/// `λ = −i Σ conj(c_m) L^m(·, a)`.
///
/// `σ` is linear in the coefficients and `λ` is antilinear, so
/// `(σ, λ)` satisfies `σ T = conj(λ)` on the boundary.
#[derive(Debug, Clone)]
pub struct SpanElement {
    pub(crate) domain: Arc<Domain>,
    pub(crate) bases: Vec<(Complex, usize)>,
    pub(crate) coeffs: Vec<Complex>,
    pub(crate) sigma: BoundaryFunction,
    pub(crate) lambda: BoundaryFunction,
    /// `λ` minus its poles at the base points.
    pub(crate) lambda_regular: BoundaryFunction,
    /// `σ` and `λ` at the nodes of each cut, when the basis has cuts.
    pub(crate) cut_sigma: Vec<Vec<Complex>>,
    pub(crate) cut_lambda: Vec<Vec<Complex>>,
}

impl SpanElement {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Base points with their maximal orders.
    pub fn bases(&self) -> &[(Complex, usize)] {
        &self.bases
    }

    /// Coefficients in the flattened `(a_i, m)` order.
    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Coefficients of one base point, indexed by order.
    pub fn coeffs_at(&self, base: usize) -> &[Complex] {
        let start: usize = self.bases[..base].iter().map(|(_, m)| m + 1).sum();
        &self.coeffs[start..start + self.bases[base].1 + 1]
    }

    pub fn sigma(&self) -> &BoundaryFunction {
        &self.sigma
    }

    pub fn lambda(&self) -> &BoundaryFunction {
        &self.lambda
    }

    pub fn cut_sigma(&self) -> &[Vec<Complex>] {
        &self.cut_sigma
    }

    pub fn cut_lambda(&self) -> &[Vec<Complex>] {
        &self.cut_lambda
    }

    pub fn has_cuts(&self) -> bool {
        !self.cut_lambda.is_empty()
    }

    /// Max of `|σT − conj(λ)|` over the boundary grid.
    pub fn compatibility_residual(&self) -> Real {
        self.sigma
            .values()
            .iter()
            .zip(self.lambda.values())
            .zip(self.domain.tangent_values())
            .map(|((s, l), t)| (s * t - l.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `self + t·other`: coefficients `c + t c'`, so `λ + conj(t) λ'`.
    pub fn add_scaled(&self, t: Complex, other: &SpanElement) -> Result<SpanElement> {
        if self.bases != other.bases {
            return Err(QdError::InvalidInput("span elements have different bases".into()));
        }
        let mut out = self.clone();
        out.coeffs.iter_mut().zip(&other.coeffs).for_each(|(a, b)| *a += t * b);
        out.sigma.axpy(t, &other.sigma)?;
        out.lambda.axpy(t.conj(), &other.lambda)?;
        out.lambda_regular.axpy(t.conj(), &other.lambda_regular)?;
        let axpy = |a: &mut Vec<Vec<Complex>>, b: &[Vec<Complex>], s: Complex| {
            a.iter_mut()
                .zip(b)
                .for_each(|(x, y)| x.iter_mut().zip(y).for_each(|(p, q)| *p += s * q));
        };
        axpy(&mut out.cut_sigma, &other.cut_sigma, t);
        axpy(&mut out.cut_lambda, &other.cut_lambda, t.conj());
        Ok(out)
    }

    /// Multiply the coefficients by `t`.
    pub fn scaled(&self, t: Complex) -> SpanElement {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= t);
        out.sigma = out.sigma.scale(t);
        out.lambda = out.lambda.scale(t.conj());
        out.lambda_regular = out.lambda_regular.scale(t.conj());
        out.cut_sigma.iter_mut().flatten().for_each(|v| *v *= t);
        out.cut_lambda.iter_mut().flatten().for_each(|v| *v *= t.conj());
        out
    }

    /// `σ^{(k)}` at interior points kept clear of the boundary, by
    /// differentiating the Cauchy integral of the trace.
    pub fn eval_span(&self, points: &[Complex], k: usize) -> Result<Vec<Complex>> {
        evaluate_hardy_derivative(&self.domain, &self.sigma, points, k)
    }

    /// `σ` at any interior points, upsampling the boundary near it.
    pub fn eval_near(&self, points: &[Complex]) -> Result<Vec<Complex>> {
        Ok(CauchyEvaluator::new(&self.domain)
            .evaluate(&[&self.sigma], points)?
            .pop()
            .expect("one function"))
    }

    /// The poles of `λ` at `z`: `−i Σ conj(c_m) m!/(2π(z−a)^{m+1})`.
    pub fn lambda_singular(&self, z: Complex) -> Complex {
        let mut acc = Complex::new(0.0, 0.0);
        let mut i = 0;
        for &(a, max) in &self.bases {
            for m in 0..=max {
                acc += self.coeffs[i].conj() * factorial(m) / (2.0 * PI) / (z - a).powu(m as u32 + 1);
                i += 1;
            }
        }
        -I * acc
    }

    /// `λ` at interior points away from the base points.
    pub fn eval_lambda(&self, points: &[Complex]) -> Result<Vec<Complex>> {
        let reg = CauchyEvaluator::new(&self.domain)
            .evaluate(&[&self.lambda_regular], points)?
            .pop()
            .expect("one function");
        Ok(points
            .iter()
            .zip(reg)
            .map(|(&z, r)| r + self.lambda_singular(z))
            .collect())
    }
}
