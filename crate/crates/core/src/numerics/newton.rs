use nalgebra::{DMatrix, DVector};

use crate::{Complex, QdError, Result};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Maximum number of step halvings per iteration.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20,
            tolerance: 1e-11,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
    pub converged: bool,
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton iteration for `F(x) = 0`, `F: ℝⁿ → ℝⁿ`.
///
/// `system(x)` returns the residual and its Jacobian. Steps are halved until
/// the max-norm of the residual decreases. Stops when the residual falls
/// below the tolerance or the iteration budget runs out; stalling at the
/// floating-point floor is reported with `converged = false` but is not an
/// error.
pub fn newton_real<F>(x0: Vec<f64>, opts: NewtonOptions, mut system: F) -> Result<(Vec<f64>, NewtonReport)>
where
    F: FnMut(&[f64]) -> (Vec<f64>, DMatrix<f64>),
{
    let mut x = DVector::from_vec(x0);
    let (r, mut jac) = system(x.as_slice());
    let mut r = DVector::from_vec(r);
    let mut res = max_abs(&r);
    let mut history = vec![res];
    let mut iterations = 0;
    while res > opts.tolerance && iterations < opts.max_iterations {
        iterations += 1;
        let step = jac.clone().lu().solve(&(-&r)).ok_or_else(|| QdError::NewtonFailed {
            iterations,
            residual: res,
            detail: "singular Jacobian".into(),
        })?;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial = &x + &step * alpha;
            let (rt, jt) = system(trial.as_slice());
            let rt = DVector::from_vec(rt);
            let rest = max_abs(&rt);
            if rest.is_finite() && rest < res {
                x = trial;
                r = rt;
                jac = jt;
                res = rest;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        history.push(res);
        if !accepted {
            break;
        }
    }
    let converged = res <= opts.tolerance;
    Ok((
        x.iter().copied().collect(),
        NewtonReport {
            iterations,
            residual: res,
            history,
            converged,
        },
    ))
}

/// Newton for a holomorphic system `G: ℂᵈ → ℂᵈ`, run on real pairs.
///
/// `system(t)` returns `G(t)` and the complex Jacobian `∂G/∂t`; the real
/// Jacobian is assembled from the Cauchy–Riemann block structure.
pub fn newton_holomorphic<F>(
    t0: Vec<Complex>,
    opts: NewtonOptions,
    mut system: F,
) -> Result<(Vec<Complex>, NewtonReport)>
where
    F: FnMut(&[Complex]) -> (Vec<Complex>, DMatrix<Complex>),
{
    let d = t0.len();
    let x0: Vec<f64> = t0.iter().flat_map(|c| [c.re, c.im]).collect();
    let (x, report) = newton_real(x0, opts, |x| {
        let t: Vec<Complex> = x.chunks(2).map(|p| Complex::new(p[0], p[1])).collect();
        let (g, jc) = system(&t);
        let r: Vec<f64> = g.iter().flat_map(|c| [c.re, c.im]).collect();
        let mut jr = DMatrix::<f64>::zeros(2 * d, 2 * d);
        for k in 0..d {
            for j in 0..d {
                let v = jc[(k, j)];
                jr[(2 * k, 2 * j)] = v.re;
                jr[(2 * k, 2 * j + 1)] = -v.im;
                jr[(2 * k + 1, 2 * j)] = v.im;
                jr[(2 * k + 1, 2 * j + 1)] = v.re;
            }
        }
        (r, jr)
    })?;
    let t = x.chunks(2).map(|p| Complex::new(p[0], p[1])).collect();
    Ok((t, report))
}
