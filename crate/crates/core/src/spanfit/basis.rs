use std::sync::Arc;

use nalgebra::DMatrix;

use crate::geometry::{BoundaryFunction, CutSystem, Domain};
use crate::kernels::szego::factorial;
use crate::kernels::{CauchyEvaluator, KernelField, SzegoSolver};
use crate::numerics::lsq::TruncatedSvd;
use crate::spanfit::SpanElement;
use crate::{Complex, QdError, Real, Result, I};

/// Relative singular-value cutoff of span fits.
pub const SPAN_CUTOFF: Real = 1e-12;

/// Residuals of one span fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// `‖σ − target‖ / ‖target‖` in `L²(ds)` (absolute if the target is 0).
    pub boundary_residual: Real,
    pub boundary_max_error: Real,
    /// Per cut: `‖λ − g_j‖ / ‖g_j‖` in `L²(Γ_j)` (absolute if `g_j = 0`).
    pub cut_residuals: Vec<Real>,
    pub cut_max_errors: Vec<Real>,
    pub rank: usize,
    pub columns: usize,
    pub condition: Real,
}

impl FitReport {
    /// Largest of the boundary and cut residuals.
    pub fn worst(&self) -> Real {
        self.cut_residuals
            .iter()
            .cloned()
            .fold(self.boundary_residual, f64::max)
    }

    pub fn rank_deficient(&self) -> bool {
        self.rank < self.columns
    }
}

/// Kernel columns `S^m(·, a_i)` with their companions, sampled on the
/// boundary grid and (optionally) on the nodes of a cut system.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    domain: Arc<Domain>,
    bases: Vec<(Complex, usize)>,
    fields: Vec<KernelField>,
    scales: Vec<Real>,
    cuts: Option<CutSystem>,
    /// `[column][cut][node]`.
    cut_s: Vec<Vec<Vec<Complex>>>,
    cut_l: Vec<Vec<Vec<Complex>>>,
    cutoff: Real,
    /// `λ` of each column at interior damping points, `[column][point]`,
    /// with the square roots of the point weights.
    damp_l: Vec<Vec<Complex>>,
    damp_w: Vec<Real>,
}

/// `S^m` and `L^m` of each field at interior points, `[field][point]`.
fn interior_values(
    domain: &Domain,
    fields: &[KernelField],
    points: &[Complex],
) -> Result<(Vec<Vec<Complex>>, Vec<Vec<Complex>>)> {
    let eval = CauchyEvaluator::new(domain);
    let rems: Vec<BoundaryFunction> = fields.iter().map(|f| f.garabedian_remainder(domain)).collect();
    let mut fs: Vec<&BoundaryFunction> = fields.iter().map(|f| &f.szego).collect();
    fs.extend(rems.iter());
    let mut vals = eval.evaluate(&fs, points)?;
    let rem_vals = vals.split_off(fields.len());
    let l = fields
        .iter()
        .zip(rem_vals)
        .map(|(f, r)| {
            points
                .iter()
                .zip(r)
                .map(|(&z, r)| r + f.garabedian_singular_part(z))
                .collect()
        })
        .collect();
    Ok((vals, l))
}

impl SpanBasis {
    /// Solve for `S^m(·, a)`, `m = 0..=M`, at every `(a, M)` in `bases`.
    pub fn new(solver: &SzegoSolver, bases: &[(Complex, usize)], cuts: Option<&CutSystem>) -> Result<Self> {
        let domain = solver.domain();
        if bases.is_empty() {
            return Err(QdError::InvalidInput("span basis needs at least one base point".into()));
        }
        for (i, (a, _)) in bases.iter().enumerate() {
            if bases[..i].iter().any(|(b, _)| b == a) {
                return Err(QdError::InvalidInput(format!("base point {a} listed twice")));
            }
        }
        let columns: usize = bases.iter().map(|(_, m)| m + 1).sum();
        if 4 * columns > domain.len() {
            return Err(QdError::InvalidInput(format!(
                "basis of {columns} columns exceeds a quarter of the {} grid points",
                domain.len()
            )));
        }
        let mut fields = Vec::with_capacity(columns);
        let mut scales = Vec::with_capacity(columns);
        for &(a, max) in bases {
            if let Some(c) = cuts {
                c.check_point(a)?;
            }
            let d = domain.distance_to_boundary(a);
            for f in solver.solve_orders(a, max)? {
                scales.push(d.powi(f.order as i32 + 1) / factorial(f.order));
                fields.push(f);
            }
        }
        let (mut cut_s, mut cut_l) = (Vec::new(), Vec::new());
        if let Some(cs) = cuts {
            let nodes: Vec<Complex> = cs.cuts().iter().flat_map(|c| c.nodes().iter().copied()).collect();
            let (sv, lv) = interior_values(domain, &fields, &nodes)?;
            let split = |v: &[Complex]| -> Vec<Vec<Complex>> {
                let mut out = Vec::new();
                let mut i = 0;
                for c in cs.cuts() {
                    out.push(v[i..i + c.len()].to_vec());
                    i += c.len();
                }
                out
            };
            cut_s = sv.iter().map(|v| split(v)).collect();
            cut_l = lv.iter().map(|v| split(v)).collect();
        }
        Ok(Self {
            domain: Arc::new(domain.clone()),
            bases: bases.to_vec(),
            fields,
            scales,
            cuts: cuts.cloned(),
            cut_s,
            cut_l,
            cutoff: SPAN_CUTOFF,
            damp_l: Vec::new(),
            damp_w: Vec::new(),
        })
    }

    /// Add the penalty `Σ_i w_i |λ(p_i)|²` to the fit norm. Combinations
    /// of columns that nearly cancel on the boundary can still make `λ`
    /// large inside; damping at interior points suppresses them.
    pub fn with_damping(mut self, points: &[Complex], weights: &[Real]) -> Result<Self> {
        if points.len() != weights.len() || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(QdError::InvalidInput(
                "one non-negative weight per damping point required".into(),
            ));
        }
        for &p in points {
            if self.bases.iter().any(|b| b.0 == p) {
                return Err(QdError::InvalidInput(format!("damping point {p} is a base point")));
            }
        }
        self.damp_l = interior_values(&self.domain, &self.fields, points)?.1;
        self.damp_w = weights.iter().map(|w| w.sqrt()).collect();
        Ok(self)
    }

    /// Use a relative singular-value cutoff other than [`SPAN_CUTOFF`].
    pub fn with_cutoff(mut self, cutoff: Real) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// The sub-basis keeping orders `m ≤ max_orders[i]` at base point `i`.
    pub fn truncated(&self, max_orders: &[usize]) -> Result<SpanBasis> {
        if max_orders.len() != self.bases.len() || max_orders.iter().zip(&self.bases).any(|(m, b)| *m > b.1) {
            return Err(QdError::InvalidInput(
                "truncation orders must not exceed the basis orders".into(),
            ));
        }
        let mut keep = Vec::new();
        let mut i = 0;
        for (b, &m) in self.bases.iter().zip(max_orders) {
            keep.extend(i..=i + m);
            i += b.1 + 1;
        }
        let pick = |v: &Vec<Vec<Vec<Complex>>>| -> Vec<Vec<Vec<Complex>>> {
            if v.is_empty() {
                Vec::new()
            } else {
                keep.iter().map(|&k| v[k].clone()).collect()
            }
        };
        Ok(SpanBasis {
            domain: self.domain.clone(),
            bases: self.bases.iter().zip(max_orders).map(|(b, &m)| (b.0, m)).collect(),
            fields: keep.iter().map(|&k| self.fields[k].clone()).collect(),
            scales: keep.iter().map(|&k| self.scales[k]).collect(),
            cuts: self.cuts.clone(),
            cut_s: pick(&self.cut_s),
            cut_l: pick(&self.cut_l),
            cutoff: self.cutoff,
            damp_l: if self.damp_l.is_empty() {
                Vec::new()
            } else {
                keep.iter().map(|&k| self.damp_l[k].clone()).collect()
            },
            damp_w: self.damp_w.clone(),
        })
    }

    pub fn bases(&self) -> &[(Complex, usize)] {
        &self.bases
    }

    pub fn columns(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[KernelField] {
        &self.fields
    }

    pub fn cuts(&self) -> Option<&CutSystem> {
        self.cuts.as_ref()
    }

    /// Default cut weights `perimeter / length(Γ_j)`.
    pub fn default_weights(&self) -> Vec<Real> {
        let per = self.domain.perimeter();
        self.cuts
            .as_ref()
            .map(|cs| cs.cuts().iter().map(|c| per / c.length()).collect())
            .unwrap_or_default()
    }

    /// The span element with the given coefficients.
    pub fn element(&self, coeffs: &[Complex]) -> Result<SpanElement> {
        if coeffs.len() != self.columns() {
            return Err(QdError::InvalidInput(format!(
                "{} coefficients for {} columns",
                coeffs.len(),
                self.columns()
            )));
        }
        let grid = self.domain.grid();
        let zero = BoundaryFunction::constant(grid, Complex::new(0.0, 0.0));
        let (mut sigma, mut lambda, mut regular) = (zero.clone(), zero.clone(), zero);
        let ncut = self.cut_l.first().map_or(0, |v| v.len());
        let mut cut_sigma: Vec<Vec<Complex>> = (0..ncut)
            .map(|j| vec![Complex::new(0.0, 0.0); self.cut_l[0][j].len()])
            .collect();
        let mut cut_lambda = cut_sigma.clone();
        for (k, (f, &c)) in self.fields.iter().zip(coeffs).enumerate() {
            let lc = -I * c.conj();
            sigma.axpy(c, &f.szego)?;
            lambda.axpy(lc, &f.garabedian)?;
            regular.axpy(lc, &f.garabedian_remainder(&self.domain))?;
            for j in 0..ncut {
                cut_sigma[j]
                    .iter_mut()
                    .zip(&self.cut_s[k][j])
                    .for_each(|(a, b)| *a += c * b);
                cut_lambda[j]
                    .iter_mut()
                    .zip(&self.cut_l[k][j])
                    .for_each(|(a, b)| *a += lc * b);
            }
        }
        Ok(SpanElement {
            domain: self.domain.clone(),
            bases: self.bases.clone(),
            coeffs: coeffs.to_vec(),
            sigma,
            lambda,
            lambda_regular: regular,
            cut_sigma,
            cut_lambda,
        })
    }

    /// Weighted, column-scaled least-squares matrix. Boundary rows fit `σ`;
    /// cut rows fit `conj(λ) = i Σ c_m conj(L^m)`, which is linear in `c`.
    fn matrix(&self, weights: Option<&[Real]>) -> DMatrix<Complex> {
        let d = &self.domain;
        let n = d.len();
        let cut_rows: usize = match (weights, &self.cuts) {
            (Some(_), Some(cs)) => cs.cuts().iter().map(|c| c.len()).sum(),
            _ => 0,
        };
        let mut a = DMatrix::<Complex>::zeros(n + cut_rows + self.damp_w.len(), self.columns());
        let sq: Vec<Real> = d.ds().iter().map(|w| w.sqrt()).collect();
        for (k, f) in self.fields.iter().enumerate() {
            let s = self.scales[k];
            for (i, v) in f.szego.values().iter().enumerate() {
                a[(i, k)] = v * (sq[i] * s);
            }
            if cut_rows > 0 {
                let cs = self.cuts.as_ref().expect("cuts present");
                let w = weights.expect("weights present");
                let mut row = n;
                for (j, c) in cs.cuts().iter().enumerate() {
                    for (i, l) in self.cut_l[k][j].iter().enumerate() {
                        a[(row, k)] = I * l.conj() * ((w[j] * c.ds()[i]).sqrt() * s);
                        row += 1;
                    }
                }
            }
            for (i, (l, w)) in self.damp_l.get(k).into_iter().flatten().zip(&self.damp_w).enumerate() {
                a[(n + cut_rows + i, k)] = I * l.conj() * (w * s);
            }
        }
        a
    }

    fn rhs(&self, target: &BoundaryFunction, cut_targets: Option<(&[Vec<Complex>], &[Real])>) -> Vec<Complex> {
        let mut b: Vec<Complex> = target
            .values()
            .iter()
            .zip(self.domain.ds())
            .map(|(v, w)| v * w.sqrt())
            .collect();
        if let (Some((g, w)), Some(cs)) = (cut_targets, &self.cuts) {
            for (j, c) in cs.cuts().iter().enumerate() {
                b.extend(g[j].iter().zip(c.ds()).map(|(v, ds)| v.conj() * (w[j] * ds).sqrt()));
            }
        }
        b.extend(std::iter::repeat_n(Complex::new(0.0, 0.0), self.damp_w.len()));
        b
    }

    /// Least-squares fit of `σ` to `target` on the boundary and, if given,
    /// of `λ` to `cut_targets[j]` on cut `j` with weights `weights[j]`
    /// (default `perimeter/length(Γ_j)`).
    pub fn fit(
        &self,
        target: &BoundaryFunction,
        cut_targets: Option<&[Vec<Complex>]>,
        weights: Option<&[Real]>,
    ) -> Result<(SpanElement, FitReport)> {
        let mut out = self.fit_many(&[(target.clone(), cut_targets.map(|g| g.to_vec()))], weights)?;
        Ok(out.pop().expect("one fit"))
    }

    /// Several fits sharing one factorization. Either every target has cut
    /// data or none does.
    pub fn fit_many(
        &self,
        targets: &[(BoundaryFunction, Option<Vec<Vec<Complex>>>)],
        weights: Option<&[Real]>,
    ) -> Result<Vec<(SpanElement, FitReport)>> {
        let with_cuts = targets.first().is_some_and(|t| t.1.is_some());
        if targets.iter().any(|t| t.1.is_some() != with_cuts) {
            return Err(QdError::InvalidInput("mixed fits with and without cut targets".into()));
        }
        let default_w = self.default_weights();
        let w: Option<&[Real]> = if with_cuts {
            let cs = self
                .cuts
                .as_ref()
                .ok_or_else(|| QdError::InvalidInput("cut targets given but the basis has no cuts".into()))?;
            let w = weights.unwrap_or(&default_w);
            if w.len() != cs.len() || w.iter().any(|x| !(*x > 0.0)) {
                return Err(QdError::InvalidInput("one positive weight per cut required".into()));
            }
            Some(w)
        } else {
            None
        };
        let svd = TruncatedSvd::new(self.matrix(w), self.cutoff)?;
        let mut out = Vec::with_capacity(targets.len());
        for (target, g) in targets {
            self.domain.grid().check(target.grid())?;
            if let (Some(g), Some(cs)) = (g, &self.cuts) {
                if g.len() != cs.len() || g.iter().zip(cs.cuts()).any(|(v, c)| v.len() != c.len()) {
                    return Err(QdError::InvalidInput("cut targets do not match the cut nodes".into()));
                }
            }
            let b = self.rhs(target, g.as_deref().zip(w));
            let sol = svd.solve(&b);
            let coeffs: Vec<Complex> = sol.x.iter().zip(&self.scales).map(|(x, s)| x * s).collect();
            let el = self.element(&coeffs)?;
            let report = self.report(&el, target, g.as_deref(), &svd);
            out.push((el, report));
        }
        Ok(out)
    }

    /// Elements of least fit norm, `‖σ‖²_{L²(ds)} + Σ_j w_j‖λ‖²_{L²(Γ_j)}`,
    /// subject to the linear conditions `K c = r` on the coefficients, one
    /// element per right-hand side `r`.
    pub fn min_norm_elements(
        &self,
        k: &DMatrix<Complex>,
        rhs: &[Vec<Complex>],
        weights: Option<&[Real]>,
    ) -> Result<Vec<SpanElement>> {
        if k.ncols() != self.columns() || rhs.iter().any(|r| r.len() != k.nrows()) {
            return Err(QdError::InvalidInput(
                "constraint shape does not match the basis".into(),
            ));
        }
        let default_w = self.default_weights();
        let w = self.cuts.as_ref().map(|_| weights.unwrap_or(&default_w));
        let (v, s) = TruncatedSvd::new(self.matrix(w), self.cutoff)?.range();
        // c = D V Σ⁻¹ y with ‖y‖ the fit norm of the element.
        let mut map = v;
        for (j, sj) in s.iter().enumerate() {
            map.column_mut(j).scale_mut(1.0 / sj);
        }
        for (i, sc) in self.scales.iter().enumerate() {
            map.row_mut(i).scale_mut(*sc);
        }
        let system = TruncatedSvd::new(k * &map, SPAN_CUTOFF)?;
        if system.rank() < k.nrows() {
            return Err(QdError::SingularSystem(format!(
                "{} conditions but rank {} on the span",
                k.nrows(),
                system.rank()
            )));
        }
        rhs.iter()
            .map(|r| {
                let y = nalgebra::DVector::from_vec(system.solve(r).x);
                let c = &map * y;
                self.element(c.as_slice())
            })
            .collect()
    }

    fn report(
        &self,
        el: &SpanElement,
        target: &BoundaryFunction,
        g: Option<&[Vec<Complex>]>,
        svd: &TruncatedSvd,
    ) -> FitReport {
        let d = &self.domain;
        let l2 = |u: &[Complex]| -> Real { u.iter().zip(d.ds()).map(|(v, w)| v.norm_sqr() * w).sum::<Real>().sqrt() };
        let diff: Vec<Complex> = el
            .sigma
            .values()
            .iter()
            .zip(target.values())
            .map(|(a, b)| a - b)
            .collect();
        let tn = l2(target.values());
        let en = l2(&diff);
        let mut cut_residuals = Vec::new();
        let mut cut_max_errors = Vec::new();
        if let (Some(g), Some(cs)) = (g, &self.cuts) {
            for (j, c) in cs.cuts().iter().enumerate() {
                let diff: Vec<Complex> = el.cut_lambda[j].iter().zip(&g[j]).map(|(a, b)| a - b).collect();
                let e = c.l2_norm(&diff).unwrap_or(f64::INFINITY);
                let t = c.l2_norm(&g[j]).unwrap_or(0.0);
                cut_residuals.push(if t > 0.0 { e / t } else { e });
                cut_max_errors.push(diff.iter().map(|v| v.norm()).fold(0.0, f64::max));
            }
        }
        FitReport {
            boundary_residual: if tn > 0.0 { en / tn } else { en },
            boundary_max_error: diff.iter().map(|v| v.norm()).fold(0.0, f64::max),
            cut_residuals,
            cut_max_errors,
            rank: svd.rank(),
            columns: self.columns(),
            condition: svd.condition(),
        }
    }
}

/// One-shot fit: builds the basis on `solver`'s domain and fits `target`.
pub fn fit_span_to_target(
    solver: &SzegoSolver,
    bases: &[(Complex, usize)],
    target: &BoundaryFunction,
    cut_targets: Option<(&CutSystem, &[Vec<Complex>])>,
    weights: Option<&[Real]>,
) -> Result<(SpanElement, FitReport)> {
    let basis = SpanBasis::new(solver, bases, cut_targets.map(|c| c.0))?;
    basis.fit(target, cut_targets.map(|c| c.1), weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_cuts, Curve, CutOptions};
    use crate::{c64, Domain};
    use std::f64::consts::PI;

    fn disc() -> SzegoSolver {
        SzegoSolver::new(&Domain::disc(c64(0., 0.), 1.0, 128).unwrap()).unwrap()
    }

    #[test]
    fn disc_constant() {
        let s = disc();
        let one = s.domain().trace(|_| c64(1., 0.));
        let (el, rep) = fit_span_to_target(&s, &[(c64(0., 0.), 0)], &one, None, None).unwrap();
        assert!((el.coeffs()[0] - c64(2.0 * PI, 0.)).norm() < 1e-10);
        assert!(rep.boundary_residual < 1e-12);
        assert!(el.compatibility_residual() < 1e-12);
    }

    #[test]
    fn disc_polynomials_are_exact() {
        let s = disc();
        let t = s.domain().trace(|z| 1.0 + z * z);
        let (el, rep) = fit_span_to_target(&s, &[(c64(0., 0.), 4)], &t, None, None).unwrap();
        let expect = [2.0 * PI, 0.0, PI, 0.0, 0.0];
        for (c, e) in el.coeffs().iter().zip(expect) {
            assert!((c - c64(e, 0.)).norm() < 1e-10, "{c}");
        }
        assert!(rep.boundary_residual < 1e-11);
        let d = el.eval_span(&[c64(0.2, 0.)], 1).unwrap();
        assert!((d[0] - c64(0.4, 0.)).norm() < 1e-10);
        let q = s.domain().trace(|z| z.powu(6) - 2.0 * z.powu(3) + c64(0., 1.) * z);
        let (_, rep) = fit_span_to_target(&s, &[(c64(0., 0.), 6)], &q, None, None).unwrap();
        assert!(rep.boundary_residual < 1e-10);
    }

    #[test]
    fn ellipse_residual_is_monotone() {
        let d = Domain::new(vec![Curve::ellipse(c64(0., 0.), 1.2, 1.0, 256).unwrap()], vec![]).unwrap();
        let s = SzegoSolver::new(&d).unwrap().with_order_cap(40);
        let one = d.trace(|_| c64(1., 0.));
        let basis = SpanBasis::new(&s, &[(c64(0., 0.), 40)], None).unwrap();
        let mut prev = f64::INFINITY;
        let mut reached = None;
        for n in 0..=40 {
            let sub = SpanBasis::new(&s, &[(c64(0., 0.), n)], None).unwrap();
            let (el, rep) = sub.fit(&one, None, None).unwrap();
            assert!(
                rep.boundary_residual <= prev + 1e-12,
                "N={n}: {} > {prev}",
                rep.boundary_residual
            );
            assert!(el.compatibility_residual() < 1e-8);
            prev = rep.boundary_residual;
            if reached.is_none() && prev < 1e-6 {
                reached = Some(n);
            }
        }
        assert!(reached.is_some());
        assert_eq!(basis.columns(), 41);
    }

    #[test]
    fn ellipse_fit_controls_the_centre_value() {
        let d = Domain::new(vec![Curve::ellipse(c64(0., 0.), 1.2, 1.0, 256).unwrap()], vec![]).unwrap();
        let s = SzegoSolver::new(&d).unwrap();
        let one = d.trace(|_| c64(1., 0.));
        let (el, rep) = fit_span_to_target(&s, &[(c64(0., 0.), 6)], &one, None, None).unwrap();
        let v = el.eval_span(&[c64(0., 0.)], 0).unwrap()[0];
        assert!((v - 1.0).norm() <= rep.boundary_max_error + 1e-12);
    }

    #[test]
    fn rejects_bad_bases() {
        let s = disc();
        let one = s.domain().trace(|_| c64(1., 0.));
        let dup = [(c64(0., 0.), 1), (c64(0., 0.), 2)];
        assert!(fit_span_to_target(&s, &dup, &one, None, None).is_err());
        let s = s.with_order_cap(40);
        assert!(SpanBasis::new(&s, &[(c64(0., 0.), 32)], None).is_err());
    }

    #[test]
    fn joint_fit_on_annulus() {
        let d = Domain::annulus(c64(0., 0.), 0.4, 1.0, 128).unwrap();
        let a = c64(0.0, 0.65);
        let cuts = make_cuts(&d, &CutOptions::default()).unwrap();
        let s = SzegoSolver::new(&d).unwrap();
        let basis = SpanBasis::new(&s, &[(a, 10)], Some(&cuts)).unwrap();
        let one = d.trace(|_| c64(1., 0.));
        // Compatible cut target: conj(T) at both ends of the cut.
        let c = cuts.cut(1);
        let (t0, t1) = (c64(0., 1.).conj() * -1.0, c64(0., 1.).conj());
        let g: Vec<Complex> = c.params().iter().map(|&s| t0 * (1.0 - s) + t1 * s).collect();
        let (el, rep) = basis.fit(&one, Some(&[g]), None).unwrap();
        assert!(el.compatibility_residual() < 1e-8);
        assert_eq!(rep.cut_residuals.len(), 1);
        assert!(rep.boundary_residual.is_finite() && rep.cut_residuals[0].is_finite());
        // The companion on the cut agrees with interior evaluation.
        let direct = el.eval_lambda(&[c.nodes()[20]]).unwrap()[0];
        assert!((direct - el.cut_lambda()[0][20]).norm() < 1e-9 * (1.0 + direct.norm()));
    }
}
