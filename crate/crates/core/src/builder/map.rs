use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::polygon::{first_self_intersection, polygon_winding, polygons_intersect};
use crate::geometry::{BoundaryFunction, Curve, CutSystem, Domain};
use crate::kernels::{circle_jets, CauchyEvaluator, DEFAULT_CLEARANCE};
use crate::numerics::bell::product_jets;
use crate::numerics::spectral;
use crate::spanfit::{FitReport, SpanElement};
use crate::{Complex, QdError, Real, Result};

/// Which construction produced a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildMode {
    SimplyConnected,
    ArcLength,
    Double,
}

/// Evidence that `f` is one-to-one on the closed domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnivalenceCertificate {
    /// Image boundary curves are simple and pairwise disjoint.
    pub image_simple: bool,
    /// Argument-principle count of the zeros of `f'` in the domain.
    pub derivative_zeros: Real,
    /// Winding number of `f(bΩ)` about `f(a)`.
    pub degree: i64,
    pub passed: bool,
}

/// Newton solve summary for the period systems.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub unknowns: Vec<Complex>,
    pub iterations: usize,
    pub residual: Real,
    pub converged: bool,
}

/// Magnitudes of the perturbation terms of the period system
/// `B_k(h,h) = 2t_k + c_k + Σ(A+a)_{kij} t_i t_j + Σ b_{kj} t_j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoubleDiagnostics {
    pub c_max: Real,
    pub b_max: Real,
    pub a_max: Real,
    pub fixed_quadratic_max: Real,
    pub joint_fit_residuals: Vec<Real>,
    /// `(1/2πi)∮_{bΩ} h₁² dz`.
    pub residue: Complex,
}

/// A conformal map `f` with `f' = σ²` for a span element `σ`, normalized by
/// `f(a) = a`.
#[derive(Debug, Clone)]
pub struct ConformalMap {
    pub mode: BuildMode,
    pub sigma: SpanElement,
    pub f_boundary: BoundaryFunction,
    pub base_point: Complex,
    /// Highest kernel derivative order in `σ`.
    pub order: usize,
    /// Constant added on each curve after spectral integration.
    pub constants: Vec<Complex>,
    /// `σ^{(k)}(a)`, `k = 0..=order`.
    pub sigma_jets: Vec<Complex>,
    /// `f^{(k)}(a)`, `k = 0..=order + 1`.
    pub f_jets: Vec<Complex>,
    pub jet_radius: Real,
    /// Hole periods, then for the double build the handle periods and the
    /// residues at the auxiliary poles.
    pub periods: Vec<Complex>,
    /// Change of `f` around each boundary curve (`2π` times the mean of
    /// `σ²z'`).
    pub increments: Vec<Complex>,
    pub fits: Vec<FitReport>,
    pub solve: Option<SolveSummary>,
    pub double: Option<DoubleDiagnostics>,
    pub certificate: UnivalenceCertificate,
    /// `max |f(z) − z|` on the boundary grid.
    pub identity_distance: Real,
    pub cuts: Option<CutSystem>,
    /// `f` at each base point of `σ`, `f(a)` first.
    pub nodes: Vec<Complex>,
}

impl ConformalMap {
    pub fn domain(&self) -> &Domain {
        self.sigma.domain()
    }

    /// `f(a)`, the quadrature node of the image.
    pub fn node(&self) -> Complex {
        self.f_jets[0]
    }

    /// Base points of `σ` with their highest kernel orders.
    pub fn bases(&self) -> &[(Complex, usize)] {
        self.sigma.bases()
    }

    /// Derivative orders of the arc-length quadrature identity on the image.
    pub fn arc_length_order(&self) -> usize {
        self.order
    }

    /// Derivative orders of the area quadrature identity, when `f` extends
    /// to the double (`None` for the multiply connected arc-length build).
    pub fn area_order(&self) -> Option<usize> {
        match self.mode {
            BuildMode::ArcLength => None,
            _ => Some(2 * self.order),
        }
    }

    /// Nodes and highest derivative orders of the arc-length identity.
    pub fn arc_length_layout(&self) -> (Vec<Complex>, Vec<usize>) {
        (self.nodes.clone(), self.bases().iter().map(|b| b.1).collect())
    }

    /// Nodes and highest derivative orders of the area identity: a pole of
    /// `λ` of order `n + 1` at a base point gives `conj(f)` a pole of order
    /// `2n + 1` at its reflection.
    pub fn area_layout(&self) -> Option<(Vec<Complex>, Vec<usize>)> {
        self.area_order()?;
        Some((self.nodes.clone(), self.bases().iter().map(|b| 2 * b.1).collect()))
    }

    /// `f` at interior points.
    pub fn evaluate(&self, points: &[Complex]) -> Result<Vec<Complex>> {
        Ok(CauchyEvaluator::new(self.domain())
            .evaluate(&[&self.f_boundary], points)?
            .pop()
            .expect("one function"))
    }

    /// `f' = σ²` at interior points.
    pub fn derivative(&self, points: &[Complex]) -> Result<Vec<Complex>> {
        Ok(self.sigma.eval_near(points)?.into_iter().map(|s| s * s).collect())
    }

    /// Max over the grid of `|d f(z(t))/dt − σ² z'(t)|`, with the left side
    /// from spectral differentiation of the stored boundary values.
    pub fn derivative_consistency(&self) -> Real {
        let d = self.domain();
        let mut worst: Real = 0.0;
        for (k, c) in d.curves().iter().enumerate() {
            let df = spectral::derivative(self.f_boundary.curve(k));
            for ((a, s), zp) in df.iter().zip(self.sigma.sigma().curve(k)).zip(c.derivative_samples()) {
                worst = worst.max((a - s * s * zp).norm());
            }
        }
        worst
    }

    /// Largest period or increment magnitude.
    pub fn period_residual(&self) -> Real {
        self.periods
            .iter()
            .chain(&self.increments)
            .map(|p| p.norm())
            .fold(0.0, f64::max)
    }

    /// `|∮_{bΩ} |f'|(u∘f) ds − ∮_{f(bΩ)} u ds| / (1 + |∮_{f(bΩ)} u ds|)`, with
    /// the right side on the refitted image domain.
    pub fn change_of_variables_residual(&self, image: &Domain, u: impl Fn(Complex) -> Complex) -> Result<Real> {
        let d = self.domain();
        check_transport(d, image)?;
        let lhs: Complex = self
            .sigma
            .sigma()
            .values()
            .iter()
            .zip(self.f_boundary.values())
            .zip(d.ds())
            .map(|((s, w), ds)| u(*w) * s.norm_sqr() * ds)
            .sum();
        let rhs = image.integrate_ds(&image.trace(u))?;
        Ok((lhs - rhs).norm() / (1.0 + rhs.norm()))
    }

    /// Residual of `⟨√f'(u∘f), v⟩_{bΩ} = ⟨u, √F'(v∘F)⟩_{f(bΩ)}` with
    /// `F = f⁻¹`, transporting the grid: the image grid point over `z` is
    /// `f(z)`, where `F = z` and `√F' = 1/σ`.
    pub fn adjoint_residual(
        &self,
        image: &Domain,
        u: impl Fn(Complex) -> Complex,
        v: impl Fn(Complex) -> Complex,
    ) -> Result<Real> {
        let d = self.domain();
        check_transport(d, image)?;
        let sig = self.sigma.sigma().values();
        let lhs: Complex = (0..d.len())
            .map(|i| sig[i] * u(self.f_boundary.values()[i]) * v(d.points()[i]).conj() * d.ds()[i])
            .sum();
        let rhs: Complex = (0..d.len())
            .map(|i| u(image.points()[i]) * (v(d.points()[i]) / sig[i]).conj() * image.ds()[i])
            .sum();
        Ok((lhs - rhs).norm() / (1.0 + lhs.norm()))
    }

    /// The image domain `f(Ω)`, with each image curve refit as a
    /// trigonometric polynomial of degree at most a quarter of its grid.
    pub fn image_domain(&self) -> Result<Domain> {
        image_domain(self)
    }
}

fn check_transport(d: &Domain, image: &Domain) -> Result<()> {
    if d.grid().same_layout(image.grid()) {
        Ok(())
    } else {
        Err(QdError::GridMismatch(
            "the image domain does not share the sample layout of the map".into(),
        ))
    }
}

/// Integrate `f' = F²` along every curve, connect the curves through the
/// cuts, and normalize `f(a) = a`.
pub(crate) fn integrate_map(
    el: &SpanElement,
    cuts: Option<&CutSystem>,
    a: Complex,
) -> Result<(BoundaryFunction, Vec<Complex>, Vec<Complex>)> {
    let d = el.domain();
    let p = d.genus();
    if p > 0 && (cuts.is_none() || !el.has_cuts()) {
        return Err(QdError::InvalidInput(
            "multiply connected maps need cut samples to connect the curves".into(),
        ));
    }
    let mut v: Vec<Vec<Complex>> = Vec::with_capacity(d.connectivity());
    let mut increments = Vec::with_capacity(d.connectivity());
    for (k, c) in d.curves().iter().enumerate() {
        let u: Vec<Complex> = el
            .sigma()
            .curve(k)
            .iter()
            .zip(c.derivative_samples())
            .map(|(s, z)| s * s * z)
            .collect();
        let (vk, mean) = spectral::antiderivative(&u);
        increments.push(mean * 2.0 * PI);
        v.push(vk);
    }
    let mut offsets = vec![Complex::new(0.0, 0.0); d.connectivity()];
    if let Some(cs) = cuts {
        let outer_bins = spectral::fourier_bins(&v[0]);
        for (j, c) in cs.cuts().iter().enumerate() {
            let hole = c.hole();
            let along: Complex = el.cut_sigma()[j].iter().zip(c.dz()).map(|(s, w)| s * s * w).sum();
            let end = spectral::interpolate_at(&outer_bins, c.end_param());
            let start = spectral::interpolate_at(&spectral::fourier_bins(&v[hole]), c.start_param());
            offsets[hole] = end - along - start;
        }
    }
    let mut values = Vec::with_capacity(d.len());
    for (k, vk) in v.iter().enumerate() {
        values.extend(vk.iter().map(|x| x + offsets[k]));
    }
    let trace = d.function(values);
    let fa = CauchyEvaluator::new(d).evaluate(&[&trace], &[a])?[0][0];
    let c0 = a - fa;
    let f = trace.map(|x| x + c0);
    let constants = offsets.iter().map(|o| o + c0).collect();
    Ok((f, constants, increments))
}

/// Taylor jets of `σ` and `f` at `a`, from Cauchy integrals on the circle of
/// radius half the distance from `a` to the boundary.
pub(crate) fn jets_at(el: &SpanElement, a: Complex, order: usize) -> Result<(Vec<Complex>, Vec<Complex>, Real)> {
    let d = el.domain();
    d.check_clearance(a, DEFAULT_CLEARANCE)?;
    let r = 0.5 * d.distance_to_boundary(a);
    let eval = CauchyEvaluator::new(d);
    let sj = circle_jets(
        |pts| Ok(eval.evaluate(&[el.sigma()], pts)?.pop().expect("one")),
        a,
        r,
        order,
    )?;
    let sq = product_jets(&sj, &sj);
    let mut fj = vec![a];
    fj.extend(sq);
    Ok((sj, fj, r))
}

pub(crate) fn certify(el: &SpanElement, f: &BoundaryFunction, fa: Complex) -> Result<UnivalenceCertificate> {
    let d = el.domain();
    let curves: Vec<&[Complex]> = (0..d.connectivity()).map(|k| f.curve(k)).collect();
    let mut simple = curves.iter().all(|c| first_self_intersection(c).is_none());
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            if polygons_intersect(curves[i], curves[j]) {
                simple = false;
            }
        }
    }
    let zeros = 2.0 * d.argument_count(el.sigma())?;
    let degree: i64 = curves.iter().map(|c| polygon_winding(c, fa)).sum();
    Ok(UnivalenceCertificate {
        image_simple: simple,
        derivative_zeros: zeros,
        degree,
        passed: simple && zeros.abs() < 0.5 && degree == 1,
    })
}

fn image_domain(map: &ConformalMap) -> Result<Domain> {
    let d = map.domain();
    if !map.certificate.passed {
        return Err(QdError::Univalence(
            "image domain requested for a map without a univalence certificate".into(),
        ));
    }
    let mut curves = Vec::with_capacity(d.connectivity());
    for k in 0..d.connectivity() {
        let n = d.curve(k).len();
        let c = Curve::fit_points(map.f_boundary.curve(k), n / 4, n).map_err(|e| match e {
            QdError::SelfIntersection { seg_a, seg_b, .. } => QdError::SelfIntersection { curve: k, seg_a, seg_b },
            e => e,
        })?;
        curves.push(c);
    }
    let mut holes = Vec::with_capacity(d.genus());
    for (j, &zj) in d.hole_points().iter().enumerate() {
        let img = &curves[j + 1];
        let candidates = [
            polygon_centroid(img.samples()),
            zj,
            map.f_boundary.curve(j + 1).iter().sum::<Complex>() / img.len() as Real,
        ];
        let inside = candidates.iter().copied().find(|&q| img.polygon_winding(q) != 0);
        holes
            .push(inside.ok_or_else(|| QdError::Nesting(format!("no interior point found for image hole {}", j + 1)))?);
    }
    Domain::new(curves, holes)
}

fn polygon_centroid(v: &[Complex]) -> Complex {
    let n = v.len();
    let mut area = 0.0;
    let mut c = Complex::new(0.0, 0.0);
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % n]);
        let cross = p.re * q.im - q.re * p.im;
        area += cross;
        c += (p + q) * cross;
    }
    c / (3.0 * area)
}
