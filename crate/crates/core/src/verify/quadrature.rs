use nalgebra::DMatrix;
use serde::Serialize;

use crate::builder::ConformalMap;
use crate::geometry::{BoundaryFunction, Domain};
use crate::kernels::DEFAULT_CLEARANCE;
use crate::numerics::bell::{bell_table, binomial};
use crate::numerics::lsq::TruncatedSvd;
use crate::verify::functions::TestFunction;
use crate::{Complex, QdError, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    ArcLength,
    Area,
}

/// A quadrature functional `h ↦ Σ_j Σ_{k ≤ n_j} c_jk h^{(k)}(w_j)`.
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureData {
    pub measure: Measure,
    pub nodes: Vec<Complex>,
    pub orders: Vec<usize>,
    /// `coefficients[j][k] = c_jk`.
    pub coefficients: Vec<Vec<Complex>>,
    /// Max relative residual on the training functions (0 for extracted
    /// data).
    pub fit_residual: Real,
    pub holdout_residual: Option<Real>,
    pub rank: usize,
    pub condition: Real,
}

impl QuadratureData {
    pub fn functional(&self, h: &TestFunction) -> Complex {
        self.nodes
            .iter()
            .zip(&self.coefficients)
            .map(|(&w, c)| {
                h.jets(w, c.len() - 1)
                    .iter()
                    .zip(c)
                    .map(|(d, c)| c * d)
                    .sum::<Complex>()
            })
            .sum()
    }

    pub fn unknowns(&self) -> usize {
        self.orders.iter().map(|n| n + 1).sum()
    }
}

/// `∬_Ω h dA = (1/2i)∮ h z̄ dz`.
pub fn area_moment(domain: &Domain, h: &BoundaryFunction) -> Result<Complex> {
    let u = h.zip_with(&domain.trace(|z| z.conj()), |a, b| a * b)?;
    Ok(domain.integrate_dz(&u)? / Complex::new(0.0, 2.0))
}

/// `∮ h ds` or `∬ h dA` over the domain.
pub fn moment(domain: &Domain, h: &TestFunction, measure: Measure) -> Result<Complex> {
    let trace = domain.trace(|w| h.value(w));
    match measure {
        Measure::ArcLength => domain.integrate_ds(&trace),
        Measure::Area => area_moment(domain, &trace),
    }
}

/// Default training family: powers of `(w − centroid)/radius` up to degree
/// `2·Σ(n_j + 1)` (at most a third of the smallest curve grid), and on
/// multiply connected domains the powers `(w − z_h)^{−s}` about each hole
/// point, `s ≤ Σ(n_j + 1)` (same cap).
pub fn default_training(domain: &Domain, orders: &[usize]) -> Vec<TestFunction> {
    let unknowns: usize = orders.iter().map(|n| n + 1).sum();
    let cap = domain.curves().iter().map(|c| c.len()).min().unwrap_or(0) / 3;
    let (c, r) = (domain.centroid(), domain.radius());
    let mut out: Vec<TestFunction> = (0..=(2 * unknowns).min(cap))
        .map(|k| TestFunction::power(c, r, k as u32))
        .collect();
    for &z in domain.hole_points() {
        let gap = domain
            .points()
            .iter()
            .map(|w| (w - z).norm())
            .fold(f64::INFINITY, f64::min);
        for s in 1..=unknowns.min(cap) {
            out.push(TestFunction::Pole {
                pole: z,
                power: s as u32,
                coeff: Complex::new(gap.powi(s as i32), 0.0),
            });
        }
    }
    out
}

/// Relative singular-value cutoff of [`fit_quadrature`].
pub const FIT_CUTOFF: Real = 1e-14;

/// Least-squares quadrature coefficients from `functional(h_i) = moment(h_i)`
/// over a training family (default [`default_training`]).
///
/// `max_condition` rejects fits whose kept singular values spread further
/// than this.
pub fn fit_quadrature(
    domain: &Domain,
    nodes: &[Complex],
    orders: &[usize],
    measure: Measure,
    training: Option<&[TestFunction]>,
    max_condition: Option<Real>,
) -> Result<QuadratureData> {
    if nodes.len() != orders.len() || nodes.is_empty() {
        return Err(QdError::InvalidInput(
            "one order per node and at least one node required".into(),
        ));
    }
    for &w in nodes {
        domain.check_clearance(w, DEFAULT_CLEARANCE)?;
    }
    for i in 0..nodes.len() {
        for j in 0..i {
            if (nodes[i] - nodes[j]).norm() <= 1e-12 * domain.diameter() {
                return Err(QdError::RankDeficient(format!("nodes {j} and {i} coincide")));
            }
        }
    }
    let default;
    let training = match training {
        Some(t) => t,
        None => {
            default = default_training(domain, orders);
            &default
        }
    };
    let cols: usize = orders.iter().map(|n| n + 1).sum();
    if training.len() < cols {
        return Err(QdError::RankDeficient(format!(
            "{} training functions for {cols} unknowns",
            training.len()
        )));
    }
    let mut a = DMatrix::<Complex>::zeros(training.len(), cols);
    let mut b = Vec::with_capacity(training.len());
    for (i, h) in training.iter().enumerate() {
        let m = moment(domain, h, measure)?;
        let wt = 1.0 / (1.0 + m.norm());
        let mut col = 0;
        for (&w, &n) in nodes.iter().zip(orders) {
            for d in h.jets(w, n) {
                a[(i, col)] = d * wt;
                col += 1;
            }
        }
        b.push(m * wt);
    }
    let scale: Vec<Real> = (0..cols).map(|j| a.column(j).norm()).collect();
    if let Some(j) = scale.iter().position(|&s| !(s > 0.0)) {
        return Err(QdError::RankDeficient(format!(
            "unknown {j} is invisible to the training functions"
        )));
    }
    for (j, s) in scale.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = TruncatedSvd::new(a.clone(), FIT_CUTOFF)?;
    let condition = svd.condition();
    if let Some(limit) = max_condition {
        if condition > limit {
            return Err(QdError::IllConditioned(condition));
        }
    }
    let sol = svd.solve(&b);
    let x: Vec<Complex> = sol.x.iter().zip(&scale).map(|(x, s)| x / s).collect();
    // Rows are already divided by 1 + |moment|.
    let fit_residual = (0..training.len())
        .map(|i| ((0..cols).map(|j| a[(i, j)] * sol.x[j]).sum::<Complex>() - b[i]).norm())
        .fold(0.0, f64::max);
    let mut coefficients = Vec::with_capacity(nodes.len());
    let mut k = 0;
    for &n in orders {
        coefficients.push(x[k..k + n + 1].to_vec());
        k += n + 1;
    }
    Ok(QuadratureData {
        measure,
        nodes: nodes.to_vec(),
        orders: orders.to_vec(),
        coefficients,
        fit_residual,
        holdout_residual: None,
        rank: sol.rank,
        condition,
    })
}

/// Arc-length quadrature data of a single-point map from its jets:
/// `∮_{f(bΩ)} h ds = ⟨σ·(h∘f), σ⟩ = Σ_m conj(c_m) (σ·(h∘f))^{(m)}(a)`,
/// expanded by Leibniz in the `σ`-jets and by Faà di Bruno in the
/// `f`-jets.
pub fn extract_quadrature_sc(map: &ConformalMap) -> Result<QuadratureData> {
    if map.bases().len() != 1 {
        return Err(QdError::Unsupported(format!(
            "extraction needs a single base point, the map has {}; use fit_quadrature",
            map.bases().len()
        )));
    }
    let a = map.base_point;
    let d = map.domain();
    let required = DEFAULT_CLEARANCE * d.local_spacing(a);
    if d.distance_to_boundary(a) - map.jet_radius < required {
        return Err(QdError::TooCloseToBoundary {
            point: a,
            distance: d.distance_to_boundary(a) - map.jet_radius,
            required,
        });
    }
    Ok(extract_from_jets(map.sigma.coeffs(), &map.sigma_jets, &map.f_jets))
}

/// The extraction of [`extract_quadrature_sc`] from `σ = Σ_m c_m S^m(·, a)`,
/// the jets `σ^{(k)}(a)`, `k ≤ N`, and `f^{(k)}(a)`, `k ≤ N + 1`.
pub fn extract_from_jets(coeffs: &[Complex], sigma_jets: &[Complex], f_jets: &[Complex]) -> QuadratureData {
    let n = coeffs.len() - 1;
    assert!(
        sigma_jets.len() > n && f_jets.len() > n + 1,
        "jets too short for order {n}"
    );
    let bell = bell_table(&f_jets[1..], n);
    let mut coef = vec![Complex::new(0.0, 0.0); n + 1];
    for (m, cm) in coeffs.iter().enumerate() {
        for i in 0..=m {
            let w = cm.conj() * binomial::<Real>(m, i) * sigma_jets[m - i];
            for (k, ck) in coef.iter_mut().enumerate().take(i + 1) {
                *ck += w * bell[i][k];
            }
        }
    }
    QuadratureData {
        measure: Measure::ArcLength,
        nodes: vec![f_jets[0]],
        orders: vec![n],
        coefficients: vec![coef],
        fit_residual: 0.0,
        holdout_residual: None,
        rank: n + 1,
        condition: 1.0,
    }
}

/// Quadrature data for the image of a built map: extracted from the jets
/// for single-point arc-length maps, fitted on the image domain otherwise.
pub fn map_quadrature(map: &ConformalMap, image: &Domain, measure: Measure) -> Result<QuadratureData> {
    match measure {
        Measure::ArcLength if map.bases().len() == 1 => extract_quadrature_sc(map),
        Measure::ArcLength => {
            let (nodes, orders) = map.arc_length_layout();
            fit_quadrature(image, &nodes, &orders, measure, None, None)
        }
        Measure::Area => {
            let (nodes, orders) = map.area_layout().ok_or_else(|| {
                QdError::Unsupported("the arc-length build carries no area quadrature identity".into())
            })?;
            fit_quadrature(image, &nodes, &orders, measure, None, None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use std::f64::consts::PI;

    #[test]
    fn disc_area_and_arc_length_at_the_centre() {
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        let area = fit_quadrature(&d, &[c64(0., 0.)], &[0], Measure::Area, None, None).unwrap();
        assert!((area.coefficients[0][0] - PI).norm() < 1e-10);
        assert!(area.fit_residual < 1e-10);
        let arc = fit_quadrature(&d, &[c64(0., 0.)], &[0], Measure::ArcLength, None, None).unwrap();
        assert!((arc.coefficients[0][0] - 2.0 * PI).norm() < 1e-10);
    }

    #[test]
    fn area_moments_on_disc_and_annulus() {
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        assert!((area_moment(&d, &d.trace(|_| c64(1., 0.))).unwrap() - PI).norm() < 1e-12);
        assert!(area_moment(&d, &d.trace(|z| z)).unwrap().norm() < 1e-12);
        let an = Domain::annulus(c64(0., 0.), 0.4, 1.0, 128).unwrap();
        let v = area_moment(&an, &an.trace(|_| c64(1., 0.))).unwrap();
        assert!((v - PI * (1.0 - 0.16)).norm() < 1e-12);
    }

    #[test]
    fn coincident_nodes_are_rank_deficient() {
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        let e = fit_quadrature(&d, &[c64(0.1, 0.), c64(0.1, 0.)], &[0, 0], Measure::Area, None, None);
        assert!(matches!(e, Err(QdError::RankDeficient(_))));
    }
}
