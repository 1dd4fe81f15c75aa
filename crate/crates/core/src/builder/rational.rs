use std::f64::consts::PI;

use crate::geometry::{BoundaryFunction, Domain};
use crate::numerics::interp::NewtonInterpolant;
use crate::{Complex, QdError, Result};

/// The rational functions `R_j(z) = 1/(2πi(z−z_j)) + (z−z_j) Q_j(z)`, one
/// per hole, with `Q_j` the minimal-degree polynomial making `R_j(z_k) = 0`
/// for `k ≠ j`.
///
/// Hole periods are taken around each hole counterclockwise (the opposite
/// of its orientation as part of the boundary), so that
/// `∮_{γ_k} R_j dz = δ_{kj}` and `∮_{γ_k} R_j R_m dz = 0`.
#[derive(Debug, Clone)]
pub struct RationalBasis {
    hole_points: Vec<Complex>,
    q: Vec<Option<NewtonInterpolant<Complex>>>,
}

impl RationalBasis {
    pub fn new(hole_points: &[Complex]) -> Result<Self> {
        let two_pi_i = Complex::new(0.0, 2.0 * PI);
        let mut q = Vec::with_capacity(hole_points.len());
        for (j, &zj) in hole_points.iter().enumerate() {
            let nodes: Vec<Complex> = hole_points
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &z)| z)
                .collect();
            if nodes.contains(&zj) {
                return Err(QdError::CoincidentNodes(format!("hole point {zj} repeated")));
            }
            if nodes.is_empty() {
                q.push(None);
                continue;
            }
            let values: Vec<Complex> = nodes.iter().map(|&z| -1.0 / (two_pi_i * (z - zj) * (z - zj))).collect();
            let interp = NewtonInterpolant::new(&nodes, &values)
                .ok_or_else(|| QdError::CoincidentNodes("hole points must be distinct".into()))?;
            q.push(Some(interp));
        }
        Ok(Self {
            hole_points: hole_points.to_vec(),
            q,
        })
    }

    pub fn len(&self) -> usize {
        self.hole_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hole_points.is_empty()
    }

    /// `R_j(z)` for `j = 1..=p`.
    pub fn eval(&self, j: usize, z: Complex) -> Complex {
        let zj = self.hole_points[j - 1];
        let q = self.q[j - 1].as_ref().map_or(Complex::new(0.0, 0.0), |q| q.eval(z));
        1.0 / (Complex::new(0.0, 2.0 * PI) * (z - zj)) + (z - zj) * q
    }

    /// `Q_j(z)`.
    pub fn q(&self, j: usize, z: Complex) -> Complex {
        self.q[j - 1].as_ref().map_or(Complex::new(0.0, 0.0), |q| q.eval(z))
    }

    /// Boundary traces of `R_1, …, R_p`.
    pub fn traces(&self, domain: &Domain) -> Vec<BoundaryFunction> {
        (1..=self.len()).map(|j| domain.trace(|z| self.eval(j, z))).collect()
    }
}

/// `R_j` traces for a multiply connected domain.
pub fn rational_basis(domain: &Domain) -> Result<Vec<BoundaryFunction>> {
    if domain.is_simply_connected() {
        return Err(QdError::InvalidInput(
            "rational basis needs a multiply connected domain".into(),
        ));
    }
    Ok(RationalBasis::new(domain.hole_points())?.traces(domain))
}

/// `∮_{γ_k} u dz` around hole `k` (`1..=p`), counterclockwise.
pub fn hole_period(domain: &Domain, u: &BoundaryFunction, k: usize) -> Result<Complex> {
    Ok(-domain.contour_integral(u, crate::geometry::Against::Dz, crate::geometry::Path::Curve(k))?)
}

/// `(∮_{γ_k} R_j dz)_{k,j}` and `max_{k,j,m} |∮_{γ_k} R_j R_m dz|`.
pub fn rational_tables(domain: &Domain, traces: &[BoundaryFunction]) -> Result<(Vec<Vec<Complex>>, f64)> {
    let p = traces.len();
    let mut delta = vec![vec![Complex::new(0.0, 0.0); p]; p];
    let mut ortho: f64 = 0.0;
    for k in 1..=p {
        for j in 0..p {
            delta[k - 1][j] = hole_period(domain, &traces[j], k)?;
            for m in 0..p {
                ortho = ortho.max(hole_period(domain, &traces[j].mul(&traces[m])?, k)?.norm());
            }
        }
    }
    Ok((delta, ortho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::geometry::Curve;

    #[test]
    fn annulus_basis() {
        let d = Domain::annulus(c64(0., 0.), 0.4, 1.0, 128).unwrap();
        let r = rational_basis(&d).unwrap();
        let z = c64(0.7, 0.2);
        let b = RationalBasis::new(&[c64(0., 0.)]).unwrap();
        assert!((b.eval(1, z) - 1.0 / (c64(0., 2.0 * PI) * z)).norm() < 1e-15);
        let (delta, ortho) = rational_tables(&d, &r).unwrap();
        assert!((delta[0][0] - 1.0).norm() < 1e-12);
        assert!(ortho < 1e-12);
        // Cauchy's theorem over the whole boundary.
        assert!(d.integrate_dz(&r[0]).unwrap().norm() < 1e-12);
    }

    #[test]
    fn three_connected_table() {
        let outer = Curve::ellipse(c64(0., 0.), 2.5, 1.5, 256).unwrap();
        let h1 = Curve::circle(c64(-1., 0.), 0.4, 256, false).unwrap();
        let h2 = Curve::circle(c64(1., 0.), 0.4, 256, false).unwrap();
        let d = Domain::new(vec![outer, h1, h2], vec![c64(-1., 0.), c64(1., 0.)]).unwrap();
        let b = RationalBasis::new(d.hole_points()).unwrap();
        let expect = -1.0 / (c64(0., 2.0 * PI) * 4.0);
        assert!((b.q(1, c64(0.3, 0.2)) - expect).norm() < 1e-15);
        assert!(b.eval(1, c64(1., 0.)).norm() < 1e-15);
        let (delta, ortho) = rational_tables(&d, &b.traces(&d)).unwrap();
        for k in 0..2 {
            for j in 0..2 {
                let e = if k == j { 1.0 } else { 0.0 };
                assert!((delta[k][j] - e).norm() < 1e-10);
            }
        }
        assert!(ortho < 1e-10);
    }

    #[test]
    fn coincident_hole_points() {
        assert!(matches!(
            RationalBasis::new(&[c64(0.5, 0.), c64(0.5, 0.)]),
            Err(QdError::CoincidentNodes(_))
        ));
    }
}
