use crate::geometry::{BoundaryFunction, Domain};
use crate::{Complex, Real, Result};

/// `⟨u, v⟩ = ∮ u v̄ ds`.
pub fn hardy_inner(domain: &Domain, u: &BoundaryFunction, v: &BoundaryFunction) -> Result<Complex> {
    domain.grid().check(u.grid())?;
    domain.grid().check(v.grid())?;
    Ok(u.values()
        .iter()
        .zip(v.values())
        .zip(domain.ds())
        .map(|((a, b), w)| a * b.conj() * w)
        .sum())
}

/// `‖u‖ = ⟨u, u⟩^{1/2}`.
pub fn hardy_norm(domain: &Domain, u: &BoundaryFunction) -> Result<Real> {
    Ok(hardy_inner(domain, u, u)?.re.max(0.0).sqrt())
}

/// Orthogonal projector onto the discrete Hardy space of a domain grid.
///
/// The space is spanned by `(z − c)^k` for `0 ≤ k < n₀/2` and, for each hole
/// `j`, `(z − z_j)^{−k}` for `1 ≤ k < n_j/2`, where `n_k` is the grid size of
/// curve `k`. The basis is orthonormalized in the arc-length inner product by
/// Arnoldi-style Gram–Schmidt (each new vector is the previous one times the
/// generating factor), which stays well conditioned where raw powers do not.
#[derive(Debug, Clone)]
pub struct HardyProjector {
    /// Orthonormal basis vectors, stored pre-multiplied by `√ds`.
    basis: Vec<Vec<Complex>>,
    sqrt_ds: Vec<Real>,
    grid: crate::geometry::Grid,
}

fn dot(a: &[Complex], b: &[Complex]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm(a: &[Complex]) -> Real {
    a.iter().map(|x| x.norm_sqr()).sum::<Real>().sqrt()
}

impl HardyProjector {
    pub fn new(domain: &Domain) -> Self {
        let sqrt_ds: Vec<Real> = domain.ds().iter().map(|w| w.sqrt()).collect();
        let mut basis: Vec<Vec<Complex>> = Vec::new();
        let centre = domain.centroid();
        let scale = domain.radius();
        let pts = domain.points();

        let push = |basis: &mut Vec<Vec<Complex>>, mut v: Vec<Complex>| -> Option<Vec<Complex>> {
            let n0 = norm(&v);
            if n0 == 0.0 {
                return None;
            }
            for _ in 0..2 {
                for q in basis.iter() {
                    let c = dot(&v, q);
                    v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let n1 = norm(&v);
            if n1 < 1e-10 * n0 {
                return None;
            }
            v.iter_mut().for_each(|x| *x /= n1);
            basis.push(v.clone());
            Some(v)
        };

        // Polynomial part: q_{k+1} ∝ ((z − c)/scale) q_k.
        let n0 = domain.curve(0).len();
        let mut prev: Vec<Complex> = sqrt_ds.iter().map(|&w| Complex::new(w, 0.0)).collect();
        for k in 0..(n0 / 2) {
            let v = if k == 0 {
                prev.clone()
            } else {
                prev.iter().zip(pts).map(|(q, z)| q * (z - centre) / scale).collect()
            };
            match push(&mut basis, v) {
                Some(q) => prev = q,
                None => break,
            }
        }
        // Hole parts: q_{k+1} ∝ (r_j/(z − z_j)) q_k.
        for (j, &zj) in domain.hole_points().iter().enumerate() {
            let c = domain.curve(j + 1);
            let rj = c
                .samples()
                .iter()
                .map(|z| (z - zj).norm())
                .fold(f64::INFINITY, f64::min);
            let mut prev: Vec<Complex> = sqrt_ds.iter().map(|&w| Complex::new(w, 0.0)).collect();
            for _ in 1..(c.len() / 2) {
                let v: Vec<Complex> = prev.iter().zip(pts).map(|(q, z)| q * rj / (z - zj)).collect();
                match push(&mut basis, v) {
                    Some(q) => prev = q,
                    None => break,
                }
            }
        }
        Self {
            basis,
            sqrt_ds,
            grid: domain.grid().clone(),
        }
    }

    /// Dimension of the discrete Hardy space.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn project(&self, u: &BoundaryFunction) -> Result<BoundaryFunction> {
        self.grid.check(u.grid())?;
        let x: Vec<Complex> = u.values().iter().zip(&self.sqrt_ds).map(|(v, w)| v * w).collect();
        let mut y = vec![Complex::new(0.0, 0.0); x.len()];
        for q in &self.basis {
            let c = dot(&x, q);
            y.iter_mut().zip(q).for_each(|(a, b)| *a += c * b);
        }
        let out = y.iter().zip(&self.sqrt_ds).map(|(v, w)| v / w).collect();
        BoundaryFunction::new(self.grid.clone(), out)
    }
}

/// Orthogonal projection of `u` onto the discrete Hardy space.
pub fn szego_projection(domain: &Domain, u: &BoundaryFunction) -> Result<BoundaryFunction> {
    HardyProjector::new(domain).project(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::geometry::Curve;
    use std::f64::consts::PI;

    #[test]
    fn disc_inner_products() {
        let d = Domain::disc(c64(0., 0.), 1.0, 256).unwrap();
        let z = d.trace(|z| z);
        let one = d.trace(|_| c64(1., 0.));
        assert!((hardy_inner(&d, &z, &z).unwrap() - c64(2.0 * PI, 0.)).norm() < 1e-12);
        assert!(hardy_inner(&d, &z, &one).unwrap().norm() < 1e-12);
    }

    #[test]
    fn disc_projection_is_fourier_truncation() {
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        let p = HardyProjector::new(&d);
        assert_eq!(p.dimension(), 64);
        let zbar = d.trace(|z| z.conj());
        assert!(p.project(&zbar).unwrap().max_abs() < 1e-12);
        let u = d.trace(|z| z * z + z.conj().powu(3));
        let z2 = d.trace(|z| z * z);
        assert!(p.project(&u).unwrap().max_diff(&z2).unwrap() < 1e-12);
    }

    #[test]
    fn holomorphic_traces_are_fixed() {
        let outer = Curve::ellipse(c64(0., 0.), 1.5, 1.0, 256).unwrap();
        let hole = Curve::circle(c64(0.3, 0.1), 0.3, 256, false).unwrap();
        let d = Domain::new(vec![outer], vec![]).unwrap();
        let u = d.trace(|z| z.powu(3));
        assert!(szego_projection(&d, &u).unwrap().max_diff(&u).unwrap() < 1e-10);
        let d2 = Domain::new(
            vec![Curve::ellipse(c64(0., 0.), 1.5, 1.0, 256).unwrap(), hole],
            vec![c64(0.3, 0.1)],
        )
        .unwrap();
        let v = d2.trace(|z| z.powu(3) + 1.0 / (z - c64(0.3, 0.1)));
        assert!(szego_projection(&d2, &v).unwrap().max_diff(&v).unwrap() < 1e-10);
    }
}
