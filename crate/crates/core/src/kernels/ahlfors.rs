use std::f64::consts::PI;

use crate::geometry::{BoundaryFunction, Domain};
use crate::kernels::szego::{KernelField, SzegoSolver};
use crate::{Complex, QdError, Real, Result};

/// The Ahlfors map `f_a = S(·,a)/L(·,a)` onto the unit disc (the Riemann map
/// when the domain is simply connected).
#[derive(Debug, Clone)]
pub struct AhlforsMap {
    pub boundary: BoundaryFunction,
    pub kernel: KernelField,
}

impl AhlforsMap {
    pub fn base_point(&self) -> Complex {
        self.kernel.base_point
    }

    /// `f_a` at interior points. `f_a(a) = 0`.
    pub fn evaluate(&self, domain: &Domain, points: &[Complex]) -> Result<Vec<Complex>> {
        let a = self.base_point();
        let s = self.kernel.szego_interior(domain, points)?;
        let rem = self.kernel.garabedian_remainder(domain);
        let l = crate::kernels::evaluate_hardy_interior(domain, &rem, points)?;
        Ok(points
            .iter()
            .zip(s.iter().zip(l))
            .map(|(&z, (&s, l))| {
                if z == a {
                    return Complex::new(0.0, 0.0);
                }
                // S / (1/(2π(z−a)) + ℓ) = 2π(z−a) S / (1 + 2π(z−a)ℓ)
                let t = (z - a) * 2.0 * PI;
                t * s / (1.0 + t * l)
            })
            .collect())
    }

    /// `f_a'(a) = 2π S(a, a)`, real and positive.
    pub fn derivative_at_base(&self, domain: &Domain) -> Result<Complex> {
        let a = self.base_point();
        Ok(self.kernel.szego_interior(domain, &[a])?[0] * 2.0 * PI)
    }

    /// `max | |f_a| − 1 |` on the boundary.
    pub fn modulus_defect(&self) -> Real {
        self.boundary
            .values()
            .iter()
            .map(|v| (v.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn ahlfors_map(domain: &Domain, a: Complex) -> Result<AhlforsMap> {
    ahlfors_from_solver(&SzegoSolver::new(domain)?, a)
}

pub fn ahlfors_from_solver(solver: &SzegoSolver, a: Complex) -> Result<AhlforsMap> {
    let kernel = solver.solve(a, 0)?;
    let lmin = kernel
        .garabedian
        .values()
        .iter()
        .map(|l| l.norm())
        .fold(f64::INFINITY, f64::min);
    let scale = kernel.garabedian.max_abs();
    if lmin < 1e-10 * scale {
        return Err(QdError::SingularSystem(format!(
            "Garabedian kernel nearly vanishes on the boundary (|L| = {lmin:.3e})"
        )));
    }
    let boundary = kernel.szego.div(&kernel.garabedian)?;
    Ok(AhlforsMap { boundary, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn disc_at_origin_is_identity() {
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        let f = ahlfors_map(&d, c64(0., 0.)).unwrap();
        let id = d.trace(|z| z);
        assert!(f.boundary.max_diff(&id).unwrap() < 1e-12);
    }

    #[test]
    fn disc_mobius() {
        let d = Domain::disc(c64(0., 0.), 1.0, 256).unwrap();
        let a = c64(0.3, 0.);
        let f = ahlfors_map(&d, a).unwrap();
        let m = d.trace(|z| (z - a) / (1.0 - a.conj() * z));
        assert!(f.boundary.max_diff(&m).unwrap() < 1e-9);
        let inner = f.evaluate(&d, &[c64(0.1, 0.2), a]).unwrap();
        let z = c64(0.1, 0.2);
        assert!((inner[0] - (z - a) / (1.0 - a * z)).norm() < 1e-10);
        assert_eq!(inner[1], c64(0., 0.));
        let fp = f.derivative_at_base(&d).unwrap();
        assert!((fp - c64(1.0 / (1.0 - 0.09), 0.)).norm() < 1e-10);
    }
}
