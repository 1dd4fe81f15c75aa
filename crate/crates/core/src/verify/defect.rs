use crate::geometry::{BoundaryFunction, Domain};
use crate::{Complex, Real, Result};

/// Largest `|∮ u q dz| / ‖q‖_{L²(ds)}` over `q = ((z − c)/r)^n Π_j (z − w_j)^{n_j + 1}`,
/// `n ≤ degree`, and on multiply connected domains the same `q` times
/// `(z − z_h)^{−s}`, `1 ≤ s ≤ degree`, for each hole point `z_h`.
///
/// Near zero iff `u` is the trace of a function meromorphic in the domain
/// with poles of order at most `n_j + 1` at `w_j`.
pub fn moment_defect(
    domain: &Domain,
    u: &BoundaryFunction,
    nodes: &[Complex],
    orders: &[usize],
    degree: usize,
) -> Result<Real> {
    let (c, r) = (domain.centroid(), domain.radius());
    let base = domain.trace(|z| {
        nodes
            .iter()
            .zip(orders)
            .map(|(&w, &n)| ((z - w) / r).powu(n as u32 + 1))
            .product::<Complex>()
    });
    let mut shifts: Vec<Option<Complex>> = vec![None];
    shifts.extend(domain.hole_points().iter().map(|&z| Some(z)));
    let mut worst: Real = 0.0;
    for shift in shifts {
        let range = match shift {
            None => 0..=degree,
            Some(_) => 1..=degree,
        };
        for k in range {
            let q = base.zip_with(&domain.trace(|z| z), |b, z| {
                b * match shift {
                    None => ((z - c) / r).powu(k as u32),
                    Some(h) => (r / (z - h)).powu(k as u32),
                }
            })?;
            let norm = domain
                .integrate_ds(&q.map(|v| Complex::new(v.norm_sqr(), 0.0)))?
                .re
                .sqrt();
            let m = domain.integrate_dz(&u.mul(&q)?)?;
            worst = worst.max(m.norm() / norm);
        }
    }
    Ok(worst)
}
