use std::f64::consts::PI;

use crate::geometry::boundary::{BoundaryFunction, Grid};
use crate::geometry::curve::Curve;
use crate::geometry::polygon;
use crate::numerics::spectral;
use crate::{Complex, QdError, Real, Result};

/// Measure a boundary integral is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Against {
    /// Complex line element `dz`.
    Dz,
    /// Arc length `ds`.
    Ds,
}

/// Which part of the boundary to integrate over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    /// A single boundary curve, with its orientation as part of `bΩ`.
    Curve(usize),
    /// The whole boundary.
    Boundary,
}

/// A bounded domain whose boundary is a finite union of spectral curves.
///
/// `curves[0]` is the outer boundary (counterclockwise) and the remaining
/// curves bound the holes (clockwise), so the boundary as a whole is
/// positively oriented. `hole_points[j - 1]` lies inside hole `j`.
#[derive(Debug, Clone)]
pub struct Domain {
    curves: Vec<Curve>,
    hole_points: Vec<Complex>,
    grid: Grid,
    points: Vec<Complex>,
    dz: Vec<Complex>,
    ds: Vec<Real>,
    tangent: Vec<Complex>,
}

/// Rounds a contour-integral winding number, insisting it is quantized.
fn quantized(w: Real, what: &str) -> Result<i64> {
    let r = w.round();
    if (w - r).abs() > 1e-8 {
        return Err(QdError::InvalidInput(format!(
            "winding number of {what} is {w:.3e}, not an integer (point too close to the curve?)"
        )));
    }
    Ok(r as i64)
}

impl Domain {
    /// Validate nesting and orientation and build the boundary grid.
    pub fn new(curves: Vec<Curve>, hole_points: Vec<Complex>) -> Result<Self> {
        if curves.is_empty() {
            return Err(QdError::InvalidInput("a domain needs at least one curve".into()));
        }
        let n = curves.len();
        if hole_points.len() != n - 1 {
            return Err(QdError::InvalidInput(format!(
                "{} curves need {} hole points, got {}",
                n,
                n - 1,
                hole_points.len()
            )));
        }
        if curves[0].signed_area() <= 0.0 {
            return Err(QdError::Orientation {
                curve: 0,
                detail: "outer curve must be counterclockwise".into(),
            });
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if polygon::polygons_intersect(curves[a].samples(), curves[b].samples()) {
                    return Err(QdError::CurvesIntersect { a, b });
                }
            }
        }
        for (j, &zj) in hole_points.iter().enumerate().map(|(i, z)| (i + 1, z)) {
            let w0 = quantized(curves[0].winding_number(zj), "the outer curve")?;
            if w0 != 1 {
                return Err(QdError::Nesting(format!(
                    "hole point {j} is not inside the outer curve (winding {w0})"
                )));
            }
            for (k, c) in curves.iter().enumerate().skip(1) {
                let wk = quantized(c.winding_number(zj), &format!("curve {k}"))?;
                let expected = if k == j { -1 } else { 0 };
                if wk == expected {
                    continue;
                }
                if k == j && wk == 1 {
                    return Err(QdError::Orientation {
                        curve: k,
                        detail: "hole curves must be clockwise".into(),
                    });
                }
                return Err(QdError::Nesting(format!(
                    "curve {k} winds {wk} times about hole point {j}, expected {expected}"
                )));
            }
        }
        for k in 1..n {
            let p = curves[k].samples()[0];
            if curves[0].polygon_winding(p) != 1 {
                return Err(QdError::Nesting(format!("curve {k} is not inside the outer curve")));
            }
            for m in 1..n {
                if m != k && curves[m].polygon_winding(p) != 0 {
                    return Err(QdError::Nesting(format!("curve {k} lies inside hole {m}")));
                }
            }
        }

        let mut offsets = vec![0];
        let mut points = Vec::new();
        let mut dz = Vec::new();
        let mut ds = Vec::new();
        let mut tangent = Vec::new();
        for c in &curves {
            let h = c.step();
            points.extend_from_slice(c.samples());
            dz.extend(c.derivative_samples().iter().map(|d| d * h));
            let (t, w) = c.tangent_frame();
            tangent.extend(t);
            ds.extend(w);
            offsets.push(points.len());
        }
        let grid = Grid::new(offsets, &points);
        Ok(Self {
            curves,
            hole_points,
            grid,
            points,
            dz,
            ds,
            tangent,
        })
    }

    /// The disc `|z - center| < radius`.
    pub fn disc(center: Complex, radius: Real, n_samples: usize) -> Result<Self> {
        Self::new(vec![Curve::circle(center, radius, n_samples, true)?], vec![])
    }

    /// The annulus `inner < |z - center| < outer`.
    pub fn annulus(center: Complex, inner: Real, outer: Real, n_samples: usize) -> Result<Self> {
        Self::new(
            vec![
                Curve::circle(center, outer, n_samples, true)?,
                Curve::circle(center, inner, n_samples, false)?,
            ],
            vec![center],
        )
    }

    /// The same domain on grids of a different size.
    pub fn resampled(&self, n_samples: usize) -> Result<Self> {
        let curves = self
            .curves
            .iter()
            .map(|c| c.resampled(n_samples))
            .collect::<Result<_>>()?;
        Self::new(curves, self.hole_points.clone())
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn curve(&self, k: usize) -> &Curve {
        &self.curves[k]
    }

    pub fn hole_points(&self) -> &[Complex] {
        &self.hole_points
    }

    /// Number of boundary components `n`.
    pub fn connectivity(&self) -> usize {
        self.curves.len()
    }

    /// Number of holes `p = n - 1`.
    pub fn genus(&self) -> usize {
        self.curves.len() - 1
    }

    pub fn is_simply_connected(&self) -> bool {
        self.curves.len() == 1
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Total number of boundary nodes.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Boundary nodes, curve by curve.
    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    /// Trapezoidal `dz` weights `(2π/n) z'(t_i)`.
    pub fn dz(&self) -> &[Complex] {
        &self.dz
    }

    /// Trapezoidal arc-length weights.
    pub fn ds(&self) -> &[Real] {
        &self.ds
    }

    /// Unit tangent at the nodes.
    pub fn tangent_values(&self) -> &[Complex] {
        &self.tangent
    }

    pub fn tangent(&self) -> BoundaryFunction {
        self.function(self.tangent.clone())
    }

    /// Wrap values on this domain's grid. Panics on a length mismatch.
    pub fn function(&self, values: Vec<Complex>) -> BoundaryFunction {
        BoundaryFunction::new(self.grid.clone(), values).expect("values sized to the domain grid")
    }

    /// Boundary trace of `f`.
    pub fn trace(&self, f: impl Fn(Complex) -> Complex) -> BoundaryFunction {
        self.function(self.points.iter().map(|&z| f(z)).collect())
    }

    /// `∮ u dz` or `∮ u ds` over one curve or the whole boundary.
    pub fn contour_integral(&self, u: &BoundaryFunction, against: Against, path: Path) -> Result<Complex> {
        self.grid.check(u.grid())?;
        let range = match path {
            Path::Curve(k) => {
                if k >= self.curves.len() {
                    return Err(QdError::InvalidInput(format!("no boundary curve {k}")));
                }
                self.grid.range(k)
            }
            Path::Boundary => 0..self.len(),
        };
        let v = &u.values()[range.clone()];
        Ok(match against {
            Against::Dz => v.iter().zip(&self.dz[range]).map(|(a, b)| a * b).sum(),
            Against::Ds => v.iter().zip(&self.ds[range]).map(|(a, b)| a * b).sum(),
        })
    }

    /// `∮ u dz` over the whole boundary.
    pub fn integrate_dz(&self, u: &BoundaryFunction) -> Result<Complex> {
        self.contour_integral(u, Against::Dz, Path::Boundary)
    }

    /// `∮ u ds` over the whole boundary.
    pub fn integrate_ds(&self, u: &BoundaryFunction) -> Result<Complex> {
        self.contour_integral(u, Against::Ds, Path::Boundary)
    }

    /// Derivative along the boundary, `du/dz = (du/dt) / z'(t)`, computed
    /// spectrally curve by curve.
    pub fn tangential_derivative(&self, u: &BoundaryFunction) -> Result<BoundaryFunction> {
        self.grid.check(u.grid())?;
        let mut out = Vec::with_capacity(self.len());
        for (k, c) in self.curves.iter().enumerate() {
            let du = spectral::derivative(u.curve(k));
            out.extend(du.iter().zip(c.derivative_samples()).map(|(a, b)| a / b));
        }
        Ok(self.function(out))
    }

    pub fn perimeter(&self) -> Real {
        self.ds.iter().sum()
    }

    /// Area by the shoelace form of Green's theorem.
    pub fn area(&self) -> Real {
        self.curves.iter().map(|c| c.signed_area()).sum()
    }

    /// Area centroid, `(1/2i)∮ z z̄ dz / area`.
    pub fn centroid(&self) -> Complex {
        let m: Complex = self.points.iter().zip(&self.dz).map(|(z, dz)| z * z.conj() * dz).sum();
        m / Complex::new(0.0, 2.0) / self.area()
    }

    /// Largest distance between two nodes of the outer curve.
    pub fn diameter(&self) -> Real {
        let s = self.curves[0].samples();
        let mut d: Real = 0.0;
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                d = d.max((s[i] - s[j]).norm());
            }
        }
        d
    }

    /// Largest distance from the centroid to the boundary.
    pub fn radius(&self) -> Real {
        let c = self.centroid();
        self.curves[0]
            .samples()
            .iter()
            .map(|z| (z - c).norm())
            .fold(0.0, f64::max)
    }

    /// Whether `p` lies in the domain, by polygon winding numbers.
    pub fn contains(&self, p: Complex) -> bool {
        self.curves.iter().map(|c| c.polygon_winding(p)).sum::<i64>() == 1
    }

    /// Distance from `p` to the boundary polygon.
    pub fn distance_to_boundary(&self, p: Complex) -> Real {
        self.curves
            .iter()
            .map(|c| c.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Grid spacing (arc length between neighbouring nodes) near `p`.
    pub fn local_spacing(&self, p: Complex) -> Real {
        let (k, _) = self
            .curves
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c.distance_to(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one curve");
        let i = self.curves[k].nearest_sample(p);
        self.ds[self.grid.range(k).start + i]
    }

    /// Ensure `p` is inside and at least `factor` grid spacings from the
    /// boundary.
    pub fn check_clearance(&self, p: Complex, factor: Real) -> Result<()> {
        if !p.re.is_finite() || !p.im.is_finite() || !self.contains(p) {
            return Err(QdError::OutsideDomain { point: p });
        }
        let distance = self.distance_to_boundary(p);
        let required = factor * self.local_spacing(p);
        if distance < required {
            return Err(QdError::TooCloseToBoundary {
                point: p,
                distance,
                required,
            });
        }
        Ok(())
    }

    /// Winding number of the boundary values `u` about zero, summed over the
    /// curves (by the polygon angle sum).
    pub fn winding_of(&self, u: &BoundaryFunction) -> Result<i64> {
        self.grid.check(u.grid())?;
        Ok((0..self.curves.len())
            .map(|k| polygon::winding_about_zero(u.curve(k)))
            .sum())
    }

    /// `(1/2πi)∮ u'/u dz`: the argument-principle count for boundary data of
    /// a function holomorphic in the domain.
    pub fn argument_count(&self, u: &BoundaryFunction) -> Result<Real> {
        let du = self.tangential_derivative(u)?;
        let q = du.div(u)?;
        Ok((self.integrate_dz(&q)? / Complex::new(0.0, 2.0 * PI)).re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn unit_circle_tangent_and_length() {
        let d = Domain::disc(c64(0., 0.), 1.0, 256).unwrap();
        for (z, t) in d.points().iter().zip(d.tangent_values()) {
            assert!((t - c64(0., 1.) * z).norm() < 1e-14);
        }
        assert!((d.perimeter() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn reversed_circle_tangent() {
        let c = Curve::circle(c64(0., 0.), 1.0, 128, false).unwrap();
        let (t, _) = c.tangent_frame();
        for (z, t) in c.samples().iter().zip(t) {
            assert!((t + c64(0., 1.) * z).norm() < 1e-14);
        }
    }

    #[test]
    fn annulus_validates() {
        let d = Domain::annulus(c64(0., 0.), 0.4, 1.0, 128).unwrap();
        assert_eq!(d.connectivity(), 2);
        assert!((d.area() - PI * (1.0 - 0.16)).abs() < 1e-12);
        assert!(d.contains(c64(0.7, 0.0)));
        assert!(!d.contains(c64(0.1, 0.0)));
        assert!(!d.contains(c64(1.1, 0.0)));
    }

    #[test]
    fn positively_oriented_hole_rejected() {
        let err = Domain::new(
            vec![
                Curve::circle(c64(0., 0.), 1.0, 64, true).unwrap(),
                Curve::circle(c64(0., 0.), 0.4, 64, true).unwrap(),
            ],
            vec![c64(0., 0.)],
        )
        .unwrap_err();
        assert!(matches!(err, QdError::Orientation { curve: 1, .. }));
    }

    #[test]
    fn hole_point_on_wrong_side_rejected() {
        let err = Domain::new(
            vec![
                Curve::circle(c64(0., 0.), 1.0, 64, true).unwrap(),
                Curve::circle(c64(0., 0.), 0.4, 64, false).unwrap(),
            ],
            vec![c64(0.7, 0.)],
        )
        .unwrap_err();
        assert!(matches!(err, QdError::Nesting(_)));
    }

    #[test]
    fn clockwise_outer_rejected() {
        let err = Domain::new(vec![Curve::circle(c64(0., 0.), 1.0, 64, false).unwrap()], vec![]).unwrap_err();
        assert!(matches!(err, QdError::Orientation { curve: 0, .. }));
    }

    #[test]
    fn residue_integrals_on_circle() {
        let d = Domain::disc(c64(0., 0.), 1.0, 256).unwrap();
        let inv = d.trace(|z| 1.0 / z);
        let zbar = d.trace(|z| z.conj());
        let two_pi_i = c64(0., 2.0 * PI);
        assert!((d.integrate_dz(&inv).unwrap() - two_pi_i).norm() < 1e-12);
        assert!((d.integrate_dz(&zbar).unwrap() - two_pi_i).norm() < 1e-12);
    }

    #[test]
    fn grid_mismatch_detected() {
        let a = Domain::disc(c64(0., 0.), 1.0, 64).unwrap();
        let b = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        let u = b.trace(|z| z);
        assert!(matches!(a.integrate_dz(&u), Err(QdError::GridMismatch(_))));
        let c = Domain::disc(c64(0., 0.), 2.0, 64).unwrap();
        let v = c.trace(|z| z);
        assert!(matches!(a.trace(|z| z).add(&v), Err(QdError::GridMismatch(_))));
    }

    #[test]
    fn clearance_checks() {
        let d = Domain::disc(c64(0., 0.), 1.0, 256).unwrap();
        assert!(d.check_clearance(c64(0.5, 0.0), 5.0).is_ok());
        assert!(matches!(
            d.check_clearance(c64(0.999, 0.0), 5.0),
            Err(QdError::TooCloseToBoundary { .. })
        ));
        assert!(matches!(
            d.check_clearance(c64(1.5, 0.0), 5.0),
            Err(QdError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn argument_count_of_polynomial() {
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        let u = d.trace(|z| (z - 0.3) * (z + c64(0.0, 0.5)));
        assert!((d.argument_count(&u).unwrap() - 2.0).abs() < 1e-10);
        assert_eq!(d.winding_of(&u).unwrap(), 2);
    }
}
