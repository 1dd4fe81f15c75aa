use std::f64::consts::PI;

use nalgebra::{DMatrix, Dyn, LU};

use crate::geometry::{BoundaryFunction, Domain};
use crate::kernels::cauchy::{evaluate_hardy_interior, CauchyEvaluator};
use crate::{Complex, QdError, Real, Result};

/// Default cap on the derivative order `m` of `S^m(·, a)`.
pub const DEFAULT_ORDER_CAP: usize = 12;

/// Default base-point clearance, in local grid spacings.
pub const DEFAULT_CLEARANCE: Real = 5.0;

/// The Kerzman–Stein kernel
/// `A(z,w) = (1/2πi)(T(w)/(w−z) − conj(T(z))/(w̄−z̄))` for `z ≠ w`.
///
/// The diagonal limit is zero: the curvature terms of the two quotients
/// cancel.
pub fn kerzman_stein(z: Complex, tz: Complex, w: Complex, tw: Complex) -> Complex {
    if z == w {
        return Complex::new(0.0, 0.0);
    }
    let two_pi_i = Complex::new(0.0, 2.0 * PI);
    (tw / (w - z) - tz.conj() / (w - z).conj()) / two_pi_i
}

/// Boundary values of `S^m(·, a)` and `L^m(·, a)`.
///
/// `S^m(z, a) = (∂/∂ā)^m S(z, a)` so that `⟨h, S^m(·,a)⟩ = h^{(m)}(a)`, and
/// `L^m(z, a) = (∂/∂a)^m L(z, a)`.
#[derive(Debug, Clone)]
pub struct KernelField {
    pub base_point: Complex,
    pub order: usize,
    pub szego: BoundaryFunction,
    pub garabedian: BoundaryFunction,
}

impl KernelField {
    /// Max over the grid of `|conj(S^m) − (1/i) L^m T|`.
    pub fn sl_residual(&self, domain: &Domain) -> Result<Real> {
        let t = domain.tangent();
        let rhs = self.garabedian.mul(&t)?.scale(Complex::new(0.0, -1.0));
        self.szego.conj().max_diff(&rhs)
    }

    /// The singular part `m!/(2π(z−a)^{m+1})` of `L^m(·, a)`.
    pub fn garabedian_singular_part(&self, z: Complex) -> Complex {
        factorial(self.order) / (2.0 * PI) / (z - self.base_point).powu(self.order as u32 + 1)
    }

    /// `S^m(z, a)` at interior points.
    pub fn szego_interior(&self, domain: &Domain, points: &[Complex]) -> Result<Vec<Complex>> {
        evaluate_hardy_interior(domain, &self.szego, points)
    }

    /// `L^m(z, a)` at interior points, by subtracting the singular part,
    /// evaluating the holomorphic remainder, and adding it back.
    pub fn garabedian_interior(&self, domain: &Domain, points: &[Complex]) -> Result<Vec<Complex>> {
        let rem = self.garabedian_remainder(domain);
        let vals = evaluate_hardy_interior(domain, &rem, points)?;
        Ok(points
            .iter()
            .zip(vals)
            .map(|(&z, v)| v + self.garabedian_singular_part(z))
            .collect())
    }

    /// Boundary trace of `L^m(·,a) − m!/(2π(z−a)^{m+1})`, which is
    /// holomorphic in the domain.
    pub fn garabedian_remainder(&self, domain: &Domain) -> BoundaryFunction {
        let sing = domain.trace(|z| self.garabedian_singular_part(z));
        self.garabedian.sub(&sing).expect("same grid")
    }

    /// Evaluate both kernels near the boundary (used on cut curves).
    pub fn near_boundary(&self, eval: &CauchyEvaluator, points: &[Complex]) -> Result<(Vec<Complex>, Vec<Complex>)> {
        let rem = self.garabedian_remainder(eval.domain());
        let vals = eval.evaluate(&[&self.szego, &rem], points)?;
        let s = vals[0].clone();
        let l = points
            .iter()
            .zip(&vals[1])
            .map(|(&z, v)| v + self.garabedian_singular_part(z))
            .collect();
        Ok((s, l))
    }
}

pub(crate) fn factorial(m: usize) -> Real {
    (1..=m).map(|k| k as f64).product()
}

/// Nyström discretization of the Kerzman–Stein equation on one domain grid.
///
/// The matrix `I − A·ds` is factored once; each `(a, m)` is then a
/// triangular solve.
#[derive(Debug, Clone)]
pub struct SzegoSolver {
    domain: Domain,
    lu: LU<Complex, Dyn, Dyn>,
    order_cap: usize,
    clearance: Real,
}

impl SzegoSolver {
    pub fn new(domain: &Domain) -> Result<Self> {
        let n = domain.len();
        let z = domain.points();
        let t = domain.tangent_values();
        let ds = domain.ds();
        let m = DMatrix::from_fn(n, n, |i, k| {
            let delta = if i == k { 1.0 } else { 0.0 };
            Complex::new(delta, 0.0) - kerzman_stein(z[i], t[i], z[k], t[k]) * ds[k]
        });
        let lu = m.lu();
        let diag_min = lu.u().diagonal().iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
        if !(diag_min > 1e-13) {
            return Err(QdError::SingularSystem(format!(
                "Kerzman–Stein matrix is singular (min |U_ii| = {diag_min:.3e}); the grid is under-resolved"
            )));
        }
        Ok(Self {
            domain: domain.clone(),
            lu,
            order_cap: DEFAULT_ORDER_CAP,
            clearance: DEFAULT_CLEARANCE,
        })
    }

    pub fn with_order_cap(mut self, cap: usize) -> Self {
        self.order_cap = cap;
        self
    }

    pub fn with_clearance(mut self, spacings: Real) -> Self {
        self.clearance = spacings;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn order_cap(&self) -> usize {
        self.order_cap
    }

    /// `S^m(·, a)` and `L^m(·, a)`.
    pub fn solve(&self, a: Complex, m: usize) -> Result<KernelField> {
        Ok(self.solve_orders(a, m)?.pop().expect("at least one order"))
    }

    /// `S^m(·, a)`, `L^m(·, a)` for `m = 0..=max_order`, from one block solve.
    pub fn solve_orders(&self, a: Complex, max_order: usize) -> Result<Vec<KernelField>> {
        if max_order > self.order_cap {
            return Err(QdError::OrderCap {
                order: max_order,
                cap: self.order_cap,
            });
        }
        self.domain.check_clearance(a, self.clearance)?;
        let d = &self.domain;
        let n = d.len();
        let pre = Complex::new(0.0, 1.0 / (2.0 * PI));
        let rhs = DMatrix::from_fn(n, max_order + 1, |i, m| {
            let zi = d.points()[i];
            let ti = d.tangent_values()[i];
            pre * ti.conj() * factorial(m) / (zi - a).conj().powu(m as u32 + 1)
        });
        let sol = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| QdError::SingularSystem("Kerzman–Stein solve failed".into()))?;
        if sol.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(QdError::SingularSystem("non-finite Szegő kernel values".into()));
        }
        let t = d.tangent_values();
        Ok((0..=max_order)
            .map(|m| {
                let s: Vec<Complex> = sol.column(m).iter().copied().collect();
                let l: Vec<Complex> = s
                    .iter()
                    .zip(t)
                    .map(|(s, t)| Complex::new(0.0, 1.0) * s.conj() * t.conj())
                    .collect();
                KernelField {
                    base_point: a,
                    order: m,
                    szego: d.function(s),
                    garabedian: d.function(l),
                }
            })
            .collect())
    }
}

/// One-shot `S^m(·, a)` without keeping the factorization.
pub fn solve_szego(domain: &Domain, a: Complex, m: usize) -> Result<KernelField> {
    SzegoSolver::new(domain)?.solve(a, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::geometry::Curve;

    #[test]
    fn disc_kernel_at_origin_is_constant() {
        let d = Domain::disc(c64(0., 0.), 1.0, 256).unwrap();
        let k = solve_szego(&d, c64(0., 0.), 0).unwrap();
        for s in k.szego.values() {
            assert!((s - c64(1.0 / (2.0 * PI), 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn disc_kernel_closed_form() {
        let d = Domain::disc(c64(0., 0.), 1.0, 256).unwrap();
        let a = c64(0.3, 0.0);
        let k = solve_szego(&d, a, 0).unwrap();
        for (z, s) in d.points().iter().zip(k.szego.values()) {
            let exact = 1.0 / (2.0 * PI * (1.0 - z * a.conj()));
            assert!((s - exact).norm() < 1e-10);
        }
        // L(z, 0) = 1/(2πz) on the disc.
        let k0 = solve_szego(&d, c64(0., 0.), 0).unwrap();
        for (z, l) in d.points().iter().zip(k0.garabedian.values()) {
            assert!((l - 1.0 / (2.0 * PI * z)).norm() < 1e-10);
        }
    }

    fn annulus_oracle(z: Complex, a: Complex, rho: Real) -> Complex {
        let w = z * a.conj();
        (-200i32..=200)
            .map(|n| w.powi(n) / (1.0 + rho.powi(2 * n + 1)))
            .sum::<Complex>()
            / (2.0 * PI)
    }

    #[test]
    fn annulus_kernel_matches_laurent_series() {
        let rho = 0.4;
        let d = Domain::annulus(c64(0., 0.), rho, 1.0, 256).unwrap();
        let a = c64(0.65, 0.);
        let k = solve_szego(&d, a, 0).unwrap();
        let err = d
            .points()
            .iter()
            .zip(k.szego.values())
            .map(|(z, s)| (s - annulus_oracle(*z, a, rho)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "max error {err:.3e}");
        assert!(k.sl_residual(&d).unwrap() < 1e-12);
    }

    #[test]
    fn reproducing_property_on_ellipse_and_annulus() {
        use crate::kernels::hardy_inner;
        let c = c64(2.5, 0.5);
        let domains = [
            (
                Domain::new(vec![Curve::ellipse(c64(0., 0.), 1.5, 1.0, 256).unwrap()], vec![]).unwrap(),
                c64(0.3, -0.2),
            ),
            (Domain::annulus(c64(0., 0.), 0.4, 1.0, 256).unwrap(), c64(0.65, 0.1)),
        ];
        for (d, a) in &domains {
            let fields = SzegoSolver::new(d).unwrap().solve_orders(*a, 4).unwrap();
            for (m, k) in fields.iter().enumerate() {
                let mf = factorial(m);
                let h = d.trace(|z| 1.0 / (z - c));
                let exact = mf * (-1.0f64).powi(m as i32) / (*a - c).powu(m as u32 + 1);
                let got = hardy_inner(d, &h, &k.szego).unwrap();
                assert!((got - exact).norm() < 1e-8, "m={m}: {:.2e}", (got - exact).norm());
                let z3 = d.trace(|z| z.powu(3));
                let exact = match m {
                    0 => a.powu(3),
                    1 => 3.0 * a * a,
                    2 => 6.0 * a,
                    3 => c64(6., 0.),
                    _ => c64(0., 0.),
                };
                assert!((hardy_inner(d, &z3, &k.szego).unwrap() - exact).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn kernel_is_skew_hermitian() {
        let c = Curve::ellipse(c64(0., 0.), 2.0, 1.0, 64).unwrap();
        let (t, _) = c.tangent_frame();
        let z = c.samples();
        for i in 0..z.len() {
            for k in 0..z.len() {
                let a = kerzman_stein(z[i], t[i], z[k], t[k]);
                let b = kerzman_stein(z[k], t[k], z[i], t[i]);
                assert!((a + b.conj()).norm() <= 1e-15 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn diagonal_limit_is_zero() {
        let c = Curve::ellipse(c64(0.1, 0.), 2.0, 1.0, 64).unwrap();
        let t0 = 0.7;
        let z0 = c.eval(t0);
        let d0 = c.eval_derivative(t0, 1);
        let tz = d0 / d0.norm();
        for h in [1e-3, 1e-4, 1e-5] {
            let w = c.eval(t0 + h);
            let dw = c.eval_derivative(t0 + h, 1);
            let a = kerzman_stein(z0, tz, w, dw / dw.norm());
            assert!(a.norm() < 2.0 * h);
        }
    }

    #[test]
    fn order_cap_enforced() {
        let d = Domain::disc(c64(0., 0.), 1.0, 64).unwrap();
        let s = SzegoSolver::new(&d).unwrap();
        assert!(matches!(s.solve(c64(0., 0.), 13), Err(QdError::OrderCap { .. })));
        let s = s.with_order_cap(14);
        assert!(s.solve(c64(0., 0.), 13).is_ok());
    }

    #[test]
    fn base_point_near_boundary_rejected() {
        let d = Domain::disc(c64(0., 0.), 1.0, 64).unwrap();
        assert!(matches!(
            solve_szego(&d, c64(0.98, 0.), 0),
            Err(QdError::TooCloseToBoundary { .. })
        ));
        assert!(matches!(
            solve_szego(&d, c64(1.5, 0.), 0),
            Err(QdError::OutsideDomain { .. })
        ));
    }
}
