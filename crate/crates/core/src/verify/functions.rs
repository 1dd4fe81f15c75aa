use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::Domain;
use crate::{Complex, QdError, Real, Result};

/// Holomorphic test functions with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `((w − center) / scale)^power`.
    Power { center: Complex, scale: Real, power: u32 },
    /// `coeff / (w − pole)^power`.
    Pole { pole: Complex, power: u32, coeff: Complex },
    /// `exp(alpha·w)`.
    Exp { alpha: Complex },
}

impl TestFunction {
    pub fn power(center: Complex, scale: Real, power: u32) -> Self {
        TestFunction::Power { center, scale, power }
    }

    pub fn pole(pole: Complex, power: u32) -> Self {
        TestFunction::Pole {
            pole,
            power,
            coeff: Complex::new(1.0, 0.0),
        }
    }

    pub fn value(&self, w: Complex) -> Complex {
        match *self {
            TestFunction::Power { center, scale, power } => ((w - center) / scale).powu(power),
            TestFunction::Pole { pole, power, coeff } => coeff / (w - pole).powu(power),
            TestFunction::Exp { alpha } => (alpha * w).exp(),
        }
    }

    /// `h(w), h'(w), …, h^{(n)}(w)`.
    pub fn jets(&self, w: Complex, n: usize) -> Vec<Complex> {
        match *self {
            TestFunction::Power { center, scale, power } => {
                let x = (w - center) / scale;
                let k = power as usize;
                let mut out = Vec::with_capacity(n + 1);
                let mut falling = 1.0;
                for j in 0..=n {
                    if j > k {
                        out.push(Complex::new(0.0, 0.0));
                        continue;
                    }
                    out.push(x.powu((k - j) as u32) * falling / scale.powi(j as i32));
                    falling *= (k - j) as Real;
                }
                out
            }
            TestFunction::Pole { pole, power, coeff } => {
                let d = w - pole;
                let mut out = Vec::with_capacity(n + 1);
                let mut rising = 1.0;
                for j in 0..=n {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    out.push(coeff * sign * rising / d.powu(power + j as u32));
                    rising *= (power as usize + j) as Real;
                }
                out
            }
            TestFunction::Exp { alpha } => {
                let e = (alpha * w).exp();
                let mut out = Vec::with_capacity(n + 1);
                let mut a = Complex::new(1.0, 0.0);
                for _ in 0..=n {
                    out.push(a * e);
                    a *= alpha;
                }
                out
            }
        }
    }

    /// Short human-readable form.
    pub fn label(&self) -> String {
        match *self {
            TestFunction::Power { center, scale, power } => format!("((w-({center}))/{scale:.4})^{power}"),
            TestFunction::Pole { pole, power, coeff } => format!("({coeff})/(w-({pole}))^{power}"),
            TestFunction::Exp { alpha } => format!("exp(({alpha})w)"),
        }
    }

    /// Pole location, if any.
    pub fn singularity(&self) -> Option<Complex> {
        match *self {
            TestFunction::Pole { pole, .. } => Some(pole),
            _ => None,
        }
    }
}

/// Poles closer to the boundary than this fraction of the diameter are
/// rejected: the boundary rule would not resolve them.
pub const MIN_POLE_DISTANCE: Real = 0.5;

/// Reject test functions whose poles lie in the closed domain or near its
/// boundary.
pub fn check_holdouts(domain: &Domain, hs: &[TestFunction]) -> Result<()> {
    let limit = MIN_POLE_DISTANCE * domain.diameter();
    for h in hs {
        if let Some(p) = h.singularity() {
            let d = domain
                .points()
                .iter()
                .map(|z| (z - p).norm())
                .fold(f64::INFINITY, f64::min);
            if domain.contains(p) || d < limit {
                return Err(QdError::HoldoutRejected(format!(
                    "{} has a pole at distance {d:.3e} from the boundary (need {limit:.3e}, outside the domain)",
                    h.label()
                )));
            }
        }
    }
    Ok(())
}

/// Number of random rational holdouts in the default family.
pub const HOLDOUT_COUNT: usize = 20;

/// Default holdout family: random simple and double poles two to four
/// diameters outside the domain, scaled to unit size on it, and one
/// exponential `exp(αw)` with `|α|` the inverse radius.
pub fn default_holdouts(domain: &Domain, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = domain.centroid();
    let (r, diam) = (domain.radius(), domain.diameter());
    let mut out = Vec::with_capacity(HOLDOUT_COUNT + 1);
    for _ in 0..HOLDOUT_COUNT {
        let dist = r + diam * rng.random_range(2.0..4.0);
        let pole = c + Complex::from_polar(dist, rng.random_range(0.0..2.0 * PI));
        let power = rng.random_range(1..=2u32);
        let coeff = Complex::from_polar(dist.powi(power as i32), rng.random_range(0.0..2.0 * PI));
        out.push(TestFunction::Pole { pole, power, coeff });
    }
    let alpha = Complex::from_polar(1.0 / r, rng.random_range(0.0..2.0 * PI));
    out.push(TestFunction::Exp { alpha });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn finite_difference(h: &TestFunction, w: Complex, k: usize) -> Complex {
        // Cauchy integral on a small circle.
        let m = 64;
        let r = 0.05;
        let mut acc = Complex::new(0.0, 0.0);
        for j in 0..m {
            let e = Complex::from_polar(1.0, 2.0 * PI * j as Real / m as Real);
            acc += h.value(w + e * r) / (e * r).powu(k as u32);
        }
        acc / m as Real * (1..=k).product::<usize>() as Real
    }

    #[test]
    fn jets_match_cauchy_derivatives() {
        let w = c64(0.3, -0.2);
        let fs = [
            TestFunction::power(c64(0.1, 0.1), 0.7, 5),
            TestFunction::Pole {
                pole: c64(3.0, 1.0),
                power: 2,
                coeff: c64(0.5, 2.0),
            },
            TestFunction::Exp { alpha: c64(0.4, -1.1) },
        ];
        for h in &fs {
            let jets = h.jets(w, 4);
            for (k, j) in jets.iter().enumerate() {
                assert!(
                    (j - finite_difference(h, w, k)).norm() < 1e-8 * (1.0 + j.norm()),
                    "{} order {k}",
                    h.label()
                );
            }
        }
    }

    #[test]
    fn default_family_is_reproducible_and_far() {
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        let a = default_holdouts(&d, 7);
        assert_eq!(a, default_holdouts(&d, 7));
        assert_ne!(a, default_holdouts(&d, 8));
        assert_eq!(a.len(), HOLDOUT_COUNT + 1);
        check_holdouts(&d, &a).unwrap();
        for h in &a {
            if let Some(p) = h.singularity() {
                assert!(p.norm() >= 1.0 + 2.0 * 2.0 - 1e-12);
            }
        }
    }

    #[test]
    fn near_poles_are_rejected() {
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        assert!(check_holdouts(&d, &[TestFunction::pole(c64(1.5, 0.), 1)]).is_err());
        assert!(check_holdouts(&d, &[TestFunction::pole(c64(0.2, 0.), 1)]).is_err());
        check_holdouts(&d, &[TestFunction::pole(c64(3.0, 0.), 1)]).unwrap();
    }
}
