use std::f64::consts::PI;

use proptest::prelude::*;

use szego_qd::geometry::Curve;
use szego_qd::kernels::solve_szego;
use szego_qd::numerics::bell::{compose_jets, product_jets};
use szego_qd::verify::{
    area_moment, check_holdouts, default_holdouts, fit_quadrature, moment_defect, Measure, TestFunction,
};
use szego_qd::{c64, Complex, Domain};

fn complex(r: f64) -> impl Strategy<Value = Complex> {
    (-r..r, -r..r).prop_map(|(a, b)| c64(a, b))
}

fn jet(len: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec(complex(2.0), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_jets_commute(u in jet(6), v in jet(6)) {
        let a = product_jets(&u, &v);
        let b = product_jets(&v, &u);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() < 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn composing_with_the_identity_changes_nothing(u in jet(6), w in complex(1.0)) {
        let mut id = vec![c64(0., 0.); 6];
        id[0] = w;
        id[1] = c64(1., 0.);
        let a = compose_jets(&u, &id);
        for (x, y) in a.iter().zip(&u) {
            prop_assert!((x - y).norm() < 1e-12 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn test_function_jets_satisfy_their_differential_equations(
        w in complex(0.8), p in complex(1.0), power in 1u32..4, alpha in complex(2.0),
    ) {
        let pole = p + c64(3.0, 0.0);
        let h = TestFunction::pole(pole, power).jets(w, 4);
        for k in 0..4 {
            // (w − p) h^{(k+1)} = −(power + k) h^{(k)}
            let lhs = (w - pole) * h[k + 1];
            let rhs = -(power as f64 + k as f64) * h[k];
            prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
        let e = TestFunction::Exp { alpha }.jets(w, 4);
        for k in 0..4 {
            prop_assert!((e[k + 1] - alpha * e[k]).norm() < 1e-12 * (1.0 + e[k + 1].norm()));
        }
    }

    #[test]
    fn holdout_families_are_admissible(seed in any::<u64>(), a in 1.0f64..2.0, b in 0.5f64..1.0) {
        let d = Domain::new(vec![Curve::ellipse(c64(0.3, -0.2), a, b, 64).unwrap()], vec![]).unwrap();
        prop_assert!(check_holdouts(&d, &default_holdouts(&d, seed)).is_ok());
    }

    #[test]
    fn zeroth_moments_are_area_and_perimeter(a in 0.5f64..2.0, b in 0.5f64..2.0, c in complex(1.0)) {
        let d = Domain::new(vec![Curve::ellipse(c, a, b, 128).unwrap()], vec![]).unwrap();
        let one = d.trace(|_| c64(1., 0.));
        prop_assert!((area_moment(&d, &one).unwrap() - PI * a * b).norm() < 1e-10);
        prop_assert!((d.integrate_ds(&one).unwrap().re - d.perimeter()).abs() < 1e-12);
    }

    #[test]
    fn disc_mean_value_quadrature_for_any_disc(r in 0.2f64..3.0, c in complex(2.0)) {
        let d = Domain::disc(c, r, 128).unwrap();
        let area = fit_quadrature(&d, &[c], &[0], Measure::Area, None, None).unwrap();
        prop_assert!((area.coefficients[0][0] - PI * r * r).norm() < 1e-9 * r * r);
        let arc = fit_quadrature(&d, &[c], &[0], Measure::ArcLength, None, None).unwrap();
        prop_assert!((arc.coefficients[0][0] - 2.0 * PI * r).norm() < 1e-9 * r);
    }

    #[test]
    fn meromorphic_traces_have_no_defect(w in complex(0.5), c in complex(1.0), n in 0usize..3) {
        // u = c/(z − w)^{n+1} + z² extends with a pole of order n + 1 at w.
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        let u = d.trace(|z| c / (z - w).powu(n as u32 + 1) + z * z);
        prop_assert!(moment_defect(&d, &u, &[w], &[n], 6).unwrap() < 1e-9 * (1.0 + c.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn disc_szego_kernel_matches_the_closed_form(a in complex(0.45)) {
        let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
        let s = solve_szego(&d, a, 0).unwrap();
        let exact = d.trace(|z| 1.0 / (2.0 * PI * (1.0 - z * a.conj())));
        prop_assert!(s.szego.max_diff(&exact).unwrap() < 1e-10);
    }

    #[test]
    fn reproducing_property_on_ellipses(a in complex(0.3), k in 0u32..4, b in 0.7f64..1.0) {
        let d = Domain::new(vec![Curve::ellipse(c64(0., 0.), 1.0, b, 128).unwrap()], vec![]).unwrap();
        let s = solve_szego(&d, a, 0).unwrap();
        // ⟨h, S(·,a)⟩ = ∮ h conj(S) ds = h(a).
        let h = d.trace(|z| z.powu(k));
        let ip = d.integrate_ds(&h.zip_with(&s.szego, |x, y| x * y.conj()).unwrap()).unwrap();
        prop_assert!((ip - a.powu(k)).norm() < 1e-9);
    }
}
