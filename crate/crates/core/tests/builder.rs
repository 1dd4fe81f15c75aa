use std::f64::consts::PI;

use szego_qd::builder::{
    build, build_double, build_mc_arclength, build_sc, rational_basis, rational_tables, BuildMode, BuildOptions,
};
use szego_qd::geometry::Curve;
use szego_qd::verify::{extract_quadrature_sc, moment, Measure, TestFunction};
use szego_qd::{c64, Complex, ConformalMap, Domain, QdError, SpanBasis, SzegoSolver};

fn ellipse(n: usize) -> Domain {
    Domain::new(vec![Curve::ellipse(c64(0., 0.), 1.2, 1.0, n).unwrap()], vec![]).unwrap()
}

fn annulus() -> Domain {
    Domain::annulus(c64(0., 0.), 0.4, 1.0, 256).unwrap()
}

fn check_identities(map: &ConformalMap) {
    let image = map.image_domain().unwrap();
    let us: [fn(Complex) -> Complex; 3] = [|_| c64(1., 0.), |w| w, |w| w * w];
    for u in us {
        let r = map.change_of_variables_residual(&image, u).unwrap();
        assert!(r < 1e-8, "change of variables {r:e}");
        for v in us {
            let r = map.adjoint_residual(&image, u, v).unwrap();
            assert!(r < 1e-7, "adjoint {r:e}");
        }
    }
    assert!(
        map.derivative_consistency() < 1e-7,
        "{:e}",
        map.derivative_consistency()
    );
}

#[test]
fn disc_gives_the_identity() {
    let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
    let map = build_sc(&d, c64(0., 0.), &BuildOptions::default()).unwrap();
    assert_eq!(map.order, 0);
    assert!(map.identity_distance < 1e-12);
    assert!(map.certificate.passed);
    let image = map.image_domain().unwrap();
    assert!(image
        .points()
        .iter()
        .zip(d.points())
        .all(|(a, b)| (a - b).norm() < 1e-12));
    let qd = extract_quadrature_sc(&map).unwrap();
    assert!((qd.coefficients[0][0] - 2.0 * PI).norm() < 1e-10);
}

#[test]
fn double_build_on_the_disc_is_the_simply_connected_build() {
    let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
    let a = build_double(&d, c64(0.1, 0.), &BuildOptions::default()).unwrap();
    let b = build_sc(&d, c64(0.1, 0.), &BuildOptions::default()).unwrap();
    assert_eq!(a.mode, BuildMode::SimplyConnected);
    assert_eq!(a.f_boundary.values(), b.f_boundary.values());
}

#[test]
fn closed_form_map_from_a_linear_sigma() {
    // σ = 1 + 0.1z gives f = z + 0.1z² + (0.01/3)z³.
    let d = Domain::disc(c64(0., 0.), 1.0, 128).unwrap();
    let basis = SpanBasis::new(&SzegoSolver::new(&d).unwrap(), &[(c64(0., 0.), 1)], None).unwrap();
    let (sigma, rep) = basis.fit(&d.trace(|z| 1.0 + 0.1 * z), None, None).unwrap();
    assert!(rep.boundary_residual < 1e-12);
    let map = ConformalMap::from_element(sigma, c64(0., 0.), None, 1e-9).unwrap();
    let exact = d.trace(|z| z + 0.1 * z * z + 0.01 / 3.0 * z * z * z);
    assert!(map.f_boundary.max_diff(&exact).unwrap() < 1e-10);
    assert!(map.certificate.passed);
    let image = map.image_domain().unwrap();
    let qd = extract_quadrature_sc(&map).unwrap();
    assert_eq!(qd.orders, vec![1]);
    let one = TestFunction::power(c64(0., 0.), 1.0, 0);
    let direct = moment(&image, &one, Measure::ArcLength).unwrap();
    assert!((qd.functional(&one) - direct).norm() < 1e-9);
    assert!((direct.re - 2.0 * PI * 1.01).abs() < 1e-9);
    check_identities(&map);
}

#[test]
fn identity_distance_shrinks_with_the_fit_target() {
    let d = ellipse(128);
    let mut last = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4] {
        let map = build_sc(
            &d,
            c64(0., 0.),
            &BuildOptions {
                eps,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(map.certificate.passed);
        assert!(
            map.identity_distance <= 1.1 * last,
            "eps {eps}: {} after {last}",
            map.identity_distance
        );
        last = map.identity_distance;
        check_identities(&map);
    }
    assert!(last < 1e-3);
}

#[test]
fn fixed_order_above_the_cap_is_rejected() {
    let d = ellipse(64);
    let e = build_sc(
        &d,
        c64(0., 0.),
        &BuildOptions {
            order: Some(60),
            ..Default::default()
        },
    );
    assert!(matches!(e, Err(QdError::OrderCap { .. })));
}

#[test]
fn rational_basis_tables_on_the_annulus() {
    let d = annulus();
    let traces = rational_basis(&d).unwrap();
    let (table, products) = rational_tables(&d, &traces).unwrap();
    assert!((table[0][0] - 1.0).norm() < 1e-10);
    assert!(products < 1e-10);
}

#[test]
fn annulus_arc_length_build() {
    let d = annulus();
    let map = build_mc_arclength(&d, c64(0.65, 0.1), &BuildOptions::default()).unwrap();
    assert_eq!(map.mode, BuildMode::ArcLength);
    assert!(map.period_residual() < 1e-9);
    assert!(map.certificate.passed);
    assert!(map.area_layout().is_none());
    let image = map.image_domain().unwrap();
    assert_eq!(image.connectivity(), 2);
    assert!((image.perimeter() / d.perimeter() - 1.0).abs() < 1e-2);
    check_identities(&map);
}

#[test]
fn annulus_double_build() {
    let d = annulus();
    let map = build(&d, c64(0.65, 0.1), BuildMode::Double, &BuildOptions::default()).unwrap();
    assert!(map.periods.len() >= 2);
    assert!(map.period_residual() < 1e-9);
    assert!(map.certificate.passed);
    let diag = map.double.as_ref().unwrap();
    assert!(diag.residue.norm() < 1e-9);
    assert!(map.solve.as_ref().unwrap().converged);
    check_identities(&map);
}
