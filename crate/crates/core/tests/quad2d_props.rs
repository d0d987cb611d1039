mod common;

use common::{complex_branch_points, pm123, rel, unit_disc};
use proptest::prelude::*;
use spectral_sk::poly::Poly;
use spectral_sk::quad2d::*;
use spectral_sk::riemann::HyperellipticCurve;
use spectral_sk::C64;

#[test]
fn halving_tolerance_stays_within_coarse_estimate() {
    let c = pm123();
    let p = Poly::from_real(&[5.0, 0.0, 1.0]);
    let mut prev = k_direct_sl2(&c, &p, 1e-5).unwrap();
    for tol in [5e-6, 2.5e-6, 1.25e-6] {
        let cur = k_direct_sl2(&c, &p, tol).unwrap();
        assert!((cur.value - prev.value).abs() <= prev.abs_error_estimate.max(tol * prev.value));
        prev = cur;
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let c = pm123();
    let p = Poly(vec![C64::new(0.3, -1.0), C64::new(1.0, 0.5), C64::new(0.7, 0.0)]);
    let a = k_direct_sl2(&c, &p, 1e-8).unwrap();
    let b = k_direct_sl2(&c, &p, 1e-8).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.cells_evaluated, b.cells_evaluated);
}

#[test]
fn budget_exhaustion_is_distinct() {
    let c = pm123();
    let d = sl2_density(&c, &Poly::from_real(&[5.0, 0.0, 1.0])).unwrap();
    let cfg = QuadConfig {
        tol: 1e-10,
        max_cells: 20,
    };
    assert!(matches!(integrate_plane_with(&d, &cfg), Err(QuadError::BudgetExhausted { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn translation_covariance(pts in complex_branch_points(), shift in unit_disc()) {
        let c = HyperellipticCurve::new(pts).unwrap();
        let g = Poly::from_real(&[1.0, -0.5]);
        let k = k_direct_n1(&c, &g, 1e-8).unwrap().value;
        let moved = c.translated(shift * 2.0).unwrap();
        // g(z) becomes g(z - shift)
        let g2 = Poly(vec![g.coeff(0) - g.coeff(1) * shift * 2.0, g.coeff(1)]);
        let km = k_direct_n1(&moved, &g2, 1e-8).unwrap().value;
        prop_assert!(rel(km, k) <= 1e-7);
    }

    #[test]
    fn relabelling_branch_points(pts in complex_branch_points(), perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let c = HyperellipticCurve::new(pts.clone()).unwrap();
        let shuffled = HyperellipticCurve::new(perm.iter().map(|&i| pts[i]).collect()).unwrap();
        let p = Poly(vec![C64::new(1.0, 0.2), C64::new(-0.3, 0.0), C64::new(0.5, 0.5)]);
        let a = k_direct_sl2(&c, &p, 1e-8).unwrap().value;
        let b = k_direct_sl2(&shuffled, &p, 1e-8).unwrap().value;
        prop_assert!(rel(a, b) <= 1e-7);
    }

    #[test]
    fn sl2_is_absolutely_homogeneous(
        coeffs in prop::collection::vec(unit_disc(), 3),
        a in unit_disc().prop_filter("nonzero", |z| z.norm() > 0.1),
    ) {
        let c = pm123();
        let p = Poly(coeffs);
        prop_assume!(p.max_abs_coeff() > 0.1);
        let k = k_direct_sl2(&c, &p, 1e-9).unwrap().value;
        let ka = k_direct_sl2(&c, &p.scale(a), 1e-9).unwrap().value;
        prop_assert!(rel(ka, a.norm() * k) <= 1e-8);
    }

    #[test]
    fn sl2_scaling_law(mu in unit_disc().prop_filter("not small", |z| z.norm() > 0.3)) {
        // z -> mu z with P -> P(z / mu): density picks up |mu|^-6, area |mu|^2
        let c = pm123();
        let p = Poly::from_real(&[5.0, 0.0, 1.0]);
        let k = k_direct_sl2(&c, &p, 1e-9).unwrap().value;
        let ks = k_direct_sl2(&c.scaled(mu * 2.0).unwrap(), &p.compose_scale(mu * 2.0), 1e-9).unwrap().value;
        prop_assert!(rel(ks, k * (mu * 2.0).norm().powi(-4)) <= 1e-7);
    }
}
