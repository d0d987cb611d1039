mod common;

use common::{real_branch_points, rel, unit_disc};
use proptest::prelude::*;
use spectral_sk::acceptance::{symplectic_changes, transform_basis};
use spectral_sk::periods::*;
use spectral_sk::poly::Poly;
use spectral_sk::quad2d::k_direct_n1;
use spectral_sk::riemann::HyperellipticCurve;
use spectral_sk::C64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bilinear_identity(pts in real_branch_points(), d0 in unit_disc(), d1 in unit_disc()) {
        let c = HyperellipticCurve::from_real(&pts).unwrap();
        let g = Poly(vec![d0, d1]);
        prop_assume!(g.max_abs_coeff() > 0.05);
        let basis = HomologyBasis::standard_real(&c).unwrap();
        let kp = k_periods_n1(&c, &g, &basis).unwrap();
        let kd = k_direct_n1(&c, &g, 1e-8).unwrap().value;
        prop_assert!((kp - kd).abs() <= 1e-6 * (1.0 + kd));
    }

    #[test]
    fn tau_contracts(pts in real_branch_points()) {
        let c = HyperellipticCurve::from_real(&pts).unwrap();
        let pm = period_matrix(&c, &HomologyBasis::standard_real(&c).unwrap()).unwrap();
        prop_assert!(pm.symmetry_defect() <= TAU_SYMMETRY_TOL);
        prop_assert!(pm.im_tau_eigenvalues()[0] > 0.0);
    }

    #[test]
    fn symplectic_basis_independence(pts in real_branch_points(), d0 in unit_disc(), d1 in unit_disc()) {
        let c = HyperellipticCurve::from_real(&pts).unwrap();
        let g = Poly(vec![d0, d1]);
        let basis = HomologyBasis::standard_real(&c).unwrap();
        let k = k_periods_n1(&c, &g, &basis).unwrap();
        for m in symplectic_changes() {
            prop_assert!(m.is_symplectic());
            let km = k_periods_n1(&c, &g, &transform_basis(&basis, &m)).unwrap();
            prop_assert!((km - k).abs() <= 1e-10 * (1.0 + k.abs()));
        }
    }

    #[test]
    fn polyline_deformation_invariance(pts in real_branch_points(), bend in 0.1..0.4f64, up in any::<bool>()) {
        // bend the first A-segment into a detour above or below the real axis
        let c = HyperellipticCurve::from_real(&pts).unwrap();
        let (a, b) = (pts[0], pts[1]);
        let h = if up { bend } else { -bend } * (b - a);
        let mid = [C64::new(a + 0.3 * (b - a), h), C64::new(a + 0.7 * (b - a), h)];
        let g = Poly::from_real(&[0.4, 1.0]);
        let straight = hyperelliptic_period(&c, &g, &Cycle::straight(0, 1)).unwrap();
        let bent = hyperelliptic_period(&c, &g, &Cycle::polyline(0, 1, mid.to_vec())).unwrap();
        prop_assert!((bent - straight).norm() <= 1e-9 * straight.norm());
    }
}

#[test]
fn n1_potential_is_quadratic_in_the_form() {
    let c = HyperellipticCurve::from_real(&[-2.5, -1.1, 0.2, 0.9, 2.0, 3.7]).unwrap();
    let basis = HomologyBasis::standard_real(&c).unwrap();
    let g = Poly::from_real(&[1.0, 0.3]);
    let k = k_periods_n1(&c, &g, &basis).unwrap();
    let lam = C64::new(-1.2, 0.7);
    let kl = k_periods_n1(&c, &g.scale(lam), &basis).unwrap();
    assert!(rel(kl, lam.norm_sqr() * k) < 1e-12);
}
