mod common;

use common::{complex_branch_points, pm123, unit_disc};
use proptest::prelude::*;
use spectral_sk::poly::Poly;
use spectral_sk::riemann::*;
use spectral_sk::C64;

fn sl2(curve: &HyperellipticCurve, p: Poly) -> Result<StratumRecord, RiemannError> {
    classify_stratum(&SpectralFamily::sl2(curve.clone(), p)?)
}

#[test]
fn zn_identity_on_grid() {
    for n in 1..=6 {
        for g in 2..=8 {
            let (l, r) = zn_genus_identity(n, g).unwrap();
            assert_eq!(l, r, "n = {n}, g = {g}");
        }
    }
}

#[test]
fn b2_components_have_one_dimensional_cones() {
    let c = pm123();
    let pts = c.branch_points().to_vec();
    for i in 0..6 {
        for j in (i + 1)..6 {
            let rec = sl2(&c, Poly::from_roots(&[pts[i], pts[j]])).unwrap();
            assert_eq!(rec.kind, StratumKind::B2BranchPair);
            assert_eq!(rec.normalization_genus, Some(3));
            assert_eq!(3 - rec.codim_count, 1);
            assert_eq!(rec.component_label, Some(vec![i + 1, j + 1]));
        }
    }
}

#[test]
fn constant_numerator_is_involution_pair() {
    let rec = sl2(&pm123(), Poly::from_real(&[2.0])).unwrap();
    assert_eq!(rec.kind, StratumKind::B2InvolutionPair);
}

proptest! {
    #[test]
    fn strata_counts_do_not_depend_on_the_curve(pts in complex_branch_points()) {
        let c = HyperellipticCurve::new(pts).unwrap();
        let (b1, b2) = enumerate_strata(&c);
        prop_assert_eq!(b1.len(), 6);
        prop_assert_eq!(b2.len(), 15);
    }

    #[test]
    fn classification_is_conical(
        coeffs in prop::collection::vec(unit_disc(), 3),
        lam in unit_disc().prop_filter("nonzero", |z| z.norm() > 1e-3),
    ) {
        let c = pm123();
        let p = Poly(coeffs);
        if let Ok(rec) = sl2(&c, p.clone()) {
            let scaled = sl2(&c, p.scale(lam * 7.0)).unwrap();
            prop_assert_eq!(rec.kind, scaled.kind);
            prop_assert_eq!(rec.component_label, scaled.component_label);
        }
    }

    #[test]
    fn classification_is_stable_under_tiny_perturbations(
        i in 0usize..6,
        other in complex_in_annulus(),
        eps in prop::collection::vec(unit_disc(), 3),
    ) {
        let c = pm123();
        let p = Poly::from_roots(&[c.branch_points()[i], other]);
        let base = sl2(&c, p.clone()).unwrap();
        let size = p.max_abs_coeff();
        let q = Poly(p.0.iter().zip(&eps).map(|(a, e)| a + e * (1e-11 * size)).collect());
        let moved = sl2(&c, q).unwrap();
        prop_assert_eq!(base.kind, StratumKind::B1Node);
        prop_assert_eq!(moved.kind, base.kind);
    }
}

/// Points well away from the branch points `+-1, +-2, +-3`.
fn complex_in_annulus() -> impl Strategy<Value = C64> {
    (0.5..4.0f64, 0.3..2.8f64).prop_map(|(r, t)| C64::from_polar(r, t))
}
