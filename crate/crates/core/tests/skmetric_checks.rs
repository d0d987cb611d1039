mod common;

use common::{pm123, rel};
use spectral_sk::poly::Poly;
use spectral_sk::skmetric::*;
use spectral_sk::C64;

#[test]
fn rank_one_metric_is_a_constant_gram_matrix() {
    let c = pm123();
    let k = PotentialEvaluator::direct_n1(&c, 1e-10);
    let points = [
        [C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(-0.5, 0.0)],
        [C64::new(0.3, 2.0), C64::new(1.0, 0.0)],
    ];
    let base = metric_hessian(&k, &points[0], default_step(&points[0])).unwrap();
    for p in &points[1..] {
        let h = metric_hessian(&k, p, default_step(p)).unwrap();
        for j in 0..2 {
            for l in 0..2 {
                assert!((h.get(j, l) - base.get(j, l)).norm() <= 1e-5 * base.max_abs());
            }
        }
    }
}

#[test]
fn rank_one_metric_matches_the_period_route() {
    let c = pm123();
    let direct = PotentialEvaluator::direct_n1(&c, 1e-10);
    let periods = PotentialEvaluator::periods_n1(&c).unwrap();
    let p = [C64::new(0.5, 0.5), C64::new(-1.0, 0.0)];
    let a = metric_hessian(&direct, &p, default_step(&p)).unwrap();
    let b = metric_hessian(&periods, &p, default_step(&p)).unwrap();
    for j in 0..2 {
        for l in 0..2 {
            assert!((a.get(j, l) - b.get(j, l)).norm() <= 1e-5 * a.max_abs());
        }
    }
}

#[test]
fn b2_constant_matches_the_golden_store() {
    let store = spectral_sk::golden::GoldenStore::load(&spectral_sk::golden::GoldenStore::default_path()).unwrap();
    let want = store.get("quad2d.sl2.pm123.p=(z-1)(z-2)").unwrap().value.re;
    let rep = b2_flatness_check(&pm123(), (1, 2), &[C64::new(1.0, 0.0), C64::new(4.0, 0.0), C64::new(0.0, 2.0)], 1e-8).unwrap();
    assert!(rep.passed, "{:?}", rep.checks);
    assert!(rel(rep.c, want) <= 1e-7);
    assert!(rel(rep.samples[1].k / rep.samples[0].k, 4.0) <= 1e-8);
}

#[test]
fn b2_check_rejects_non_component_input() {
    assert!(b2_flatness_check(&pm123(), (1, 1), &[C64::new(1.0, 0.0)], 1e-6).is_err());
    assert!(b2_flatness_check(&pm123(), (1, 2), &[C64::new(0.0, 0.0)], 1e-6).is_err());
}

#[test]
fn constant_path_has_zero_differences() {
    let c = pm123();
    let p0 = Poly::from_real(&[5.0, -6.0, 1.0]);
    let path = ApproachPath::Linear { direction: Poly::zero() };
    // the constant path never leaves B1, which the check rejects
    assert!(matches!(
        stratum_continuity_check(&c, &p0, &path, &[1e-1, 1e-2], 1e-7),
        Err(SkError::WrongStratum { .. })
    ));
    assert_eq!(path.at(&p0, 0.5).unwrap(), p0);
}

#[test]
fn translation_by_zero_is_bit_identical() {
    let c = pm123();
    let rep = translation_invariance_check(&c, &Poly::zero(), &Poly::from_real(&[5.0, 0.0, 1.0]), &Poly::zero(), None, 1e-7).unwrap();
    assert!(rep.bit_identical);
    assert!(rep.passed, "{:?}", rep.checks);
}
