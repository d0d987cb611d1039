//! Kähler potentials of spectral curves as plane integrals over the base.
//!
//! With `K = (i/4) int_S theta ^ conj(theta)` and `theta = x dz`, pulling back
//! to the base gives `K = 1/2 sum_sheets int |x|^2 dA`, the sum running over
//! the sheets of `S` above a point of the plane.
//!
//! * Rank one, `x = g/y`: two sheets of `y`, so `K = int |g|^2 / |f| dA`.
//! * Rank two, `x^2 + a1 x + a2 = 0` with `a1 = D dz / y` and `a2 = P dz^2 / f`:
//!   the roots are `x = (-a1 +- s)/2`, `s^2 = a1^2 - 4 a2`, and
//!   `|x+|^2 + |x-|^2 = (|a1|^2 + |s|^2)/2`. Summing over both sheets of `y`
//!   and halving gives `K = 1/2 int (|D|^2 + |D^2 - 4P|) / |f| dA`.
//! * Traceless rank two (`D = 0`): `K = 2 int |P| / |f| dA`.

use num_complex::Complex64 as C64;

use super::{integrate_plane, PlaneDensity, QuadError, QuadResult};
use crate::poly::Poly;
use crate::riemann::HyperellipticCurve;

/// Roots farther out than this multiple of the curve scale are treated as
/// lying at infinity.
const FAR_ROOT_REL: f64 = 1e6;

fn check_degree(p: &Poly, allowed: usize) -> Result<(), QuadError> {
    match p.degree() {
        Some(found) if found > allowed => Err(QuadError::SectionDegree { found, allowed }),
        _ => Ok(()),
    }
}

fn kink_points(curve: &HyperellipticCurve, p: &Poly) -> Vec<C64> {
    let limit = FAR_ROOT_REL * curve.scale();
    p.roots_upto_quadratic()
        .into_iter()
        .filter(|r| r.norm() <= limit && r.re.is_finite() && r.im.is_finite())
        .collect()
}

fn decay(deg_num: Option<usize>) -> i32 {
    match deg_num {
        Some(k) => 6 - k as i32,
        None => 6,
    }
}

fn abs_f(branch: &[C64], z: C64) -> f64 {
    branch.iter().map(|&b| (z - b).norm()).product()
}

/// The density `2 |P| / |f|`.
pub fn sl2_density(curve: &HyperellipticCurve, p: &Poly) -> Result<PlaneDensity, QuadError> {
    check_degree(p, 2)?;
    let branch = curve.branch_points().to_vec();
    let kinks = kink_points(curve, p);
    let num = p.clone();
    Ok(PlaneDensity::new(
        move |z| 2.0 * num.eval(z).norm() / abs_f(&branch, z),
        decay(p.degree()),
    )
    .with_points(curve.branch_points(), -1)
    .with_points(&kinks, 1))
}

/// The density `(|D|^2 + |D^2 - 4P|) / (2 |f|)`.
pub fn gl2_density(
    curve: &HyperellipticCurve,
    d: &Poly,
    p: &Poly,
) -> Result<PlaneDensity, QuadError> {
    check_degree(d, 1)?;
    check_degree(p, 2)?;
    let disc = d * d - p.scale(C64::new(4.0, 0.0));
    let branch = curve.branch_points().to_vec();
    let kinks = kink_points(curve, &disc);
    let (dd, dn) = (d.clone(), disc.clone());
    let deg_num = [d.degree().map(|k| 2 * k), disc.degree()]
        .into_iter()
        .flatten()
        .max();
    Ok(PlaneDensity::new(
        move |z| 0.5 * (dd.eval(z).norm_sqr() + dn.eval(z).norm()) / abs_f(&branch, z),
        decay(deg_num),
    )
    .with_points(curve.branch_points(), -1)
    .with_points(&kinks, 1))
}

/// The density `|g|^2 / |f|`.
pub fn n1_density(curve: &HyperellipticCurve, g: &Poly) -> Result<PlaneDensity, QuadError> {
    check_degree(g, 1)?;
    let branch = curve.branch_points().to_vec();
    let num = g.clone();
    Ok(PlaneDensity::new(
        move |z| num.eval(z).norm_sqr() / abs_f(&branch, z),
        decay(g.degree().map(|k| 2 * k)),
    )
    .with_points(curve.branch_points(), -1))
}

pub fn k_direct_sl2(curve: &HyperellipticCurve, p: &Poly, tol: f64) -> Result<QuadResult, QuadError> {
    integrate_plane(&sl2_density(curve, p)?, tol)
}

pub fn k_direct_gl2(
    curve: &HyperellipticCurve,
    d: &Poly,
    p: &Poly,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    integrate_plane(&gl2_density(curve, d, p)?, tol)
}

pub fn k_direct_n1(curve: &HyperellipticCurve, g: &Poly, tol: f64) -> Result<QuadResult, QuadError> {
    integrate_plane(&n1_density(curve, g)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm123() -> HyperellipticCurve {
        HyperellipticCurve::from_real(&[1.0, 2.0, 3.0, -1.0, -2.0, -3.0]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn zero_sections_give_zero() {
        let c = pm123();
        assert_eq!(k_direct_sl2(&c, &Poly::zero(), 1e-7).unwrap().value, 0.0);
        assert_eq!(k_direct_n1(&c, &Poly::zero(), 1e-7).unwrap().value, 0.0);
        assert_eq!(
            k_direct_gl2(&c, &Poly::zero(), &Poly::zero(), 1e-7).unwrap().value,
            0.0
        );
    }

    #[test]
    fn degree_limits() {
        let c = pm123();
        let cubic = Poly::from_real(&[0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            k_direct_sl2(&c, &cubic, 1e-6),
            Err(QuadError::SectionDegree { found: 3, allowed: 2 })
        ));
        assert!(k_direct_n1(&c, &Poly::from_real(&[0.0, 0.0, 1.0]), 1e-6).is_err());
    }

    #[test]
    fn sl2_absolute_homogeneity() {
        let c = pm123();
        let p = Poly::from_real(&[2.0, -3.0, 1.0]);
        let a = C64::new(-0.6, 1.7);
        let k1 = k_direct_sl2(&c, &p, 1e-10).unwrap().value;
        let ka = k_direct_sl2(&c, &p.scale(a), 1e-10).unwrap().value;
        assert!(rel(ka, a.norm() * k1) < 1e-8);
    }

    #[test]
    fn n1_quadratic_homogeneity() {
        let c = pm123();
        let g = Poly::from_real(&[1.0, 0.5]);
        let lam = C64::new(0.3, -2.0);
        let k1 = k_direct_n1(&c, &g, 1e-10).unwrap().value;
        let kl = k_direct_n1(&c, &g.scale(lam), 1e-10).unwrap().value;
        assert!(rel(kl, lam.norm_sqr() * k1) < 1e-8);
    }

    #[test]
    fn gl2_traceless_reduces_to_sl2() {
        let c = pm123();
        let p = Poly(vec![C64::new(0.5, 1.0), C64::new(-1.0, 0.2), C64::new(1.0, 0.0)]);
        let k_gl = k_direct_gl2(&c, &Poly::zero(), &p, 1e-9).unwrap().value;
        let k_sl = k_direct_sl2(&c, &p, 1e-9).unwrap().value;
        assert!(rel(k_gl, k_sl) < 1e-8);
    }

    #[test]
    fn gl2_with_vanishing_a2_matches_rank_one() {
        // 1/2 (|D|^2 + |D^2|) / |f| = |D|^2 / |f|
        let c = pm123();
        let d = Poly(vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.0)]);
        let k_gl = k_direct_gl2(&c, &d, &Poly::zero(), 1e-9).unwrap().value;
        let k_n1 = k_direct_n1(&c, &d, 1e-9).unwrap().value;
        assert!(rel(k_gl, k_n1) < 1e-8);
    }

    #[test]
    fn sl2_scaling_law() {
        // f -> prod(z - mu z_i) = mu^6 f(z/mu), P -> P(z/mu): K scales by |mu|^{2-6}
        let c = pm123();
        let p = Poly::from_real(&[2.0, -3.0, 1.0]);
        let mu = C64::new(0.8, 0.6) * 1.5;
        let k = k_direct_sl2(&c, &p, 1e-10).unwrap().value;
        let ks = k_direct_sl2(&c.scaled(mu).unwrap(), &p.compose_scale(mu), 1e-10)
            .unwrap()
            .value;
        assert!(rel(ks, k * mu.norm().powi(-4)) < 1e-8);
    }
}
