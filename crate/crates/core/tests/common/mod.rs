#![allow(dead_code)]

use proptest::prelude::*;
use spectral_sk::riemann::HyperellipticCurve;
use spectral_sk::C64;

pub fn pm123() -> HyperellipticCurve {
    spectral_sk::golden::pm123()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// A point of the closed unit disc.
pub fn unit_disc() -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r.sqrt(), t))
}

pub fn complex_in(radius: f64) -> impl Strategy<Value = C64> {
    unit_disc().prop_map(move |z| z * radius)
}

/// Six real branch points with gaps of at least 0.2, increasing.
pub fn real_branch_points() -> impl Strategy<Value = Vec<f64>> {
    (-3.0..0.0f64, prop::collection::vec(0.2..1.5f64, 5)).prop_map(|(start, gaps)| {
        let mut pts = vec![start];
        for g in gaps {
            pts.push(pts.last().unwrap() + g);
        }
        pts
    })
}

/// Six complex branch points, pairwise at least 0.3 apart.
pub fn complex_branch_points() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex_in(3.0), 6).prop_filter("separated points", |pts| {
        (0..6).all(|i| ((i + 1)..6).all(|j| (pts[i] - pts[j]).norm() > 0.3))
    })
}
