//! Reference computations that share no code path with the production
//! integrators: polynomial roots by simultaneous iteration, plane integrals
//! by a polar partition of unity, and real-segment periods by adaptive
//! Simpson after a square-root substitution.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::periods::sqrt_p;
use crate::poly::Poly;
use crate::riemann::HyperellipticCurve;

/// All roots of a polynomial (ascending coefficients, nonzero leading term)
/// by Aberth iteration followed by Newton polishing.
pub fn polynomial_roots(p: &Poly) -> Vec<C64> {
    let Some(n) = p.degree() else {
        return Vec::new();
    };
    if n == 0 {
        return Vec::new();
    }
    let lead = p.coeff(n);
    let monic: Vec<C64> = (0..=n).map(|k| p.coeff(k) / lead).collect();
    let eval = |z: C64| -> (C64, C64) {
        let mut v = C64::new(0.0, 0.0);
        let mut d = C64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    };
    // Cauchy bound for the initial circle
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(0.5 * radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let ratio = v / d;
            let repulsion: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = eval(*r);
            if d.norm() > 0.0 {
                *r -= v / d;
            }
        }
    }
    z
}

/// Gauss–Legendre rule on [0, 1] computed by Newton's method on `P_n`.
fn legendre01(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (0.5 * (1.0 + x), 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub change: f64,
    pub level: usize,
}

const POU_POWER: i32 = 8;

/// `int F dA` over the plane. Each center carries the weight
/// `chi_k = |z - c_k|^-8 / sum_j |z - c_j|^-8` and its share is integrated
/// in polar coordinates about `c_k` with `r = L u / (1 - u)`: trapezoid in
/// the angle, composite Gauss–Legendre in `u`. Both resolutions are doubled
/// until successive levels agree to `rel_tol`.
pub fn plane_integral_polar<F>(density: F, centers: &[C64], rel_tol: f64) -> Result<OracleEstimate, String>
where
    F: Fn(C64) -> f64 + Sync,
{
    if centers.is_empty() {
        return Err("the polar oracle needs at least one center".into());
    }
    let spread = centers
        .iter()
        .flat_map(|a| centers.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    let len = spread.max(1.0);
    let gl = legendre01(16);

    let level_value = |level: usize| -> f64 {
        let n_theta = 64 << level;
        let panels = 4 << level;
        let shares: Vec<f64> = centers
            .iter()
            .enumerate()
            .map(|(k, &ck)| {
                let rows: Vec<f64> = (0..n_theta)
                    .into_par_iter()
                    .map(|m| {
                        let theta = 2.0 * PI * (m as f64 + 0.5) / n_theta as f64 + 0.123;
                        let dir = C64::from_polar(1.0, theta);
                        let mut row = 0.0;
                        for p in 0..panels {
                            for &(x, w) in &gl {
                                let u = (p as f64 + x) / panels as f64;
                                let r = len * u / (1.0 - u);
                                let drdu = len / ((1.0 - u) * (1.0 - u));
                                let z = ck + dir * r;
                                let mut denom = 0.0;
                                for (j, &cj) in centers.iter().enumerate() {
                                    denom += if j == k {
                                        1.0
                                    } else {
                                        (r / (z - cj).norm()).powi(POU_POWER)
                                    };
                                }
                                let chi = 1.0 / denom;
                                if chi == 0.0 || !chi.is_finite() {
                                    continue;
                                }
                                let val = density(z);
                                if !val.is_finite() {
                                    continue;
                                }
                                row += w / panels as f64 * chi * val * r * drdu;
                            }
                        }
                        row
                    })
                    .collect();
                rows.iter().sum::<f64>() * 2.0 * PI / n_theta as f64
            })
            .collect();
        shares.iter().sum()
    };

    let mut prev = level_value(0);
    for level in 1..=6 {
        let cur = level_value(level);
        let change = (cur - prev).abs();
        if change <= rel_tol * cur.abs() {
            return Ok(OracleEstimate {
                value: cur,
                change,
                level,
            });
        }
        prev = cur;
    }
    Err(format!("polar oracle did not reach {rel_tol:e}"))
}

fn adaptive_simpson<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> C64 {
    fn rec<F: Fn(f64) -> C64>(
        f: &F,
        a: f64,
        b: f64,
        fa: C64,
        fm: C64,
        fb: C64,
        whole: C64,
        tol: f64,
        depth: u32,
    ) -> C64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
        let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Period of `g dz / y` over the cycle on the real segment between branch
/// points `ia` and `ib`, with the starting-sheet convention
/// `y ~ sheet sqrt(f'(a)) sqrt(z - a)`.
pub fn real_segment_period(
    curve: &HyperellipticCurve,
    g: &Poly,
    ia: usize,
    ib: usize,
    sheet: i8,
    abs_tol: f64,
) -> Result<C64, String> {
    let pts = curve.branch_points();
    if pts.iter().any(|z| z.im != 0.0) {
        return Err("real-segment oracle needs real branch points".into());
    }
    let (a, b) = (pts[ia].re, pts[ib].re);
    let (lo, hi) = (a.min(b), a.max(b));
    let others: Vec<f64> = pts
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != ia && k != ib)
        .map(|(_, z)| z.re)
        .collect();
    if others.iter().any(|&e| e > lo && e < hi) {
        return Err("segment contains another branch point".into());
    }
    let rest = |x: f64| others.iter().map(|e| (x - e).abs()).product::<f64>();
    let mid = 0.5 * (lo + hi);
    let half = (mid - lo).sqrt();
    // x = lo + s^2 and x = hi - s^2 turn each endpoint factor into s
    let left = |s: f64| {
        let x = lo + s * s;
        g.eval(C64::new(x, 0.0)) * (2.0 / (rest(x) * (hi - x)).sqrt())
    };
    let right = |s: f64| {
        let x = hi - s * s;
        g.eval(C64::new(x, 0.0)) * (2.0 / (rest(x) * (x - lo)).sqrt())
    };
    let total = adaptive_simpson(&left, 0.0, half, abs_tol) + adaptive_simpson(&right, 0.0, half, abs_tol);

    let fp = curve.f_derivative_at_branch(ia);
    let phase = sqrt_p(fp) * sqrt_p(C64::new(b - a, 0.0)) * sheet as f64
        / (fp.norm() * (b - a).abs()).sqrt();
    let direction = if b > a { 1.0 } else { -1.0 };
    Ok(total * direction / phase * 2.0)
}
