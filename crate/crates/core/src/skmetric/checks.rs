//! Flatness on `B2` components, invariance under translation, and
//! continuity of the potential across `B1`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    default_step, gauss_curvature_1d, metric_hessian, HermitianMatrix, PotentialEvaluator,
    SkError,
};
use crate::poly::Poly;
use crate::quad2d::k_direct_sl2;
use crate::riemann::{classify_numerator, HyperellipticCurve, StratumKind, STRATUM_TOL_REL};
use crate::symalg::{translate_coeffs, CharPoly};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            passed: value <= bound,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            passed: value >= bound,
        }
    }
}

fn expect_kind(
    curve: &HyperellipticCurve,
    p: &Poly,
    expected: StratumKind,
) -> Result<crate::riemann::StratumRecord, SkError> {
    let rec = classify_numerator(curve, p, STRATUM_TOL_REL)?;
    if rec.kind != expected {
        return Err(SkError::WrongStratum {
            expected: expected.to_string(),
            found: rec.kind,
        });
    }
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B2Sample {
    pub a: C64,
    pub k: f64,
    pub homogeneity_rel: f64,
    /// `d^2 K / dw d conj(w)` with `a = w^2`.
    pub hessian_w: f64,
    pub hessian_w_rel: f64,
    pub curvature: f64,
    pub curvature_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B2Report {
    pub pair: (usize, usize),
    pub tol: f64,
    pub c: f64,
    pub samples: Vec<B2Sample>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// On the component `P = a (z - z_i)(z - z_j)` the potential is `c |a|`, the
/// metric in `w = sqrt(a)` is the constant `c` and the curvature vanishes.
/// `pair` holds 1-based branch-point labels.
pub fn b2_flatness_check(
    curve: &HyperellipticCurve,
    pair: (usize, usize),
    samples: &[C64],
    tol: f64,
) -> Result<B2Report, SkError> {
    let (i, j) = pair;
    let n = curve.branch_points().len();
    if i == j || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(SkError::Input(format!("invalid branch pair {pair:?}")));
    }
    if samples.iter().any(|a| a.norm() == 0.0) {
        return Err(SkError::Input("samples must avoid a = 0".into()));
    }
    let pts = curve.branch_points();
    let base = Poly::from_roots(&[pts[i - 1], pts[j - 1]]);
    let rec = expect_kind(curve, &base, StratumKind::B2BranchPair)?;
    let mut want = vec![i.min(j), i.max(j)];
    want.sort();
    if rec.component_label.as_deref() != Some(want.as_slice()) {
        return Err(SkError::Input(format!(
            "classifier labelled {:?}, expected {want:?}",
            rec.component_label
        )));
    }

    let c = k_direct_sl2(curve, &base, tol)?.value;
    let k_a = {
        let curve = curve.clone();
        let base = base.clone();
        PotentialEvaluator::new(1, super::Provenance::DirectSl2, move |a| {
            let r = k_direct_sl2(&curve, &base.scale(a[0]), tol)?;
            Ok(super::Evaluation {
                value: r.value,
                error: r.abs_error_estimate,
            })
        })
    };
    let k_w = k_a.reparametrized(1, |w| vec![w[0] * w[0]]);

    let rows: Vec<B2Sample> = samples
        .par_iter()
        .map(|&a| {
            let k = k_a.eval(&[a])?.value;
            let w = a.sqrt();
            let hw = metric_hessian(&k_w, &[w], default_step(&[w]))?.get(0, 0).re;
            let curv = gauss_curvature_1d(&k_a, a, default_step(&[a]))?;
            Ok(B2Sample {
                a,
                k,
                homogeneity_rel: (k - c * a.norm()).abs() / (c * a.norm()),
                hessian_w: hw,
                hessian_w_rel: (hw - c).abs() / c,
                curvature: curv.curvature,
                curvature_error: curv.error,
            })
        })
        .collect::<Result<_, SkError>>()?;

    let worst = |f: fn(&B2Sample) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let checks = vec![
        Check::at_most("K(a) = c|a|", worst(|s| s.homogeneity_rel), 1e-8),
        Check::at_most("Hessian in w constant", worst(|s| s.hessian_w_rel), 1e-3),
        Check::at_most("Gaussian curvature", worst(|s| s.curvature.abs()), 1e-3),
    ];
    Ok(B2Report {
        pair,
        tol,
        c,
        samples: rows,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub d: Poly,
    pub p: Poly,
    pub alpha: Poly,
    pub d_translated: Poly,
    pub p_translated: Poly,
    pub k_base: f64,
    pub k_translated: f64,
    pub hessian_base: HermitianMatrix,
    pub hessian_translated: HermitianMatrix,
    /// Max entry difference relative to the largest base entry.
    pub hessian_rel_diff: f64,
    pub pointwise_translate_residual: f64,
    pub bit_identical: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// `(a1, a2) -> (a1 - 2 alpha, a2 - a1 alpha + alpha^2)` on numerators.
pub fn translate_sections(d: &Poly, p: &Poly, alpha: &Poly) -> (Poly, Poly) {
    let d2 = d - &alpha.scale(C64::new(2.0, 0.0));
    let p2 = &(p - &(d * alpha)) + &(alpha * alpha);
    (d2, p2)
}

/// Jacobian of the translation on `(d0, d1, c0, c1, c2)`: `dP' = dP - G dD`.
fn translation_jacobian(alpha: &Poly) -> Vec<Vec<C64>> {
    let (g0, g1) = (alpha.coeff(0), alpha.coeff(1));
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut j = vec![vec![zero; 5]; 5];
    for (k, row) in j.iter_mut().enumerate() {
        row[k] = one;
    }
    j[2][0] = -g0;
    j[3][0] = -g1;
    j[3][1] = -g0;
    j[4][1] = -g1;
    j
}

fn padded(p: &Poly, len: usize) -> Vec<C64> {
    (0..len).map(|k| p.coeff(k)).collect()
}

/// Largest deviation between the section-wise translation and the
/// coefficient translation of `x^2 + a1 x + a2` at sample points of the base.
fn pointwise_residual(
    curve: &HyperellipticCurve,
    d: &Poly,
    p: &Poly,
    alpha: &Poly,
    d2: &Poly,
    p2: &Poly,
) -> f64 {
    let samples = [C64::new(0.37, 0.81), C64::new(-1.3, 0.45), C64::new(2.2, -0.6)];
    let mut worst: f64 = 0.0;
    for z in samples {
        let y = curve.y(z, 1);
        let f = curve.f(z);
        let Ok(cp) = CharPoly::new(vec![d.eval(z) / y, p.eval(z) / f]) else {
            continue;
        };
        let moved = translate_coeffs(&cp, alpha.eval(z) / y);
        let expect = [d2.eval(z) / y, p2.eval(z) / f];
        let scale = 1.0 + cp.max_abs_coeff() + (alpha.eval(z) / y).norm_sqr();
        for k in 0..2 {
            worst = worst.max((moved.coeff(k + 1) - expect[k]).norm() / scale);
        }
    }
    worst
}

/// Metric of the rank-two potential at `(d, P)` against the metric at the
/// translate by `alpha`, pulled back through the translation.
pub fn translation_invariance_check(
    curve: &HyperellipticCurve,
    d: &Poly,
    p: &Poly,
    alpha: &Poly,
    h: Option<f64>,
    tol: f64,
) -> Result<TranslationReport, SkError> {
    for (name, q, max) in [("d", d, 1), ("alpha", alpha, 1), ("P", p, 2)] {
        if q.degree().is_some_and(|k| k > max) {
            return Err(SkError::Input(format!("{name} has degree above {max}")));
        }
    }
    let (d2, p2) = translate_sections(d, p, alpha);
    let disc = |d: &Poly, p: &Poly| d * d - p.scale(C64::new(4.0, 0.0));
    expect_kind(curve, &disc(d, p), StratumKind::Smooth)?;
    expect_kind(curve, &disc(&d2, &p2), StratumKind::Smooth)?;

    let k = PotentialEvaluator::direct_gl2(curve, tol);
    let base: Vec<C64> = padded(d, 2).into_iter().chain(padded(p, 3)).collect();
    let moved: Vec<C64> = padded(&d2, 2).into_iter().chain(padded(&p2, 3)).collect();
    let h = h.unwrap_or_else(|| default_step(&base).max(default_step(&moved)));

    let k_base = k.eval(&base)?;
    let k_moved = k.eval(&moved)?;
    let h_base = metric_hessian(&k, &base, h)?;
    let identity = alpha.is_zero();
    let h_moved = if identity {
        metric_hessian(&k, &moved, h)?
    } else {
        metric_hessian(&k, &moved, h)?.pulled_back(&translation_jacobian(alpha))
    };
    let scale = h_base.max_abs();
    let diff = h_base
        .entries
        .iter()
        .zip(&h_moved.entries)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale;
    let bit_identical = h_base
        .entries
        .iter()
        .zip(&h_moved.entries)
        .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    let residual = pointwise_residual(curve, d, p, alpha, &d2, &p2);

    let mut checks = vec![
        Check::at_most("Hessian agreement", diff, 1e-3),
        Check::at_most("section-wise translation matches coefficients", residual, 1e-12),
    ];
    if identity {
        checks.push(Check::at_least(
            "zero translation bit-identical",
            bit_identical as u8 as f64,
            1.0,
        ));
    } else {
        let gap = (k_moved.value - k_base.value).abs();
        checks.push(Check::at_least(
            "potentials differ",
            gap,
            10.0 * (k_moved.error + k_base.error),
        ));
    }
    Ok(TranslationReport {
        d: d.clone(),
        p: p.clone(),
        alpha: alpha.clone(),
        d_translated: d2,
        p_translated: p2,
        k_base: k_base.value,
        k_translated: k_moved.value,
        hessian_base: h_base,
        hessian_translated: h_moved,
        hessian_rel_diff: diff,
        pointwise_translate_residual: residual,
        bit_identical,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// A path `t -> P(t)` ending at `P(0) = P0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproachPath {
    /// `P0 + t Q`.
    Linear { direction: Poly },
    /// Moves the root `root` of `P0` to `root + t direction`.
    RootShift { root: C64, direction: C64 },
}

impl ApproachPath {
    pub fn at(&self, p0: &Poly, t: f64) -> Result<Poly, SkError> {
        match self {
            ApproachPath::Linear { direction } => Ok(p0 + &direction.scale(C64::new(t, 0.0))),
            ApproachPath::RootShift { root, direction } => {
                let q = deflate(p0, *root)?;
                Ok(&q * &Poly(vec![-(root + direction * t), C64::new(1.0, 0.0)]))
            }
        }
    }
}

/// `p / (z - r)` for a root `r` of `p`.
fn deflate(p: &Poly, r: C64) -> Result<Poly, SkError> {
    let Some(deg) = p.degree() else {
        return Err(SkError::Input("cannot deflate the zero polynomial".into()));
    };
    if deg == 0 {
        return Err(SkError::Input("constant numerator has no root".into()));
    }
    let mut q = vec![C64::new(0.0, 0.0); deg];
    let mut carry = p.coeff(deg);
    for k in (0..deg).rev() {
        q[k] = carry;
        carry = p.coeff(k) + carry * r;
    }
    if carry.norm() > 1e-10 * p.abs_scale_at(r) {
        return Err(SkError::Input(format!("{r} is not a root of the numerator")));
    }
    Ok(Poly(q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityStep {
    pub t: f64,
    pub k: f64,
    pub diff: f64,
    /// `(K(2t) - 2 K(t) + K(0)) / t^2`, transverse second difference.
    pub second_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub p0: Poly,
    pub path: ApproachPath,
    pub tol: f64,
    pub k0: f64,
    pub steps: Vec<ContinuityStep>,
    /// Linear extrapolation to `t = 0` from the two smallest steps.
    pub extrapolated_limit: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Potential along a path in the smooth locus converging to a `B1` point.
pub fn stratum_continuity_check(
    curve: &HyperellipticCurve,
    p0: &Poly,
    path: &ApproachPath,
    ts: &[f64],
    tol: f64,
) -> Result<ContinuityReport, SkError> {
    if ts.len() < 2 || ts.windows(2).any(|w| w[1] >= w[0]) || ts.iter().any(|&t| t <= 0.0) {
        return Err(SkError::Input("steps must be positive and decreasing".into()));
    }
    expect_kind(curve, p0, StratumKind::B1Node)?;
    let mut polys = Vec::new();
    for &t in ts {
        for s in [t, 2.0 * t] {
            let p = path.at(p0, s)?;
            expect_kind(curve, &p, StratumKind::Smooth)?;
            polys.push(p);
        }
    }
    let k0 = k_direct_sl2(curve, p0, tol)?.value;
    let ks: Vec<f64> = polys
        .par_iter()
        .map(|p| Ok(k_direct_sl2(curve, p, tol)?.value))
        .collect::<Result<_, SkError>>()?;
    let steps: Vec<ContinuityStep> = ts
        .iter()
        .enumerate()
        .map(|(n, &t)| {
            let (kt, k2t) = (ks[2 * n], ks[2 * n + 1]);
            ContinuityStep {
                t,
                k: kt,
                diff: (kt - k0).abs(),
                second_difference: (k2t - 2.0 * kt + k0) / (t * t),
            }
        })
        .collect();
    let m = steps.len();
    let (a, b) = (&steps[m - 2], &steps[m - 1]);
    let extrapolated_limit = b.k - b.t * (a.k - b.k) / (a.t - b.t);

    let decreasing = steps.windows(2).all(|w| w[1].diff < w[0].diff || w[1].diff == 0.0);
    let checks = vec![
        Check::at_least("differences decrease", decreasing as u8 as f64, 1.0),
        Check::at_most(
            "|K(P(t_min)) - K(P0)|",
            b.diff,
            10.0 * tol * (1.0 + k0),
        ),
    ];
    Ok(ContinuityReport {
        p0: p0.clone(),
        path: path.clone(),
        tol,
        k0,
        steps,
        extrapolated_limit,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
