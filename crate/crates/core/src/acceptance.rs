//! The acceptance suite: eleven criteria, each a set of named checks with
//! explicit bounds. Shared by the `acceptance` test target and the
//! `validate` task of the command-line tool.

use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::golden::pm123;
use crate::oracle::polynomial_roots;
use crate::periods::{
    k_from_periods, k_periods_n1, period_matrix, period_vector, Cycle, CycleSum, HomologyBasis,
    SymplecticMatrix,
};
use crate::poly::Poly;
use crate::quad2d::k_direct_n1;
use crate::riemann::{
    arithmetic_genus, classify_stratum, enumerate_strata, normalization_genus, zn_genus_identity,
    HyperellipticCurve, SpectralFamily, StratumKind,
};
use crate::skmetric::{
    b2_flatness_check, default_step, gauss_curvature_1d, metric_hessian,
    stratum_continuity_check, translation_invariance_check, ApproachPath, Check,
    PotentialEvaluator,
};
use crate::symalg::{
    biso_eval, coeffs_from_power_sums, horner_desc, power_sums_from_coeffs, taut_form_coeffs,
    CharPoly,
};

/// Criteria that fail with a faithful implementation; see the README.
pub const KNOWN_UNATTAINABLE: &[u8] = &[9];

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "Newton identities and power-sum round trip"),
    (2, "substitution identity at the roots of s"),
    (3, "genus identities"),
    (4, "stratum census and classification fixtures"),
    (5, "rank-one potential: periods vs plane quadrature"),
    (6, "period-matrix contracts and symplectic invariance"),
    (7, "flatness on the B2 component {1,2}"),
    (8, "translation invariance of the rank-two metric"),
    (9, "continuity of the potential across B1"),
    (10, "finite-difference validation on synthetic potentials"),
    (11, "positivity of the traceless rank-two metric"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub known_unattainable: bool,
    /// Wall time; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl CriterionResult {
    /// One summary line.
    pub fn line(&self) -> String {
        let status = match (self.passed, self.known_unattainable) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        let worst = self
            .checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| format!("; failed {}: {:e} vs bound {:e}", c.name, c.value, c.bound))
            .unwrap_or_default();
        let err = self
            .error
            .as_ref()
            .map(|e| format!("; error: {e}"))
            .unwrap_or_default();
        format!(
            "criterion {:>2} {:<13} {} [{} checks]{}{}",
            self.id,
            status,
            self.title,
            self.checks.len(),
            worst,
            err
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// True when every failure is on [`KNOWN_UNATTAINABLE`].
    pub fn only_known_failures(&self) -> bool {
        self.criteria.iter().all(|c| c.passed || c.known_unattainable)
    }
}

pub fn run_all() -> AcceptanceReport {
    AcceptanceReport {
        criteria: CRITERIA.iter().map(|&(id, _)| run_criterion(id)).collect(),
    }
}

pub fn run_criterion(id: u8) -> CriterionResult {
    let title = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .unwrap_or("unknown criterion");
    let start = Instant::now();
    let outcome = match id {
        1 => newton_suite(),
        2 => substitution_identity(),
        3 => genus_identities(),
        4 => stratum_census(),
        5 => flagship_cross_route(),
        6 => period_contracts(),
        7 => b2_flatness(),
        8 => translation_invariance(),
        9 => stratum_continuity(),
        10 => synthetic_differentiation(),
        11 => metric_positivity(),
        _ => Err(format!("no criterion {id}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (checks, error) = match outcome {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e)),
    };
    CriterionResult {
        id,
        title: title.to_string(),
        passed: error.is_none() && !checks.is_empty() && checks.iter().all(|c| c.passed),
        known_unattainable: KNOWN_UNATTAINABLE.contains(&id),
        seconds,
        checks,
        error,
    }
}

type Outcome = Result<Vec<Check>, String>;

fn unit_disc(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() <= 1.0 {
            return z;
        }
    }
}

fn worst(name: &str, values: impl IntoIterator<Item = f64>, bound: f64) -> Check {
    let v = values.into_iter().fold(0.0, f64::max);
    Check::at_most(name, v, bound)
}

fn newton_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut residuals = Vec::new();
    let mut round_trip = Vec::new();
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let a: Vec<C64> = (0..n).map(|_| unit_disc(&mut rng)).collect();
        let p = CharPoly::new(a).map_err(|e| e.to_string())?;
        let scale = (1.0 + p.max_abs_coeff()).powi(n as i32);
        let s = power_sums_from_coeffs(&p);
        let b = s.sums();
        for k in 1..=n {
            let r: C64 = (1..=k).map(|j| b[j - 1] * p.coeff(k - j)).sum::<C64>() + p.coeff(k) * k as f64;
            residuals.push(r.norm() / scale);
        }
        let back = coeffs_from_power_sums(&s);
        let diff = back
            .coeffs()
            .iter()
            .zip(p.coeffs())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        round_trip.push(diff / p.max_abs_coeff().max(1.0));
    }
    Ok(vec![
        worst("newton residual / (1+max|a|)^n", residuals, 1e-12),
        worst("round-trip relative error", round_trip, 1e-12),
    ])
}

fn substitution_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut errs = Vec::new();
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let a: Vec<C64> = (0..n).map(|_| unit_disc(&mut rng)).collect();
        let p = CharPoly::new(a).map_err(|e| e.to_string())?;
        let b = power_sums_from_coeffs(&p);
        let taut = taut_form_coeffs(&p);
        // s as a constant-first polynomial
        let mut asc: Vec<C64> = p.coeffs().iter().rev().copied().collect();
        asc.push(C64::new(1.0, 0.0));
        for lam in polynomial_roots(&Poly(asc)) {
            let lhs = biso_eval(&p, b.sums(), lam);
            let rhs = horner_desc(&taut, lam);
            errs.push((lhs - rhs).norm() / (1.0 + rhs.norm()));
        }
    }
    Ok(vec![worst("biso_eval vs taut form at roots of s", errs, 1e-10)])
}

fn exact(name: &str, got: i64, want: i64) -> Check {
    Check::at_most(format!("{name} = {want} (got {got})"), (got - want).abs() as f64, 0.0)
}

fn genus_identities() -> Outcome {
    let e = |r: Result<i64, crate::riemann::RiemannError>| r.map_err(|e| e.to_string());
    let mut checks = vec![
        exact("arithmetic_genus(2,2)", e(arithmetic_genus(2, 2))?, 5),
        exact("normalization_genus(5,[2])", e(normalization_genus(5, &[2]))?, 4),
        exact("normalization_genus(5,[2,2])", e(normalization_genus(5, &[2, 2]))?, 3),
    ];
    let mut mismatches = 0;
    for n in 2..=6 {
        for g in 2..=8 {
            let (l, r) = zn_genus_identity(n, g).map_err(|e| e.to_string())?;
            if l != r {
                mismatches += 1;
            }
        }
    }
    checks.push(exact("zn_genus_identity mismatches", mismatches, 0));
    Ok(checks)
}

fn stratum_census() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut curves = vec![pm123()];
    for _ in 0..5 {
        let pts: Vec<C64> = (0..6).map(|_| unit_disc(&mut rng) * 3.0).collect();
        curves.push(HyperellipticCurve::new(pts).map_err(|e| e.to_string())?);
    }
    let mut checks = Vec::new();
    let (mut bad_b1, mut bad_b2) = (0, 0);
    for c in &curves {
        let (b1, b2) = enumerate_strata(c);
        if b1.len() != 6 {
            bad_b1 += 1;
        }
        let mut all_pairs = true;
        for i in 1..=6 {
            for j in (i + 1)..=6 {
                all_pairs &= b2.contains(&(i, j));
            }
        }
        if b2.len() != 15 || !all_pairs {
            bad_b2 += 1;
        }
    }
    checks.push(exact("curves without 6 B1 components", bad_b1, 0));
    checks.push(exact("curves without the 15 B2 pairs", bad_b2, 0));

    let fixtures: [(&str, [f64; 3], StratumKind, Option<i64>, Option<Vec<usize>>); 3] = [
        ("z^2+5", [5.0, 0.0, 1.0], StratumKind::Smooth, Some(5), None),
        ("(z-1)(z-5)", [5.0, -6.0, 1.0], StratumKind::B1Node, Some(4), Some(vec![1])),
        ("(z-1)(z-2)", [2.0, -3.0, 1.0], StratumKind::B2BranchPair, Some(3), Some(vec![1, 2])),
    ];
    for (name, coeffs, kind, genus, label) in fixtures {
        let fam = SpectralFamily::sl2(pm123(), Poly::from_real(&coeffs)).map_err(|e| e.to_string())?;
        let rec = classify_stratum(&fam).map_err(|e| e.to_string())?;
        let ok = rec.kind == kind && rec.normalization_genus == genus && rec.component_label == label;
        checks.push(Check::at_most(
            format!("classify P = {name} -> {kind} (got {}, genus {:?})", rec.kind, rec.normalization_genus),
            if ok { 0.0 } else { 1.0 },
            0.0,
        ));
    }
    Ok(checks)
}

/// Real branch lists used by the period-based criteria.
pub const REAL_FIXTURES: [[f64; 6]; 24] = [
    [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0],
    [-2.5, -1.1, 0.2, 0.9, 2.0, 3.7],
    [0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
    [-5.0, -4.0, -3.0, -2.0, -1.0, 0.0],
    [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5],
    [-4.0, -1.0, 0.5, 2.0, 2.5, 6.0],
    [-2.0, -1.9, 0.0, 0.1, 2.0, 2.1],
    [-3.0, -1.0, -0.2, 0.2, 1.0, 3.0],
    [1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
    [-0.3, -0.2, -0.1, 0.1, 0.2, 0.3],
    [-7.0, -3.5, -1.0, 0.5, 4.0, 9.0],
    [-1.5, -1.2, 0.4, 1.3, 1.7, 2.9],
    [-6.0, -5.5, -2.0, 1.0, 1.2, 5.0],
    [-2.2, -0.7, -0.6, 0.6, 0.7, 2.2],
    [0.5, 1.5, 2.5, 3.5, 4.5, 5.5],
    [-10.0, -6.0, -3.0, -1.0, 0.0, 1.0],
    [-1.0, 0.0, 1.0, 10.0, 11.0, 12.0],
    [-3.3, -2.1, -0.4, 0.8, 1.9, 4.4],
    [-0.9, -0.8, 0.3, 0.35, 1.4, 1.6],
    [-4.5, -2.5, -0.5, 1.5, 3.5, 5.5],
    [-2.0, -1.0, 0.0, 1.0, 3.0, 6.0],
    [-8.0, -4.0, -2.0, 2.0, 4.0, 8.0],
    [-1.25, -0.75, -0.25, 0.25, 0.75, 1.25],
    [-3.0, -2.9, -2.8, 2.8, 2.9, 3.0],
];

fn real_curves() -> Result<Vec<HyperellipticCurve>, String> {
    REAL_FIXTURES
        .iter()
        .map(|b| HyperellipticCurve::from_real(b).map_err(|e| e.to_string()))
        .collect()
}

fn flagship_cross_route() -> Outcome {
    let curves = real_curves()?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let alphas: Vec<Poly> = curves
        .iter()
        .map(|_| Poly(vec![unit_disc(&mut rng), unit_disc(&mut rng)]))
        .collect();
    let rel: Vec<f64> = curves
        .par_iter()
        .zip(alphas.par_iter())
        .map(|(c, g)| {
            let basis = HomologyBasis::standard_real(c).map_err(|e| e.to_string())?;
            let kp = k_periods_n1(c, g, &basis).map_err(|e| e.to_string())?;
            let kd = k_direct_n1(c, g, 1e-7).map_err(|e| e.to_string())?.value;
            Ok((kp - kd).abs() / (1.0 + kd))
        })
        .collect::<Result<_, String>>()?;
    Ok(vec![
        Check::at_least("fixtures", rel.len() as f64, 20.0),
        worst("|K_periods - K_direct| / (1+K)", rel, 1e-6),
    ])
}

/// Applies `(A'; B') = M (A; B)` to the cycle classes themselves.
pub fn transform_basis(basis: &HomologyBasis, m: &SymplecticMatrix) -> HomologyBasis {
    let old = [
        &basis.a_cycles[0],
        &basis.a_cycles[1],
        &basis.b_cycles[0],
        &basis.b_cycles[1],
    ];
    let row = |i: usize| {
        let mut cycles = Vec::new();
        for (j, class) in old.iter().enumerate() {
            let c = m.0[i][j];
            for _ in 0..c.unsigned_abs() {
                for cy in &class.0 {
                    let o = if c < 0 { -cy.orientation } else { cy.orientation };
                    cycles.push(Cycle { orientation: o, ..cy.clone() });
                }
            }
        }
        CycleSum(cycles)
    };
    HomologyBasis {
        a_cycles: [row(0), row(1)],
        b_cycles: [row(2), row(3)],
        intersection_convention: basis.intersection_convention.clone(),
    }
}

pub fn symplectic_changes() -> Vec<SymplecticMatrix> {
    let shear = SymplecticMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 1, 0], [1, 2, 0, 1]]);
    let swap = SymplecticMatrix([[0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1]]);
    let mix = SymplecticMatrix([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, -1, 1]]);
    vec![shear, swap, mix, shear.mul(&swap).mul(&mix)]
}

fn period_contracts() -> Outcome {
    let curves = real_curves()?;
    let changes = symplectic_changes();
    let not_symplectic = changes.iter().filter(|m| !m.is_symplectic()).count();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let alphas: Vec<Poly> = curves
        .iter()
        .map(|_| Poly(vec![unit_disc(&mut rng), unit_disc(&mut rng)]))
        .collect();
    let per_curve: Vec<(f64, f64, f64)> = curves
        .par_iter()
        .zip(alphas.par_iter())
        .map(|(c, g)| {
            let basis = HomologyBasis::standard_real(c).map_err(|e| e.to_string())?;
            let pm = period_matrix(c, &basis).map_err(|e| e.to_string())?;
            let k = k_from_periods(&period_vector(c, g, &basis).map_err(|e| e.to_string())?);
            let mut drift: f64 = 0.0;
            for m in &changes {
                let moved = transform_basis(&basis, m);
                let km = k_periods_n1(c, g, &moved).map_err(|e| e.to_string())?;
                drift = drift.max((km - k).abs() / (1.0 + k.abs()));
            }
            Ok((pm.symmetry_defect(), pm.im_tau_eigenvalues()[0], drift))
        })
        .collect::<Result<_, String>>()?;
    Ok(vec![
        exact("non-symplectic basis changes", not_symplectic as i64, 0),
        worst("|tau12 - tau21|", per_curve.iter().map(|p| p.0), 1e-8),
        Check::at_least(
            "min eigenvalue of Im tau",
            per_curve.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
            f64::MIN_POSITIVE,
        ),
        worst("K drift under basis change (relative)", per_curve.iter().map(|p| p.2), 1e-10),
    ])
}

pub fn b2_samples() -> Vec<C64> {
    vec![
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-2.0, 0.5),
        C64::new(0.6, 0.6),
        C64::new(4.0, 0.0),
        C64::new(-0.7, -1.1),
        C64::new(2.5, -2.0),
        C64::new(-1.5, 0.0),
    ]
}

fn b2_flatness() -> Outcome {
    let c = pm123();
    let samples = b2_samples();
    let coarse = b2_flatness_check(&c, (1, 2), &samples, 1e-6).map_err(|e| e.to_string())?;
    let fine = b2_flatness_check(&c, (1, 2), &samples, 1e-8).map_err(|e| e.to_string())?;
    let mut checks: Vec<Check> = Vec::new();
    for (tag, rep) in [("tol 1e-6", &coarse), ("tol 1e-8", &fine)] {
        for ch in &rep.checks {
            checks.push(Check {
                name: format!("{tag}: {}", ch.name),
                ..ch.clone()
            });
        }
    }
    checks.push(Check::at_most(
        "c stability across tolerances (relative)",
        (coarse.c - fine.c).abs() / fine.c,
        1e-6,
    ));
    Ok(checks)
}

fn translation_invariance() -> Outcome {
    let c = pm123();
    let d = Poly::zero();
    let p = Poly::from_real(&[5.0, 0.0, 1.0]);
    let mut checks = Vec::new();
    for (tag, alpha) in [("alpha = 1", Poly::from_real(&[1.0])), ("alpha = 0", Poly::zero())] {
        let rep = translation_invariance_check(&c, &d, &p, &alpha, None, 1e-10).map_err(|e| e.to_string())?;
        for ch in rep.checks {
            checks.push(Check {
                name: format!("{tag}: {}", ch.name),
                ..ch
            });
        }
    }
    Ok(checks)
}

fn stratum_continuity() -> Outcome {
    let c = pm123();
    let p0 = Poly::from_real(&[5.0, -6.0, 1.0]);
    let tol = 1e-7;
    let ts = [1e-1, 1e-2, 1e-3];
    let mut checks = Vec::new();
    let mut last = Vec::new();
    let mut k0 = 0.0;
    for (tag, dir) in [("real shift", C64::new(1.0, 0.0)), ("imaginary shift", C64::new(0.0, 1.0))] {
        let path = ApproachPath::RootShift {
            root: C64::new(1.0, 0.0),
            direction: dir,
        };
        let rep = stratum_continuity_check(&c, &p0, &path, &ts, tol).map_err(|e| e.to_string())?;
        k0 = rep.k0;
        last.push(rep.steps.last().map(|s| s.k).unwrap_or(f64::NAN));
        for ch in rep.checks {
            checks.push(Check {
                name: format!("{tag}: {}", ch.name),
                ..ch
            });
        }
    }
    checks.push(Check::at_most(
        "path independence |K_real(t) - K_imag(t)| at t = 1e-3",
        (last[0] - last[1]).abs(),
        20.0 * tol * (1.0 + k0),
    ));
    Ok(checks)
}

fn synthetic_differentiation() -> Outcome {
    let mut checks = Vec::new();
    // K = c^* G c with G Hermitian positive definite
    let g = [
        [C64::new(2.0, 0.0), C64::new(0.5, -0.25)],
        [C64::new(0.5, 0.25), C64::new(1.0, 0.0)],
    ];
    let quad = PotentialEvaluator::synthetic(2, move |c| {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..2 {
            for k in 0..2 {
                s += c[j].conj() * g[j][k] * c[k];
            }
        }
        s.re
    });
    let point = [C64::new(0.3, -0.2), C64::new(-1.0, 0.5)];
    let h = metric_hessian(&quad, &point, default_step(&point)).map_err(|e| e.to_string())?;
    // the Levi form of c^* G c is g(e_j, e_k) = G_kj
    let mut err: f64 = 0.0;
    for j in 0..2 {
        for k in 0..2 {
            err = err.max((h.get(j, k) - g[k][j]).norm());
        }
    }
    checks.push(Check::at_most("quadratic potential: Hessian vs Gram matrix", err, 1e-4));

    let disc = PotentialEvaluator::synthetic(1, |c| -(1.0 - c[0].norm_sqr()).ln());
    let w = C64::new(0.3, 0.0);
    let cv = gauss_curvature_1d(&disc, w, 1e-2).map_err(|e| e.to_string())?;
    let metric = 1.0 / (1.0 - 0.09f64).powi(2);
    checks.push(Check::at_most("disc model: metric (relative)", (cv.metric - metric).abs() / metric, 1e-4));
    checks.push(Check::at_most("disc model: curvature + 4", (cv.curvature + 4.0).abs(), 1e-4));

    let flat = PotentialEvaluator::synthetic(1, |c| c[0].norm_sqr());
    let cv = gauss_curvature_1d(&flat, C64::new(0.7, -0.4), 1e-2).map_err(|e| e.to_string())?;
    checks.push(Check::at_most("flat model: curvature", cv.curvature.abs(), 1e-6));
    Ok(checks)
}

/// Seeded points `P = c0 + c1 z + c2 z^2` on the smooth stratum.
pub fn smooth_sl2_points(count: usize) -> Vec<[C64; 3]> {
    let c = pm123();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut out = Vec::new();
    while out.len() < count {
        let pt = [
            unit_disc(&mut rng) * 6.0,
            unit_disc(&mut rng) * 2.0,
            C64::new(1.0, 0.0) + unit_disc(&mut rng) * 0.5,
        ];
        let Ok(fam) = SpectralFamily::sl2(c.clone(), Poly(pt.to_vec())) else {
            continue;
        };
        if matches!(classify_stratum(&fam), Ok(r) if r.kind == StratumKind::Smooth) {
            out.push(pt);
        }
    }
    out
}

fn metric_positivity() -> Outcome {
    let c = pm123();
    let k = PotentialEvaluator::direct_sl2(&c, 1e-10);
    let mut checks = Vec::new();
    for (n, pt) in smooth_sl2_points(10).iter().enumerate() {
        let h = metric_hessian(&k, pt, default_step(pt)).map_err(|e| e.to_string())?;
        let min = h.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        let bound = h.eigenvalue_error_bound();
        checks.push(Check::at_least(
            format!("point {}: min eigenvalue above error bound {bound:.3e}", n + 1),
            min,
            bound,
        ));
    }
    Ok(checks)
}
