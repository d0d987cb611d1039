//! Kähler metrics from potentials by finite differences, Gaussian curvature
//! on one-dimensional families, and the geometric checks built on them.
//!
//! The metric is `g_{jk} = d^2 K / dc_j d conj(c_k)`. Along a complex line
//! `t -> c + t v` the Levi form `Q(v) = sum v_j conj(v_k) g_{jk}` is a quarter
//! of the Laplacian in `t`, taken with the five-point stencil and one
//! Richardson step; off-diagonal entries come from polarisation,
//! `g(u, w) = 1/4 sum_m i^m Q(u + i^m w)`.

mod checks;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::periods::{k_periods_n1, HomologyBasis, PeriodError};
use crate::poly::Poly;
use crate::quad2d::{k_direct_gl2, k_direct_n1, k_direct_sl2, QuadError};
use crate::riemann::{HyperellipticCurve, RiemannError, StratumKind};

pub use checks::{
    b2_flatness_check, stratum_continuity_check, translation_invariance_check, ApproachPath,
    B2Report, B2Sample, Check, ContinuityReport, ContinuityStep, TranslationReport,
};

/// Default relative finite-difference step.
pub const DEFAULT_STEP_REL: f64 = 1e-2;
/// Richardson estimates above this fraction of the matrix scale mean the
/// stencil is dominated by evaluation noise.
pub const NOISE_LIMIT_REL: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error(transparent)]
    Riemann(#[from] RiemannError),
    #[error("step {h} outside [1e-4, 1e-1] times the parameter scale {scale}")]
    Step { h: f64, scale: f64 },
    #[error("expected {expected} parameters, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("metric {0:e} is not positive")]
    NonPositiveMetric(f64),
    #[error("finite differences dominated by noise: estimate {error:e} against scale {scale:e}")]
    NoiseDominated { error: f64, scale: f64 },
    #[error("expected stratum {expected}, found {found}")]
    WrongStratum { expected: String, found: StratumKind },
    #[error("invalid input: {0}")]
    Input(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    DirectSl2,
    DirectGl2,
    DirectN1,
    PeriodsN1,
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub error: f64,
}

type EvalFn = dyn Fn(&[C64]) -> Result<Evaluation, SkError> + Send + Sync;

/// A potential as a function of `dim` complex parameters.
#[derive(Clone)]
pub struct PotentialEvaluator {
    dim: usize,
    provenance: Provenance,
    f: Arc<EvalFn>,
}

impl std::fmt::Debug for PotentialEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialEvaluator")
            .field("dim", &self.dim)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl PotentialEvaluator {
    pub fn new<F>(dim: usize, provenance: Provenance, f: F) -> Self
    where
        F: Fn(&[C64]) -> Result<Evaluation, SkError> + Send + Sync + 'static,
    {
        PotentialEvaluator {
            dim,
            provenance,
            f: Arc::new(f),
        }
    }

    /// Exact closed-form potential.
    pub fn synthetic<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[C64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(dim, Provenance::Synthetic, move |c| {
            Ok(Evaluation {
                value: f(c),
                error: 0.0,
            })
        })
    }

    /// `K(c0, c1, c2)` for the traceless family `x^2 = (c0 + c1 z + c2 z^2) dz^2 / f`.
    pub fn direct_sl2(curve: &HyperellipticCurve, tol: f64) -> Self {
        let curve = curve.clone();
        Self::new(3, Provenance::DirectSl2, move |c| {
            let r = k_direct_sl2(&curve, &Poly(c.to_vec()), tol)?;
            Ok(Evaluation {
                value: r.value,
                error: r.abs_error_estimate,
            })
        })
    }

    /// `K(d0, d1, c0, c1, c2)` for `x^2 + (d0 + d1 z) dz/y x + (c0 + c1 z + c2 z^2) dz^2/f`.
    pub fn direct_gl2(curve: &HyperellipticCurve, tol: f64) -> Self {
        let curve = curve.clone();
        Self::new(5, Provenance::DirectGl2, move |c| {
            let r = k_direct_gl2(&curve, &Poly(c[..2].to_vec()), &Poly(c[2..].to_vec()), tol)?;
            Ok(Evaluation {
                value: r.value,
                error: r.abs_error_estimate,
            })
        })
    }

    /// `K(d0, d1)` for the rank-one curve `x = (d0 + d1 z) dz / y`.
    pub fn direct_n1(curve: &HyperellipticCurve, tol: f64) -> Self {
        let curve = curve.clone();
        Self::new(2, Provenance::DirectN1, move |c| {
            let r = k_direct_n1(&curve, &Poly(c.to_vec()), tol)?;
            Ok(Evaluation {
                value: r.value,
                error: r.abs_error_estimate,
            })
        })
    }

    /// Rank-one potential from periods on the standard real basis.
    pub fn periods_n1(curve: &HyperellipticCurve) -> Result<Self, SkError> {
        let curve = curve.clone();
        let basis = HomologyBasis::standard_real(&curve)?;
        Ok(Self::new(2, Provenance::PeriodsN1, move |c| {
            Ok(Evaluation {
                value: k_periods_n1(&curve, &Poly(c.to_vec()), &basis)?,
                error: 0.0,
            })
        }))
    }

    /// `c -> K(map(c))` on a `dim`-dimensional parameter space.
    pub fn reparametrized<G>(&self, dim: usize, map: G) -> Self
    where
        G: Fn(&[C64]) -> Vec<C64> + Send + Sync + 'static,
    {
        let inner = self.clone();
        Self::new(dim, self.provenance, move |c| inner.eval(&map(c)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn eval(&self, c: &[C64]) -> Result<Evaluation, SkError> {
        if c.len() != self.dim {
            return Err(SkError::Dimension {
                expected: self.dim,
                got: c.len(),
            });
        }
        (self.f)(c)
    }
}

/// Dense Hermitian matrix with a per-entry error estimate, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix {
    pub dim: usize,
    pub entries: Vec<C64>,
    pub errors: Vec<f64>,
}

impl HermitianMatrix {
    pub fn get(&self, j: usize, k: usize) -> C64 {
        self.entries[j * self.dim + k]
    }

    pub fn error(&self, j: usize, k: usize) -> f64 {
        self.errors[j * self.dim + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn hermitian_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for j in 0..self.dim {
            for k in 0..self.dim {
                r = r.max((self.get(j, k) - self.get(k, j).conj()).norm());
            }
        }
        r
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_fn(self.dim, self.dim, |j, k| self.get(j, k));
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Bound on eigenvalue perturbation from the entry errors (Frobenius norm).
    pub fn eigenvalue_error_bound(&self) -> f64 {
        self.errors.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    /// `H'(u, w) = H(J u, J w)`, i.e. `J^T H conj(J)`.
    pub fn pulled_back(&self, jac: &[Vec<C64>]) -> Self {
        let n = self.dim;
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        let mut errors = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                let mut s = C64::new(0.0, 0.0);
                let mut e = 0.0;
                for l in 0..n {
                    for m in 0..n {
                        let w = jac[l][j] * jac[m][k].conj();
                        s += w * self.get(l, m);
                        e += w.norm() * self.error(l, m);
                    }
                }
                entries[j * n + k] = s;
                errors[j * n + k] = e;
            }
        }
        HermitianMatrix {
            dim: n,
            entries,
            errors,
        }
    }
}

pub fn default_step(point: &[C64]) -> f64 {
    DEFAULT_STEP_REL * parameter_scale(point)
}

fn parameter_scale(point: &[C64]) -> f64 {
    1.0 + point.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Stencil offsets along `v`: `+-h v, +-i h v` at `h` and `h/2`.
fn stencil_points(point: &[C64], v: &[C64], h: f64) -> Vec<Vec<C64>> {
    let mut out = Vec::with_capacity(8);
    for step in [h, 0.5 * h] {
        for t in [
            C64::new(step, 0.0),
            C64::new(-step, 0.0),
            C64::new(0.0, step),
            C64::new(0.0, -step),
        ] {
            out.push(point.iter().zip(v).map(|(c, vi)| c + vi * t).collect());
        }
    }
    out
}

/// Levi form value, truncation estimate and propagated evaluation error.
fn levi_form(center: Evaluation, ring: &[Evaluation], h: f64) -> (f64, f64, f64) {
    let lap = |vals: &[Evaluation], s: f64| {
        (vals.iter().map(|e| e.value).sum::<f64>() - 4.0 * center.value) / (s * s)
    };
    let l_h = lap(&ring[..4], h);
    let l_h2 = lap(&ring[4..], 0.5 * h);
    let rich = (4.0 * l_h2 - l_h) / 3.0;
    let noise = |vals: &[Evaluation], s: f64| {
        (vals.iter().map(|e| e.error).sum::<f64>() + 4.0 * center.error) / (s * s)
    };
    let prop = (4.0 * noise(&ring[4..], 0.5 * h) + noise(&ring[..4], h)) / 3.0;
    (0.25 * rich, 0.25 * (rich - l_h2).abs(), 0.25 * prop)
}

/// Metric matrix `d^2 K / dc_j d conj(c_k)` at `point`.
pub fn metric_hessian(
    k: &PotentialEvaluator,
    point: &[C64],
    h: f64,
) -> Result<HermitianMatrix, SkError> {
    let n = k.dim();
    if point.len() != n {
        return Err(SkError::Dimension {
            expected: n,
            got: point.len(),
        });
    }
    let scale = parameter_scale(point);
    if !(1e-4 * scale..=1e-1 * scale).contains(&h) {
        return Err(SkError::Step { h, scale });
    }

    let unit = |j: usize| -> Vec<C64> {
        (0..n)
            .map(|i| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            .collect()
    };
    let phases = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    // directions: e_j, then e_j + i^m e_k for j < k
    let mut dirs: Vec<Vec<C64>> = (0..n).map(unit).collect();
    for j in 0..n {
        for kk in (j + 1)..n {
            for ph in phases {
                let mut v = unit(j);
                v[kk] = ph;
                dirs.push(v);
            }
        }
    }
    let mut pts = vec![point.to_vec()];
    for v in &dirs {
        pts.extend(stencil_points(point, v, h));
    }
    let vals: Vec<Evaluation> = pts
        .par_iter()
        .map(|p| k.eval(p))
        .collect::<Result<_, _>>()?;
    let center = vals[0];
    let forms: Vec<(f64, f64, f64)> = (0..dirs.len())
        .map(|d| levi_form(center, &vals[1 + 8 * d..9 + 8 * d], h))
        .collect();

    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    let mut errors = vec![0.0; n * n];
    let mut trunc_max: f64 = 0.0;
    for j in 0..n {
        let (q, t, p) = forms[j];
        entries[j * n + j] = C64::new(q, 0.0);
        errors[j * n + j] = t + p;
        trunc_max = trunc_max.max(t);
    }
    let mut idx = n;
    for j in 0..n {
        for kk in (j + 1)..n {
            let mut g = C64::new(0.0, 0.0);
            let mut e = 0.0;
            for ph in phases {
                let (q, t, p) = forms[idx];
                g += ph * q;
                e += t + p;
                trunc_max = trunc_max.max(t);
                idx += 1;
            }
            entries[j * n + kk] = g * 0.25;
            entries[kk * n + j] = (g * 0.25).conj();
            errors[j * n + kk] = 0.25 * e;
            errors[kk * n + j] = 0.25 * e;
        }
    }
    let m = HermitianMatrix {
        dim: n,
        entries,
        errors,
    };
    let mscale = m.max_abs();
    if trunc_max > NOISE_LIMIT_REL * mscale && trunc_max > 0.0 {
        return Err(SkError::NoiseDominated {
            error: trunc_max,
            scale: mscale,
        });
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    pub curvature: f64,
    pub error: f64,
    pub metric: f64,
}

/// Gaussian curvature `-(2/lambda) d^2 log(lambda) / da d conj(a)` of the
/// metric `lambda |da|^2` induced by a one-parameter potential.
pub fn gauss_curvature_1d(k: &PotentialEvaluator, a: C64, h: f64) -> Result<Curvature, SkError> {
    if k.dim() != 1 {
        return Err(SkError::Dimension {
            expected: 1,
            got: k.dim(),
        });
    }
    let mut pts = vec![a];
    for step in [h, 0.5 * h] {
        for t in [
            C64::new(step, 0.0),
            C64::new(-step, 0.0),
            C64::new(0.0, step),
            C64::new(0.0, -step),
        ] {
            pts.push(a + t);
        }
    }
    let lambdas: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&p| {
            let m = metric_hessian(k, &[p], h)?;
            let lam = m.get(0, 0).re;
            if lam <= 0.0 {
                return Err(SkError::NonPositiveMetric(lam));
            }
            Ok((lam, m.error(0, 0)))
        })
        .collect::<Result<_, _>>()?;
    let logs: Vec<Evaluation> = lambdas
        .iter()
        .map(|&(l, e)| Evaluation {
            value: l.ln(),
            error: e / l,
        })
        .collect();
    let (q, t, p) = levi_form(logs[0], &logs[1..], h);
    let lam0 = lambdas[0].0;
    Ok(Curvature {
        curvature: -2.0 * q / lam0,
        error: 2.0 * (t + p) / lam0,
        metric: lam0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_form_is_exact() {
        let k = PotentialEvaluator::synthetic(1, |c| c[0].norm_sqr());
        let m = metric_hessian(&k, &[C64::new(0.3, -0.2)], 1e-2).unwrap();
        assert!((m.get(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn hermitian_form_in_two_variables() {
        // K = sum conj(c_j) G_jk c_k  =>  d^2K/dc_j dconj(c_k) = G_kj
        let g = [
            [C64::new(2.0, 0.0), C64::new(0.5, 0.7)],
            [C64::new(0.5, -0.7), C64::new(1.5, 0.0)],
        ];
        let k = PotentialEvaluator::synthetic(2, move |c| {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..2 {
                for l in 0..2 {
                    s += c[j].conj() * g[j][l] * c[l];
                }
            }
            s.re
        });
        let m = metric_hessian(&k, &[C64::new(0.1, 0.2), C64::new(-0.4, 0.3)], 1e-2).unwrap();
        for j in 0..2 {
            for l in 0..2 {
                assert!((m.get(j, l) - g[l][j]).norm() < 1e-8, "({j},{l})");
            }
        }
        assert_eq!(m.hermitian_residual(), 0.0);
        let ev = m.eigenvalues();
        let tr: f64 = 3.5;
        let det: f64 = 3.0 - 0.74;
        let disc = (tr * tr / 4.0 - det).sqrt();
        assert!((ev[0] - (tr / 2.0 - disc)).abs() < 1e-8);
        assert!((ev[1] - (tr / 2.0 + disc)).abs() < 1e-8);
    }

    #[test]
    fn flat_model_has_zero_curvature() {
        let k = PotentialEvaluator::synthetic(1, |c| c[0].norm_sqr());
        let c = gauss_curvature_1d(&k, C64::new(0.4, 0.1), 1e-2).unwrap();
        assert!(c.curvature.abs() < 1e-6);
    }

    #[test]
    fn disc_model_has_curvature_minus_four() {
        let k = PotentialEvaluator::synthetic(1, |c| -(1.0 - c[0].norm_sqr()).ln());
        let a = C64::new(0.3, 0.0);
        let c = gauss_curvature_1d(&k, a, default_step(&[a])).unwrap();
        assert!((c.curvature + 4.0).abs() < 1e-4, "{}", c.curvature);
        let m = metric_hessian(&k, &[a], default_step(&[a])).unwrap();
        assert!((m.get(0, 0).re - 1.0 / (1.0 - 0.09f64).powi(2)).abs() < 1e-4);
    }

    #[test]
    fn absolute_value_potential_is_flat() {
        let k = PotentialEvaluator::synthetic(1, |c| 2.5 * c[0].norm());
        let c = gauss_curvature_1d(&k, C64::new(1.0, 0.0), 1e-2).unwrap();
        assert!(c.curvature.abs() < 1e-3);
    }

    #[test]
    fn step_and_dimension_validation() {
        let k = PotentialEvaluator::synthetic(1, |c| c[0].norm_sqr());
        assert!(matches!(
            metric_hessian(&k, &[C64::new(0.0, 0.0)], 1.0),
            Err(SkError::Step { .. })
        ));
        assert!(matches!(
            metric_hessian(&k, &[C64::new(0.0, 0.0); 2], 1e-2),
            Err(SkError::Dimension { .. })
        ));
        let neg = PotentialEvaluator::synthetic(1, |c| -c[0].norm_sqr());
        assert!(matches!(
            gauss_curvature_1d(&neg, C64::new(0.0, 0.0), 1e-2),
            Err(SkError::NonPositiveMetric(_))
        ));
    }

    #[test]
    fn noisy_potential_is_flagged() {
        let k = PotentialEvaluator::synthetic(1, |c| {
            c[0].norm_sqr() + 1e-3 * (1e6 * c[0].re).sin()
        });
        assert!(matches!(
            metric_hessian(&k, &[C64::new(0.2, 0.0)], 1e-2),
            Err(SkError::NoiseDominated { .. })
        ));
    }

    #[test]
    fn pull_back_by_identity_is_exact() {
        let m = HermitianMatrix {
            dim: 2,
            entries: vec![
                C64::new(1.0, 0.0),
                C64::new(0.2, 0.1),
                C64::new(0.2, -0.1),
                C64::new(3.0, 0.0),
            ],
            errors: vec![0.0; 4],
        };
        let id = vec![
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ];
        assert_eq!(m.pulled_back(&id), m);
    }
}
