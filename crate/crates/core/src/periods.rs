//! Periods of `g(z) dz / y` on the genus-2 curve `y^2 = f(z)`, period
//! matrices, and the bilinear-relation form of the rank-one potential.
//!
//! A [`Cycle`] is the closed loop on the double cover obtained by running a
//! path between two branch points on one sheet and returning on the other,
//! so its period is twice the path integral on the starting sheet.
//!
//! Sheet convention: leaving the branch point `a`, the starting sheet has
//! `y ~ sheet * sqrt(f'(a)) * sqrt(z - a)` with principal square roots, where
//! a negative real argument (of either zero sign) maps to the positive
//! imaginary axis. `y` is then continued along the path.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::Poly;
use crate::riemann::HyperellipticCurve;

/// Relative clearance required between a path and any other branch point.
pub const PATH_CLEARANCE_REL: f64 = 1e-6;
const CONVERGENCE_REL: f64 = 1e-11;
const MAX_NODES: usize = 1 << 14;
const GL_ORDER: usize = 16;
pub const TAU_SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodError {
    #[error("numerator of degree {0} is not a holomorphic differential")]
    NumeratorDegree(usize),
    #[error("invalid cycle: {0}")]
    BadCycle(String),
    #[error("path passes within {distance:e} of branch point {index}")]
    PathTooClose { index: usize, distance: f64 },
    #[error("period quadrature did not converge with {nodes} nodes")]
    NonConvergence { nodes: usize },
    #[error("standard basis needs real branch points")]
    NotReal,
    #[error("A-period matrix is singular")]
    SingularA,
    #[error("basis fails the period-matrix contract: {0}")]
    InvalidBasis(String),
}

/// Principal square root sending the negative real axis to `+i`.
pub fn sqrt_p(w: C64) -> C64 {
    if w.im == 0.0 && w.re < 0.0 {
        C64::new(0.0, (-w.re).sqrt())
    } else {
        w.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclePath {
    Straight,
    /// Interior vertices between the two endpoints.
    Polyline(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub endpoints: (usize, usize),
    pub path: CyclePath,
    pub sheet: i8,
    pub orientation: i8,
}

impl Cycle {
    pub fn straight(from: usize, to: usize) -> Self {
        Cycle {
            endpoints: (from, to),
            path: CyclePath::Straight,
            sheet: 1,
            orientation: 1,
        }
    }

    pub fn polyline(from: usize, to: usize, vertices: Vec<C64>) -> Self {
        Cycle {
            path: CyclePath::Polyline(vertices),
            ..Cycle::straight(from, to)
        }
    }

    pub fn reversed(&self) -> Self {
        Cycle {
            orientation: -self.orientation,
            ..self.clone()
        }
    }

    pub fn with_orientation(mut self, orientation: i8) -> Self {
        self.orientation = orientation;
        self
    }
}

/// An integral combination of cycles, stored as a sum of signed cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSum(pub Vec<Cycle>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomologyBasis {
    pub a_cycles: [CycleSum; 2],
    pub b_cycles: [CycleSum; 2],
    pub intersection_convention: String,
}

const INTERSECTION_CONVENTION: &str = "A_i.B_j = delta_ij, A_i.A_j = B_i.B_j = 0";

impl HomologyBasis {
    /// Basis for real branch points `e1 < ... < e6`: `A1` and `A2` encircle
    /// `[e1, e2]` and `[e3, e4]`, `B2` runs over `[e4, e5]` and `B1` over
    /// `[e2, e3]` and `[e4, e5]`.
    pub fn standard_real(curve: &HyperellipticCurve) -> Result<Self, PeriodError> {
        let pts = curve.branch_points();
        let tol = 1e-12 * curve.scale();
        if pts.iter().any(|z| z.im.abs() > tol) {
            return Err(PeriodError::NotReal);
        }
        let mut idx: Vec<usize> = (0..pts.len()).collect();
        idx.sort_by(|&i, &j| pts[i].re.total_cmp(&pts[j].re));
        let e = |k: usize| idx[k - 1];
        let seg = |i: usize, j: usize, o: i8| Cycle::straight(e(i), e(j)).with_orientation(o);
        Ok(HomologyBasis {
            a_cycles: [
                CycleSum(vec![seg(1, 2, -1)]),
                CycleSum(vec![seg(3, 4, 1)]),
            ],
            b_cycles: [
                CycleSum(vec![seg(2, 3, -1), seg(4, 5, 1)]),
                CycleSum(vec![seg(4, 5, 1)]),
            ],
            intersection_convention: INTERSECTION_CONVENTION.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodVector {
    pub z: [C64; 2],
    pub w: [C64; 2],
}

impl PeriodVector {
    pub fn scaled(&self, s: C64) -> Self {
        PeriodVector {
            z: [self.z[0] * s, self.z[1] * s],
            w: [self.w[0] * s, self.w[1] * s],
        }
    }

    /// Periods on the basis `(A'; B') = M (A; B)`.
    pub fn transformed(&self, m: &SymplecticMatrix) -> Self {
        let v = [self.z[0], self.z[1], self.w[0], self.w[1]];
        let mut out = [C64::new(0.0, 0.0); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o += *vj * m.0[i][j] as f64;
            }
        }
        PeriodVector {
            z: [out[0], out[1]],
            w: [out[2], out[3]],
        }
    }
}

/// Integer 4x4 matrix acting on `(A1, A2, B1, B2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticMatrix(pub [[i64; 4]; 4]);

impl SymplecticMatrix {
    const J: [[i64; 4]; 4] = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];

    pub fn identity() -> Self {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        SymplecticMatrix(m)
    }

    /// `M J M^T = J`, i.e. the new cycles have the standard intersections.
    pub fn is_symplectic(&self) -> bool {
        let m = &self.0;
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0;
                for k in 0..4 {
                    for l in 0..4 {
                        s += m[i][k] * Self::J[k][l] * m[j][l];
                    }
                }
                if s != Self::J[i][j] {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..4).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        SymplecticMatrix(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodMatrix {
    /// `a[i][k]`: period of `omega_k` over `A_i`, with `omega = (dz/y, z dz/y)`.
    pub a: [[C64; 2]; 2],
    pub b: [[C64; 2]; 2],
    pub tau: [[C64; 2]; 2],
}

impl PeriodMatrix {
    pub fn symmetry_defect(&self) -> f64 {
        (self.tau[0][1] - self.tau[1][0]).norm()
    }

    /// Eigenvalues of the symmetrised imaginary part, ascending.
    pub fn im_tau_eigenvalues(&self) -> [f64; 2] {
        let p = self.tau[0][0].im;
        let q = 0.5 * (self.tau[0][1].im + self.tau[1][0].im);
        let r = self.tau[1][1].im;
        let mean = 0.5 * (p + r);
        let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        [mean - rad, mean + rad]
    }
}

fn check_numerator(g: &Poly) -> Result<(), PeriodError> {
    match g.degree() {
        Some(d) if d > 1 => Err(PeriodError::NumeratorDegree(d)),
        _ => Ok(()),
    }
}

fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let t = ((p - a) * d.conj()).re / d.norm_sqr();
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

/// Period of `g dz / y` over a cycle.
pub fn hyperelliptic_period(
    curve: &HyperellipticCurve,
    g: &Poly,
    cycle: &Cycle,
) -> Result<C64, PeriodError> {
    check_numerator(g)?;
    let n = curve.branch_points().len();
    let (ia, ib) = cycle.endpoints;
    if ia >= n || ib >= n || ia == ib {
        return Err(PeriodError::BadCycle(format!("endpoints {:?}", cycle.endpoints)));
    }
    if cycle.sheet.abs() != 1 || cycle.orientation.abs() != 1 {
        return Err(PeriodError::BadCycle("sheet and orientation must be +-1".into()));
    }
    if g.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    let half = match &cycle.path {
        CyclePath::Straight => straight_integral(curve, g, ia, ib, cycle.sheet)?,
        CyclePath::Polyline(v) if v.is_empty() => straight_integral(curve, g, ia, ib, cycle.sheet)?,
        CyclePath::Polyline(v) => polyline_integral(curve, g, ia, ib, v, cycle.sheet)?,
    };
    Ok(half * (2.0 * cycle.orientation as f64))
}

/// Branch of `sqrt(z - e)` continuous along a segment that misses `e`, cut
/// along the ray pointing away from the segment midpoint.
#[derive(Clone, Copy)]
struct RotatedSqrt {
    e: C64,
    rot: C64,
    rot_half: C64,
}

impl RotatedSqrt {
    fn new(e: C64, mid: C64) -> Self {
        let dir = mid - e;
        let rot = dir / dir.norm();
        RotatedSqrt {
            e,
            rot,
            rot_half: rot.sqrt(),
        }
    }

    fn eval(&self, z: C64) -> C64 {
        ((z - self.e) * self.rot.conj()).sqrt() * self.rot_half
    }
}

fn check_clearance(
    curve: &HyperellipticCurve,
    path: &[C64],
    skip: &[usize],
) -> Result<(), PeriodError> {
    let length: f64 = path.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    for (k, &e) in curve.branch_points().iter().enumerate() {
        if skip.contains(&k) {
            continue;
        }
        let distance = path
            .windows(2)
            .map(|w| segment_distance(e, w[0], w[1]))
            .fold(f64::INFINITY, f64::min);
        if distance < PATH_CLEARANCE_REL * length {
            return Err(PeriodError::PathTooClose { index: k, distance });
        }
    }
    Ok(())
}

/// `int_a^b g dz / y` on the starting sheet along the straight segment, via
/// `z = c + r cos(phi)`: the factor `r sin(phi)` of `y` cancels against `dz`.
fn straight_integral(
    curve: &HyperellipticCurve,
    g: &Poly,
    ia: usize,
    ib: usize,
    sheet: i8,
) -> Result<C64, PeriodError> {
    let pts = curve.branch_points();
    let (a, b) = (pts[ia], pts[ib]);
    check_clearance(curve, &[a, b], &[ia, ib])?;
    let c = 0.5 * (a + b);
    let r = 0.5 * (a - b);
    let others: Vec<RotatedSqrt> = (0..pts.len())
        .filter(|&k| k != ia && k != ib)
        .map(|k| RotatedSqrt::new(pts[k], c))
        .collect();
    let pi_of = |z: C64| others.iter().fold(C64::new(1.0, 0.0), |acc, s| acc * s.eval(z));

    // y = eps * i * r sin(phi) * Pi(z); fix eps against the start convention
    let target = sqrt_p(curve.f_derivative_at_branch(ia)) * sqrt_p(-r / 2.0) * sheet as f64;
    let cand = C64::new(0.0, 1.0) * r * pi_of(a);
    let eps = if (cand - target).norm() <= (cand + target).norm() { 1.0 } else { -1.0 };
    let factor = C64::new(0.0, eps);

    let midpoint_rule = |n: usize| -> (C64, f64) {
        let h = PI / n as f64;
        let mut sum = C64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for k in 0..n {
            let phi = (k as f64 + 0.5) * h;
            let z = c + r * phi.cos();
            let v = g.eval(z) / pi_of(z);
            sum += v;
            abs_sum += v.norm();
        }
        (factor * sum * h, abs_sum * h)
    };

    let mut n = 16;
    let (mut prev, _) = midpoint_rule(n / 2);
    loop {
        let (cur, scale) = midpoint_rule(n);
        if (cur - prev).norm() <= CONVERGENCE_REL * scale.max(cur.norm()) {
            return Ok(cur);
        }
        if n >= MAX_NODES {
            return Err(PeriodError::NonConvergence { nodes: n });
        }
        prev = cur;
        n *= 2;
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let step = p1 / dp;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// One piece of a polyline: `z(t)` and `z'(t)` on `t in [0, 1]`.
#[derive(Clone, Copy)]
enum Piece {
    /// Leaves a branch point: `z = p + (q - p) t^2`.
    FromBranch(C64, C64),
    /// Arrives at a branch point: `z = q + (p - q)(1 - t)^2`.
    ToBranch(C64, C64),
    Line(C64, C64),
}

impl Piece {
    fn at(&self, t: f64) -> (C64, C64) {
        match *self {
            Piece::FromBranch(p, q) => (p + (q - p) * (t * t), (q - p) * (2.0 * t)),
            Piece::ToBranch(p, q) => {
                let s = 1.0 - t;
                (q + (p - q) * (s * s), (q - p) * (2.0 * s))
            }
            Piece::Line(p, q) => (p + (q - p) * t, q - p),
        }
    }
}

fn polyline_integral(
    curve: &HyperellipticCurve,
    g: &Poly,
    ia: usize,
    ib: usize,
    interior: &[C64],
    sheet: i8,
) -> Result<C64, PeriodError> {
    let pts = curve.branch_points();
    let (a, b) = (pts[ia], pts[ib]);
    let mut path = Vec::with_capacity(interior.len() + 2);
    path.push(a);
    path.extend_from_slice(interior);
    path.push(b);
    if path.windows(2).any(|w| w[0] == w[1]) {
        return Err(PeriodError::BadCycle("repeated polyline vertex".into()));
    }
    check_clearance(curve, &path, &[ia, ib])?;
    for (k, &e) in pts.iter().enumerate() {
        if k != ia && k != ib && interior.contains(&e) {
            return Err(PeriodError::PathTooClose { index: k, distance: 0.0 });
        }
    }

    let m = path.len() - 1;
    let pieces: Vec<Piece> = (0..m)
        .map(|j| {
            let (p, q) = (path[j], path[j + 1]);
            if j == 0 && m == 1 {
                unreachable!("single segments use the straight rule")
            } else if j == 0 {
                Piece::FromBranch(p, q)
            } else if j == m - 1 {
                Piece::ToBranch(p, q)
            } else {
                Piece::Line(p, q)
            }
        })
        .collect();
    let start = sqrt_p(curve.f_derivative_at_branch(ia)) * sheet as f64;
    let (x, w) = gauss_legendre(GL_ORDER);

    let composite = |panels: usize| -> (C64, f64) {
        let mut sum = C64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut prev: Option<C64> = None;
        let h = 1.0 / panels as f64;
        for piece in &pieces {
            for p in 0..panels {
                for (xi, wi) in x.iter().zip(&w) {
                    let t = (p as f64 + 0.5 * (xi + 1.0)) * h;
                    let (z, dz) = piece.at(t);
                    let mut y = curve.f(z).sqrt();
                    let reference = prev.unwrap_or_else(|| start * sqrt_p(z - a));
                    if (y * reference.conj()).re < 0.0 {
                        y = -y;
                    }
                    prev = Some(y);
                    let v = g.eval(z) * dz / y * (0.5 * h * wi);
                    sum += v;
                    abs_sum += v.norm();
                }
            }
        }
        (sum, abs_sum)
    };

    let mut panels = 1;
    let (mut prev, _) = composite(panels);
    loop {
        panels *= 2;
        let (cur, scale) = composite(panels);
        if (cur - prev).norm() <= CONVERGENCE_REL * scale.max(cur.norm()) {
            return Ok(cur);
        }
        if panels * GL_ORDER * m >= MAX_NODES {
            return Err(PeriodError::NonConvergence {
                nodes: panels * GL_ORDER * m,
            });
        }
        prev = cur;
    }
}

pub fn class_period(
    curve: &HyperellipticCurve,
    g: &Poly,
    class: &CycleSum,
) -> Result<C64, PeriodError> {
    class
        .0
        .iter()
        .try_fold(C64::new(0.0, 0.0), |acc, c| Ok(acc + hyperelliptic_period(curve, g, c)?))
}

pub fn period_vector(
    curve: &HyperellipticCurve,
    g: &Poly,
    basis: &HomologyBasis,
) -> Result<PeriodVector, PeriodError> {
    Ok(PeriodVector {
        z: [
            class_period(curve, g, &basis.a_cycles[0])?,
            class_period(curve, g, &basis.a_cycles[1])?,
        ],
        w: [
            class_period(curve, g, &basis.b_cycles[0])?,
            class_period(curve, g, &basis.b_cycles[1])?,
        ],
    })
}

/// Periods of `dz/y` and `z dz/y` and `tau = B A^{-1}`, checked against the
/// symmetry and positivity contract.
pub fn period_matrix(
    curve: &HyperellipticCurve,
    basis: &HomologyBasis,
) -> Result<PeriodMatrix, PeriodError> {
    let pm = period_matrix_unchecked(curve, basis)?;
    let defect = pm.symmetry_defect();
    if defect > TAU_SYMMETRY_TOL {
        return Err(PeriodError::InvalidBasis(format!(
            "tau asymmetric by {defect:e}"
        )));
    }
    let ev = pm.im_tau_eigenvalues();
    if ev[0] <= 0.0 {
        return Err(PeriodError::InvalidBasis(format!(
            "Im tau not positive definite (min eigenvalue {:e})",
            ev[0]
        )));
    }
    Ok(pm)
}

pub fn period_matrix_unchecked(
    curve: &HyperellipticCurve,
    basis: &HomologyBasis,
) -> Result<PeriodMatrix, PeriodError> {
    let forms = [Poly::from_real(&[1.0]), Poly::from_real(&[0.0, 1.0])];
    let v0 = period_vector(curve, &forms[0], basis)?;
    let v1 = period_vector(curve, &forms[1], basis)?;
    let a = [[v0.z[0], v1.z[0]], [v0.z[1], v1.z[1]]];
    let b = [[v0.w[0], v1.w[0]], [v0.w[1], v1.w[1]]];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let size = a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    if det.norm() <= 1e-14 * size * size {
        return Err(PeriodError::SingularA);
    }
    let inv = [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ];
    let mut tau = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            tau[i][j] = b[i][0] * inv[0][j] + b[i][1] * inv[1][j];
        }
    }
    Ok(PeriodMatrix { a, b, tau })
}

/// `sum_i z_i(p) w_i(q) - w_i(p) z_i(q)`.
pub fn bilinear_pairing(p: &PeriodVector, q: &PeriodVector) -> C64 {
    (0..2)
        .map(|i| p.z[i] * q.w[i] - p.w[i] * q.z[i])
        .sum()
}

/// `(i/4) int alpha ^ conj(alpha)` from the periods of `alpha`:
/// `(i/4) sum (z_i conj(w_i) - w_i conj(z_i)) = 1/2 Im sum w_i conj(z_i)`.
pub fn k_from_periods(p: &PeriodVector) -> f64 {
    0.5 * (0..2).map(|i| (p.w[i] * p.z[i].conj()).im).sum::<f64>()
}

pub fn k_periods_n1(
    curve: &HyperellipticCurve,
    g: &Poly,
    basis: &HomologyBasis,
) -> Result<f64, PeriodError> {
    Ok(k_from_periods(&period_vector(curve, g, basis)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm123() -> HyperellipticCurve {
        HyperellipticCurve::from_real(&[1.0, 2.0, 3.0, -1.0, -2.0, -3.0]).unwrap()
    }

    #[test]
    fn sqrt_p_convention() {
        assert_eq!(sqrt_p(C64::new(-4.0, 0.0)), C64::new(0.0, 2.0));
        assert_eq!(sqrt_p(C64::new(-4.0, -0.0)), C64::new(0.0, 2.0));
        assert_eq!(sqrt_p(C64::new(9.0, 0.0)), C64::new(3.0, 0.0));
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(GL_ORDER);
        for k in 0..2 * GL_ORDER {
            let exact = if k % 2 == 0 { 2.0 / (k + 1) as f64 } else { 0.0 };
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            assert!((q - exact).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn zero_form_and_orientation() {
        let c = pm123();
        let cyc = Cycle::straight(0, 1);
        assert_eq!(hyperelliptic_period(&c, &Poly::zero(), &cyc).unwrap(), C64::new(0.0, 0.0));
        let g = Poly::from_real(&[1.0, 0.3]);
        let p = hyperelliptic_period(&c, &g, &cyc).unwrap();
        let q = hyperelliptic_period(&c, &g, &cyc.reversed()).unwrap();
        assert_eq!(p, -q);
        let s = hyperelliptic_period(&c, &g, &Cycle { sheet: -1, ..cyc }).unwrap();
        assert_eq!(p, -s);
    }

    #[test]
    fn real_segment_period_magnitude() {
        // on (1, 2) f > 0; |period| = 2 int_1^2 dz / sqrt(f)
        let c = pm123();
        let p = hyperelliptic_period(&c, &Poly::from_real(&[1.0]), &Cycle::straight(0, 1)).unwrap();
        let n = 200_000;
        let mut s = 0.0;
        for k in 0..n {
            // z = 1.5 - 0.5 cos(phi) removes both endpoint singularities
            let phi = (k as f64 + 0.5) * PI / n as f64;
            let z = 1.5 - 0.5 * phi.cos();
            let h = (z + 1.0) * (z + 2.0) * (z + 3.0) * (3.0 - z);
            s += 1.0 / h.sqrt();
        }
        s *= PI / n as f64;
        assert!((p.norm() - 2.0 * s).abs() < 1e-10 * s);
        assert!(p.im.abs() < 1e-14 * p.norm());
    }

    #[test]
    fn rejects_bad_cycles() {
        let c = pm123();
        let g = Poly::from_real(&[1.0]);
        // 1 -> 3 passes through 2
        assert!(matches!(
            hyperelliptic_period(&c, &g, &Cycle::straight(0, 2)),
            Err(PeriodError::PathTooClose { index: 1, .. })
        ));
        assert!(matches!(
            hyperelliptic_period(&c, &g, &Cycle::straight(0, 0)),
            Err(PeriodError::BadCycle(_))
        ));
        assert!(matches!(
            hyperelliptic_period(&c, &Poly::from_real(&[0.0, 0.0, 1.0]), &Cycle::straight(0, 1)),
            Err(PeriodError::NumeratorDegree(2))
        ));
    }

    #[test]
    fn polyline_agrees_with_straight_segment() {
        let c = pm123();
        let g = Poly(vec![C64::new(0.4, -0.2), C64::new(1.0, 0.5)]);
        let straight = hyperelliptic_period(&c, &g, &Cycle::straight(0, 1)).unwrap();
        for bend in [0.05, 0.2, -0.3] {
            let cyc = Cycle::polyline(0, 1, vec![C64::new(1.4, bend), C64::new(1.7, 0.5 * bend)]);
            let poly = hyperelliptic_period(&c, &g, &cyc).unwrap();
            assert!((poly - straight).norm() < 1e-9 * straight.norm(), "bend {bend}");
        }
    }

    #[test]
    fn standard_basis_satisfies_contract() {
        let c = pm123();
        let basis = HomologyBasis::standard_real(&c).unwrap();
        let pm = period_matrix(&c, &basis).unwrap();
        assert!(pm.symmetry_defect() < 1e-12);
        assert!(pm.im_tau_eigenvalues()[0] > 0.0);
    }

    #[test]
    fn involution_symmetry_of_tau() {
        // z -> -z fixes omega_1 and negates omega_2 up to sheet, forcing tau_11 = 2 tau_12
        let c = pm123();
        let pm = period_matrix(&c, &HomologyBasis::standard_real(&c).unwrap()).unwrap();
        assert!((pm.tau[0][0] - 2.0 * pm.tau[0][1]).norm() < 1e-8);
        assert!(pm.a[1][1].norm() < 1e-12 * pm.a[0][1].norm());
    }

    #[test]
    fn pairing_of_holomorphic_forms_vanishes() {
        let c = HyperellipticCurve::from_real(&[-2.5, -1.1, 0.2, 0.9, 2.0, 3.7]).unwrap();
        let basis = HomologyBasis::standard_real(&c).unwrap();
        let p = period_vector(&c, &Poly::from_real(&[1.0]), &basis).unwrap();
        let q = period_vector(&c, &Poly::from_real(&[0.0, 1.0]), &basis).unwrap();
        assert_eq!(bilinear_pairing(&p, &p), C64::new(0.0, 0.0));
        assert_eq!(bilinear_pairing(&p, &q), -bilinear_pairing(&q, &p));
        assert!(bilinear_pairing(&p, &q).norm() < 1e-8);
    }

    #[test]
    fn symplectic_change_of_basis() {
        let t = SymplecticMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 1, 0], [1, 2, 0, 1]]);
        let s = SymplecticMatrix([[0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1]]);
        let bad = SymplecticMatrix([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert!(t.is_symplectic() && s.is_symplectic() && t.mul(&s).is_symplectic());
        assert!(!bad.is_symplectic());
        let c = pm123();
        let basis = HomologyBasis::standard_real(&c).unwrap();
        let g = Poly(vec![C64::new(1.0, 0.2), C64::new(-0.5, 0.1)]);
        let pv = period_vector(&c, &g, &basis).unwrap();
        let k = k_from_periods(&pv);
        for m in [t, s, t.mul(&s)] {
            let k2 = k_from_periods(&pv.transformed(&m));
            assert!((k2 - k).abs() < 1e-10 * k);
        }
    }

    #[test]
    fn k_periods_homogeneity() {
        let c = pm123();
        let basis = HomologyBasis::standard_real(&c).unwrap();
        let g = Poly::from_real(&[1.0, 0.25]);
        let lam = C64::new(-1.5, 0.75);
        let k = k_periods_n1(&c, &g, &basis).unwrap();
        let kl = k_periods_n1(&c, &g.scale(lam), &basis).unwrap();
        assert!(k > 0.0);
        assert!((kl - lam.norm_sqr() * k).abs() < 1e-12 * kl);
        assert_eq!(k_periods_n1(&c, &Poly::zero(), &basis).unwrap(), 0.0);
    }
}
