//! Adaptive quadrature over the whole complex plane for nonnegative densities
//! with isolated `1/|z - z0|` singularities and algebraic decay at infinity.
//!
//! The square `[-R, R]^2` is tiled by a tensor grid whose lines pass through
//! every special point, so special points are always cell corners. Cells
//! touching a special point are split into two Duffy triangles collapsing on
//! that corner; in Duffy coordinates the Jacobian cancels a `1/|z - z0|`
//! singularity and straightens a `|z - z0|` kink. The exterior of the square
//! is covered by four polar pieces in the variable `s = rho_sq(phi) / |z|`.
//! Every cell is integrated with a tensor Gauss–Kronrod 7/15 rule and the
//! cells carrying the largest `|K15 - G7|` are split until the summed estimate
//! falls below `tol * |value|`.

mod potentials;
mod rule;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use potentials::{
    gl2_density, k_direct_gl2, k_direct_n1, k_direct_sl2, n1_density, sl2_density,
};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const MIN_TOL: f64 = 1e-10;
pub const MAX_TOL: f64 = 1e-2;
pub const DEFAULT_MAX_CELLS: usize = 400_000;

/// Special points closer than this (relative to the geometry scale) are merged.
const MERGE_REL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("tolerance {0} outside [1e-10, 1e-2]")]
    InvalidTolerance(f64),
    #[error("density is not integrable: {0}")]
    NonIntegrable(String),
    #[error("density returned {value} at z = {z}")]
    NonFinite { z: C64, value: f64 },
    #[error("cell budget of {max_cells} exhausted at value {value:e} with error estimate {error:e}")]
    BudgetExhausted {
        max_cells: usize,
        value: f64,
        error: f64,
    },
    #[error("numerator of degree {found} exceeds the allowed {allowed}")]
    SectionDegree { found: usize, allowed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialPoint {
    pub z: C64,
    /// Local behaviour `|z - z0|^order`; `-1` is a pole-like singularity,
    /// positive orders mark zeros of the density (kinks).
    pub order: i32,
}

#[derive(Clone)]
pub struct PlaneDensity {
    evaluator: Arc<dyn Fn(C64) -> f64 + Send + Sync>,
    special: Vec<SpecialPoint>,
    decay_order: i32,
}

impl fmt::Debug for PlaneDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlaneDensity")
            .field("special", &self.special)
            .field("decay_order", &self.decay_order)
            .finish_non_exhaustive()
    }
}

impl PlaneDensity {
    pub fn new<F>(evaluator: F, decay_order: i32) -> Self
    where
        F: Fn(C64) -> f64 + Send + Sync + 'static,
    {
        PlaneDensity {
            evaluator: Arc::new(evaluator),
            special: Vec::new(),
            decay_order,
        }
    }

    pub fn with_point(mut self, z: C64, order: i32) -> Self {
        self.special.push(SpecialPoint { z, order });
        self
    }

    pub fn with_points(mut self, zs: &[C64], order: i32) -> Self {
        self.special
            .extend(zs.iter().map(|&z| SpecialPoint { z, order }));
        self
    }

    pub fn special_points(&self) -> &[SpecialPoint] {
        &self.special
    }

    pub fn decay_order(&self) -> i32 {
        self.decay_order
    }

    pub fn eval(&self, z: C64) -> f64 {
        (self.evaluator)(z)
    }

    /// Multiplies the density by a nonnegative constant.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = Arc::clone(&self.evaluator);
        PlaneDensity {
            evaluator: Arc::new(move |z| c * inner(z)),
            special: self.special.clone(),
            decay_order: self.decay_order,
        }
    }

    /// The density `z -> d(z - shift)` with special points moved by `shift`.
    pub fn translated(&self, shift: C64) -> Self {
        let inner = Arc::clone(&self.evaluator);
        PlaneDensity {
            evaluator: Arc::new(move |z| inner(z - shift)),
            special: self
                .special
                .iter()
                .map(|p| SpecialPoint {
                    z: p.z + shift,
                    order: p.order,
                })
                .collect(),
            decay_order: self.decay_order,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub cells_evaluated: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub tol: f64,
    pub max_cells: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: DEFAULT_TOL,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadConfig {
            tol,
            ..Default::default()
        }
    }
}

pub fn integrate_plane(d: &PlaneDensity, tol: f64) -> Result<QuadResult, QuadError> {
    integrate_plane_with(d, &QuadConfig::with_tol(tol))
}

pub fn integrate_plane_with(d: &PlaneDensity, cfg: &QuadConfig) -> Result<QuadResult, QuadError> {
    validate(d, cfg)?;
    let special = merge_points(&d.special);
    let mut cells = initial_cells(&special);
    let mut evaluated = cells.len();
    evaluate_all(d, &mut cells)?;

    loop {
        let values: Vec<f64> = cells.iter().map(|c| c.value).collect();
        let errors: Vec<f64> = cells.iter().map(|c| c.err).collect();
        let total = pairwise_sum(&values);
        let errsum = pairwise_sum(&errors);
        let target = cfg.tol * total.abs();
        if errsum <= target {
            return Ok(QuadResult {
                value: total.max(0.0),
                abs_error_estimate: errsum,
                cells_evaluated: evaluated,
            });
        }
        if cells.len() >= cfg.max_cells {
            return Err(QuadError::BudgetExhausted {
                max_cells: cfg.max_cells,
                value: total,
                error: errsum,
            });
        }

        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| errors[b].total_cmp(&errors[a]).then(a.cmp(&b)));
        let excess = errsum - target;
        let room = (cfg.max_cells - cells.len()).div_ceil(3).max(1);
        let mut chosen = vec![false; cells.len()];
        let mut acc = 0.0;
        for &i in order.iter().take(room) {
            chosen[i] = true;
            acc += errors[i];
            if acc >= excess {
                break;
            }
        }

        let picked: Vec<usize> = (0..cells.len()).filter(|&i| chosen[i]).collect();
        let children: Vec<Result<Vec<Cell>, QuadError>> = picked
            .par_iter()
            .map(|&i| {
                let mut kids = cells[i].split();
                for k in kids.iter_mut() {
                    k.evaluate(d)?;
                }
                Ok(kids)
            })
            .collect();

        let mut next = Vec::with_capacity(cells.len() + 3 * picked.len());
        let mut kid_iter = children.into_iter();
        for (i, cell) in cells.into_iter().enumerate() {
            if chosen[i] {
                let kids = kid_iter.next().expect("one child set per chosen cell")?;
                evaluated += kids.len();
                next.extend(kids);
            } else {
                next.push(cell);
            }
        }
        cells = next;
    }
}

fn validate(d: &PlaneDensity, cfg: &QuadConfig) -> Result<(), QuadError> {
    if !(MIN_TOL..=MAX_TOL).contains(&cfg.tol) {
        return Err(QuadError::InvalidTolerance(cfg.tol));
    }
    if d.decay_order < 3 {
        return Err(QuadError::NonIntegrable(format!(
            "decay order {} < 3",
            d.decay_order
        )));
    }
    for p in &d.special {
        if p.order <= -2 {
            return Err(QuadError::NonIntegrable(format!(
                "singular order {} at {}",
                p.order, p.z
            )));
        }
        if !(p.z.re.is_finite() && p.z.im.is_finite()) {
            return Err(QuadError::NonIntegrable(format!(
                "special point {} is not finite",
                p.z
            )));
        }
    }
    Ok(())
}

fn geometry_scale(points: &[SpecialPoint]) -> f64 {
    1.0 + points.iter().map(|p| p.z.norm()).fold(0.0, f64::max)
}

/// Merges coincident special points, summing their orders.
fn merge_points(points: &[SpecialPoint]) -> Vec<SpecialPoint> {
    let tol = MERGE_REL * geometry_scale(points);
    let mut out: Vec<SpecialPoint> = Vec::new();
    for p in points {
        match out.iter_mut().find(|q| (q.z - p.z).norm() <= tol) {
            Some(q) => q.order += p.order,
            None => out.push(*p),
        }
    }
    out
}

/// Sorted grid coordinates through `vals` and `+-r`, with nearby values
/// merged and no gap wider than `r / 4`.
fn grid_lines(vals: impl Iterator<Item = f64>, r: f64, merge: f64) -> Vec<f64> {
    let mut raw: Vec<f64> = vals.chain([-r, r]).collect();
    raw.sort_by(f64::total_cmp);
    let mut lines: Vec<f64> = Vec::new();
    for v in raw {
        match lines.last() {
            Some(&last) if v - last <= merge => {}
            _ => lines.push(v),
        }
    }
    let max_gap = r / 4.0;
    let mut filled = Vec::with_capacity(lines.len() * 2);
    for w in lines.windows(2) {
        filled.push(w[0]);
        let pieces = ((w[1] - w[0]) / max_gap).ceil().max(1.0) as usize;
        for k in 1..pieces {
            filled.push(w[0] + (w[1] - w[0]) * k as f64 / pieces as f64);
        }
    }
    filled.push(*lines.last().expect("grid has at least two lines"));
    filled
}

fn snap(v: f64, lines: &[f64]) -> f64 {
    lines
        .iter()
        .copied()
        .min_by(|a, b| (a - v).abs().total_cmp(&(b - v).abs()))
        .unwrap_or(v)
}

fn initial_cells(special: &[SpecialPoint]) -> Vec<Cell> {
    let scale = geometry_scale(special);
    let r = 2.0 * scale;
    let merge = MERGE_REL * scale;
    let xs = grid_lines(special.iter().map(|p| p.z.re), r, merge);
    let ys = grid_lines(special.iter().map(|p| p.z.im), r, merge);
    let corners: Vec<C64> = special
        .iter()
        .map(|p| C64::new(snap(p.z.re, &xs), snap(p.z.im, &ys)))
        .collect();

    let mut cells = Vec::new();
    for j in 0..ys.len() - 1 {
        for i in 0..xs.len() - 1 {
            decompose(xs[i], xs[i + 1], ys[j], ys[j + 1], &corners, &mut cells);
        }
    }
    for k in 0..4 {
        let phi0 = -PI / 4.0 + k as f64 * PI / 2.0;
        cells.push(Cell::new(
            Chart::Exterior { r },
            0.0,
            1.0,
            phi0,
            phi0 + PI / 2.0,
        ));
    }
    cells
}

fn decompose(x0: f64, x1: f64, y0: f64, y1: f64, corners: &[C64], out: &mut Vec<Cell>) {
    let rect = [
        C64::new(x0, y0),
        C64::new(x1, y0),
        C64::new(x1, y1),
        C64::new(x0, y1),
    ];
    let hits: Vec<usize> = (0..4).filter(|&k| corners.contains(&rect[k])).collect();
    match hits.len() {
        0 => out.push(Cell::new(Chart::Plane, x0, x1, y0, y1)),
        1 => {
            let (w, h) = (x1 - x0, y1 - y0);
            let p = rect[hits[0]];
            if w > 2.0 * h {
                // cut an h-by-h square at the special end
                let (sq, rest) = if p.re == x0 {
                    ((x0, x0 + h), (x0 + h, x1))
                } else {
                    ((x1 - h, x1), (x0, x1 - h))
                };
                push_duffy(sq.0, sq.1, y0, y1, p, out);
                out.push(Cell::new(Chart::Plane, rest.0, rest.1, y0, y1));
            } else if h > 2.0 * w {
                let (sq, rest) = if p.im == y0 {
                    ((y0, y0 + w), (y0 + w, y1))
                } else {
                    ((y1 - w, y1), (y0, y1 - w))
                };
                push_duffy(x0, x1, sq.0, sq.1, p, out);
                out.push(Cell::new(Chart::Plane, x0, x1, rest.0, rest.1));
            } else {
                push_duffy(x0, x1, y0, y1, p, out);
            }
        }
        _ => {
            // each quadrant keeps exactly one original corner
            let (xm, ym) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            decompose(x0, xm, y0, ym, corners, out);
            decompose(xm, x1, y0, ym, corners, out);
            decompose(xm, x1, ym, y1, corners, out);
            decompose(x0, xm, ym, y1, corners, out);
        }
    }
}

/// Two Duffy triangles `(p, c1, o)` and `(p, o, c2)` covering the rectangle.
fn push_duffy(x0: f64, x1: f64, y0: f64, y1: f64, p: C64, out: &mut Vec<Cell>) {
    let o = C64::new(x0 + x1 - p.re, y0 + y1 - p.im);
    let c1 = C64::new(o.re, p.im);
    let c2 = C64::new(p.re, o.im);
    for (a, b) in [(c1, o), (o, c2)] {
        let e1 = a - p;
        let d = b - a;
        let jac = (e1.conj() * d).im.abs();
        out.push(Cell::new(Chart::Duffy { p, e1, d, jac }, 0.0, 1.0, 0.0, 1.0));
    }
}

#[derive(Debug, Clone, Copy)]
enum Chart {
    Plane,
    /// `z = p + u (e1 + v d)`, Jacobian `u * jac`.
    Duffy { p: C64, e1: C64, d: C64, jac: f64 },
    /// `z = (rho_sq(phi) / s) e^{i phi}` outside the square of half-width `r`.
    Exterior { r: f64 },
}

impl Chart {
    #[inline]
    fn map(&self, u: f64, v: f64) -> (C64, f64) {
        match *self {
            Chart::Plane => (C64::new(u, v), 1.0),
            Chart::Duffy { p, e1, d, jac } => (p + (e1 + d * v) * u, u * jac),
            Chart::Exterior { r } => {
                let (sn, cs) = v.sin_cos();
                let rs = r / cs.abs().max(sn.abs());
                let rho = rs / u;
                (C64::new(rho * cs, rho * sn), rs * rs / (u * u * u))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    chart: Chart,
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
    value: f64,
    err: f64,
}

impl Cell {
    fn new(chart: Chart, u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Cell {
            chart,
            u0,
            u1,
            v0,
            v1,
            value: 0.0,
            err: 0.0,
        }
    }

    fn evaluate(&mut self, d: &PlaneDensity) -> Result<(), QuadError> {
        let mut bad: Option<(C64, f64)> = None;
        let chart = self.chart;
        let (k, g) = rule::tensor_gk15(
            |u, v| {
                let (z, jac) = chart.map(u, v);
                let val = d.eval(z);
                if !val.is_finite() || val < 0.0 {
                    bad.get_or_insert((z, val));
                    return 0.0;
                }
                val * jac
            },
            self.u0,
            self.u1,
            self.v0,
            self.v1,
        );
        if let Some((z, value)) = bad {
            return Err(QuadError::NonFinite { z, value });
        }
        self.value = k;
        self.err = (k - g).abs();
        Ok(())
    }

    fn split(&self) -> Vec<Cell> {
        let (um, vm) = (0.5 * (self.u0 + self.u1), 0.5 * (self.v0 + self.v1));
        let c = |u0, u1, v0, v1| Cell::new(self.chart, u0, u1, v0, v1);
        if let Chart::Plane = self.chart {
            let (w, h) = (self.u1 - self.u0, self.v1 - self.v0);
            if w > 2.0 * h {
                return vec![c(self.u0, um, self.v0, self.v1), c(um, self.u1, self.v0, self.v1)];
            }
            if h > 2.0 * w {
                return vec![c(self.u0, self.u1, self.v0, vm), c(self.u0, self.u1, vm, self.v1)];
            }
        }
        vec![
            c(self.u0, um, self.v0, vm),
            c(um, self.u1, self.v0, vm),
            c(um, self.u1, vm, self.v1),
            c(self.u0, um, vm, self.v1),
        ]
    }
}

fn evaluate_all(d: &PlaneDensity, cells: &mut [Cell]) -> Result<(), QuadError> {
    cells.par_iter_mut().try_for_each(|c| c.evaluate(d))
}

/// Pairwise summation in a fixed tree order.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
