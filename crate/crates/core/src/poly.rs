//! Dense univariate complex polynomials, constant coefficient first.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: C64) -> Self {
        Poly(vec![c])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// `prod (z - r)`.
    pub fn from_roots(roots: &[C64]) -> Self {
        roots.iter().fold(Poly::constant(C64::new(1.0, 0.0)), |acc, &r| {
            acc * Poly(vec![-r, C64::new(1.0, 0.0)])
        })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.0
    }

    /// Coefficient of `z^k`, zero past the stored length.
    pub fn coeff(&self, k: usize) -> C64 {
        self.0.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    /// Degree ignoring exactly-zero leading coefficients; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| *c != C64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.0
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn scale(&self, s: C64) -> Self {
        Poly(self.0.iter().map(|&c| c * s).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient moduli times powers of `|z|`; a scale for `|p(z)|`.
    pub fn abs_scale_at(&self, z: C64) -> f64 {
        let r = z.norm();
        self.0.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// `p(z / mu)` as a polynomial in `z`.
    pub fn compose_scale(&self, mu: C64) -> Self {
        let inv = C64::new(1.0, 0.0) / mu;
        let mut pow = C64::new(1.0, 0.0);
        Poly(
            self.0
                .iter()
                .map(|&c| {
                    let out = c * pow;
                    pow *= inv;
                    out
                })
                .collect(),
        )
    }

    /// Finite roots of a polynomial of degree at most two, ignoring exactly
    /// vanishing leading coefficients.
    pub fn roots_upto_quadratic(&self) -> Vec<C64> {
        match self.degree() {
            None | Some(0) => Vec::new(),
            Some(1) => vec![-self.coeff(0) / self.coeff(1)],
            Some(2) => {
                let (c0, c1, c2) = (self.coeff(0), self.coeff(1), self.coeff(2));
                let disc = (c1 * c1 - c0 * c2 * 4.0).sqrt();
                // choose the sign avoiding cancellation, then use Vieta
                let q = if (c1.conj() * disc).re >= 0.0 {
                    -(c1 + disc) / 2.0
                } else {
                    -(c1 - disc) / 2.0
                };
                if q == C64::new(0.0, 0.0) {
                    vec![C64::new(0.0, 0.0); 2]
                } else {
                    vec![q / c2, c0 / q]
                }
            }
            Some(d) => panic!("roots_upto_quadratic called on degree {d}"),
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.into_iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.0.len() + rhs.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_are_roots() {
        let p = Poly(vec![C64::new(5.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let roots = p.roots_upto_quadratic();
        assert_eq!(roots.len(), 2);
        for r in roots {
            assert!(p.eval(r).norm() < 1e-13);
            assert!((r.norm() - 5f64.sqrt()).abs() < 1e-14);
        }
        let lin = Poly::from_real(&[2.0, -4.0, 0.0]);
        assert_eq!(lin.roots_upto_quadratic(), vec![C64::new(0.5, 0.0)]);
    }

    #[test]
    fn from_roots_and_scale_composition() {
        let p = Poly::from_roots(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        assert_eq!(p, Poly::from_real(&[2.0, -3.0, 1.0]));
        let mu = C64::new(0.5, 2.0);
        let q = p.compose_scale(mu);
        let z = C64::new(0.3, -0.7);
        assert!((q.eval(z) - p.eval(z / mu)).norm() < 1e-14);
    }
}
