//! Characteristic polynomials, power sums and the group actions on spectral
//! coefficients.
//!
//! A [`CharPoly`] of rank `n` stores `(a_1, ..., a_n)` for
//! `x^n + a_1 x^{n-1} + ... + a_n`, with `a_0 = 1` implicit, so that
//! `a_k = (-1)^k e_k(roots)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative gap below which two interpolation nodes count as coincident.
pub const NODE_GAP_REL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SymAlgError {
    #[error("rank must be at least 1")]
    EmptyRank,
    #[error("degenerate scaling: lambda = 0")]
    ZeroScale,
    #[error("interpolation nodes {i} and {j} coincide (gap {gap:e}): spectrum is not simple")]
    CoincidentNodes { i: usize, j: usize, gap: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    a: Vec<C64>,
}

impl CharPoly {
    pub fn new(a: Vec<C64>) -> Result<Self, SymAlgError> {
        if a.is_empty() {
            return Err(SymAlgError::EmptyRank);
        }
        Ok(Self { a })
    }

    /// The monic polynomial whose roots are `roots` (with multiplicity).
    pub fn from_roots(roots: &[C64]) -> Result<Self, SymAlgError> {
        if roots.is_empty() {
            return Err(SymAlgError::EmptyRank);
        }
        // full[k] is the coefficient of x^{n-k}
        let mut full = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = full.clone();
            next.push(C64::new(0.0, 0.0));
            for k in 1..next.len() {
                next[k] -= r * full[k - 1];
            }
            full = next;
        }
        Ok(Self { a: full[1..].to_vec() })
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// `(a_1, ..., a_n)`.
    pub fn coeffs(&self) -> &[C64] {
        &self.a
    }

    /// `a_k` for `0 <= k <= n`, with `a_0 = 1`.
    pub fn coeff(&self, k: usize) -> C64 {
        if k == 0 {
            C64::new(1.0, 0.0)
        } else {
            self.a[k - 1]
        }
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.a.iter().fold(C64::new(1.0, 0.0), |acc, &c| acc * x + c)
    }

    /// `s_x = n x^{n-1} + (n-1) a_1 x^{n-2} + ... + a_{n-1}`.
    pub fn eval_derivative(&self, x: C64) -> C64 {
        let n = self.rank();
        (0..n).fold(C64::new(0.0, 0.0), |acc, k| {
            acc * x + self.coeff(k) * (n - k) as f64
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.a.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Power sums `b_j = sum_i lambda_i^j`, `j = 1..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSums {
    b: Vec<C64>,
}

impl PowerSums {
    pub fn new(b: Vec<C64>) -> Result<Self, SymAlgError> {
        if b.is_empty() {
            return Err(SymAlgError::EmptyRank);
        }
        Ok(Self { b })
    }

    pub fn rank(&self) -> usize {
        self.b.len()
    }

    pub fn sums(&self) -> &[C64] {
        &self.b
    }
}

/// The cyclic orbit `(gamma, sigma^* gamma, ..., (sigma^{n-1})^* gamma)`
/// evaluated at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitValues {
    gamma: Vec<C64>,
}

impl OrbitValues {
    pub fn new(gamma: Vec<C64>) -> Result<Self, SymAlgError> {
        if gamma.is_empty() {
            return Err(SymAlgError::EmptyRank);
        }
        Ok(Self { gamma })
    }

    pub fn values(&self) -> &[C64] {
        &self.gamma
    }

    pub fn rotated(&self, by: usize) -> Self {
        let mut gamma = self.gamma.clone();
        let len = gamma.len();
        gamma.rotate_left(by % len);
        Self { gamma }
    }
}

/// Newton's identities: `sum_{j=1}^k b_j a_{k-j} = -k a_k`.
pub fn power_sums_from_coeffs(p: &CharPoly) -> PowerSums {
    let n = p.rank();
    let mut b: Vec<C64> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = p.coeff(k) * k as f64;
        for j in 1..k {
            acc += b[j - 1] * p.coeff(k - j);
        }
        b.push(-acc);
    }
    PowerSums { b }
}

/// Inverse Newton recursion `a_k = -(1/k) sum_{j=1}^k b_j a_{k-j}`.
pub fn coeffs_from_power_sums(s: &PowerSums) -> CharPoly {
    let n = s.rank();
    // a[0] = 1
    let mut a = vec![C64::new(1.0, 0.0)];
    for k in 1..=n {
        let acc: C64 = (1..=k).map(|j| s.b[j - 1] * a[k - j]).sum();
        a.push(-acc / k as f64);
    }
    CharPoly { a: a[1..].to_vec() }
}

/// Coefficients `(c_{n-1}, ..., c_0)` of `-(a_1 x^{n-1} + 2 a_2 x^{n-2} + ... + n a_n)`,
/// the reduction of `x s_x` modulo `s`.
pub fn taut_form_coeffs(p: &CharPoly) -> Vec<C64> {
    p.coeffs()
        .iter()
        .enumerate()
        .map(|(i, &a)| -a * (i + 1) as f64)
        .collect()
}

/// Evaluates a polynomial given highest-degree coefficient first.
pub fn horner_desc(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// Evaluates a polynomial given constant coefficient first.
pub fn horner_asc(coeffs: &[C64], x: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// `sum_{j=1}^n b_j (x^{n-j} + a_1 x^{n-j-1} + ... + a_{n-j})` at `x = lambda`.
///
/// Each bracket is the truncated Horner value of `s`, so the inner sums are
/// accumulated incrementally.
pub fn biso_eval(p: &CharPoly, b: &[C64], lambda: C64) -> C64 {
    let n = p.rank();
    assert_eq!(b.len(), n, "b must have one entry per rank");
    // trunc[m] = x^m + a_1 x^{m-1} + ... + a_m
    let mut trunc = Vec::with_capacity(n);
    let mut acc = C64::new(1.0, 0.0);
    trunc.push(acc);
    for m in 1..n {
        acc = acc * lambda + p.coeff(m);
        trunc.push(acc);
    }
    (1..=n).map(|j| b[j - 1] * trunc[n - j]).sum()
}

/// Maps `x^n + a_1 x^{n-1} + ... + a_n` to `(x - alpha)^n + a_1 (x - alpha)^{n-1} + ... + a_n`,
/// shifting every root by `+alpha`.
pub fn translate_coeffs(p: &CharPoly, alpha: C64) -> CharPoly {
    let n = p.rank();
    // out[k] is the coefficient of x^{n-k}
    let mut out = vec![C64::new(0.0, 0.0); n + 1];
    for i in 0..=n {
        // a_i (x - alpha)^{n-i}; binomial coefficients built incrementally
        let deg = n - i;
        let ai = p.coeff(i);
        let mut binom = 1.0;
        let mut pow = C64::new(1.0, 0.0);
        for m in 0..=deg {
            // term: C(deg, m) (-alpha)^m x^{deg-m}
            out[i + m] += ai * binom * pow;
            binom = binom * (deg - m) as f64 / (m + 1) as f64;
            pow *= -alpha;
        }
    }
    CharPoly { a: out[1..].to_vec() }
}

/// The C*-action `a_m -> lambda^m a_m`; roots scale by `lambda`.
pub fn cstar_scale(p: &CharPoly, lambda: C64) -> Result<CharPoly, SymAlgError> {
    if lambda == C64::new(0.0, 0.0) {
        return Err(SymAlgError::ZeroScale);
    }
    let mut pow = C64::new(1.0, 0.0);
    let a = p
        .coeffs()
        .iter()
        .map(|&c| {
            pow *= lambda;
            c * pow
        })
        .collect();
    Ok(CharPoly { a })
}

/// Coefficients `c_0, ..., c_{n-1}` of the polynomial `q` with `q(lambda_1) = 1`
/// and `q(lambda_i) = 0` for `i > 1`.
///
/// `q(x) = prod_{i>1} (x - lambda_i) / s_x(lambda_1)`, so the coefficient of
/// `x^i` is `(-1)^{n-1-i} tau_{n-1-i} / s_x(lambda_1)` with `tau_k` the
/// elementary symmetric functions of `lambda_2, ..., lambda_n`.
pub fn lagrange_interpolant(nodes: &[C64]) -> Result<Vec<C64>, SymAlgError> {
    let n = nodes.len();
    if n == 0 {
        return Err(SymAlgError::EmptyRank);
    }
    let scale = nodes.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (nodes[i] - nodes[j]).norm();
            if gap <= NODE_GAP_REL * scale {
                return Err(SymAlgError::CoincidentNodes { i, j, gap });
            }
        }
    }
    let first = nodes[0];
    // ascending coefficients of prod_{i>1} (x - lambda_i)
    let mut num = vec![C64::new(1.0, 0.0)];
    let mut denom = C64::new(1.0, 0.0);
    for &r in &nodes[1..] {
        let mut next = vec![C64::new(0.0, 0.0); num.len() + 1];
        for (k, &c) in num.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= r * c;
        }
        num = next;
        denom *= first - r;
    }
    Ok(num.into_iter().map(|c| c / denom).collect())
}

/// The monic polynomial `prod_k (x - gamma_k)` of a cyclic orbit.
pub fn orbit_charpoly(o: &OrbitValues) -> CharPoly {
    // constructed from a non-empty orbit, so this cannot fail
    CharPoly::from_roots(o.values()).expect("orbit is non-empty")
}

/// Elementary symmetric functions `e_0 = 1, e_1, ..., e_m` of `values`.
pub fn elementary_symmetric(values: &[C64]) -> Vec<C64> {
    let mut e = vec![C64::new(1.0, 0.0)];
    for &v in values {
        e.push(C64::new(0.0, 0.0));
        for k in (1..e.len()).rev() {
            let prev = e[k - 1];
            e[k] += v * prev;
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn r(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn power_sums_small_cases() {
        let p = CharPoly::new(vec![r(0.0), r(-1.0)]).unwrap();
        assert!(close(power_sums_from_coeffs(&p).sums(), &[r(0.0), r(2.0)], 1e-15));

        // roots 1 and 2: b1 = 3, b2 = 1 + 4
        let p = CharPoly::new(vec![r(-3.0), r(2.0)]).unwrap();
        assert!(close(power_sums_from_coeffs(&p).sums(), &[r(3.0), r(5.0)], 1e-15));

        let cval = c(0.3, -1.2);
        let p = CharPoly::new(vec![-cval]).unwrap();
        assert!(close(power_sums_from_coeffs(&p).sums(), &[cval], 1e-15));
    }

    #[test]
    fn coeffs_from_power_sums_small_cases() {
        let s = PowerSums::new(vec![r(0.0), r(2.0)]).unwrap();
        assert!(close(coeffs_from_power_sums(&s).coeffs(), &[r(0.0), r(-1.0)], 1e-15));
        let s = PowerSums::new(vec![r(3.0), r(5.0)]).unwrap();
        assert!(close(coeffs_from_power_sums(&s).coeffs(), &[r(-3.0), r(2.0)], 1e-15));
        let s = PowerSums::new(vec![r(0.0); 5]).unwrap();
        assert!(close(coeffs_from_power_sums(&s).coeffs(), &[r(0.0); 5], 0.0));
    }

    #[test]
    fn taut_form_rank_two() {
        let p = CharPoly::new(vec![r(0.0), r(-1.0)]).unwrap();
        assert!(close(&taut_form_coeffs(&p), &[r(0.0), r(2.0)], 0.0));
        let p = CharPoly::new(vec![c(1.5, 2.0)]).unwrap();
        assert!(close(&taut_form_coeffs(&p), &[c(-1.5, -2.0)], 0.0));
    }

    #[test]
    fn biso_rank_one_and_two() {
        let p = CharPoly::new(vec![c(0.7, 0.1)]).unwrap();
        assert_eq!(biso_eval(&p, &[c(2.0, -1.0)], c(9.0, 4.0)), c(2.0, -1.0));
        let p = CharPoly::new(vec![r(0.0), r(-1.0)]).unwrap();
        let v = biso_eval(&p, &[r(0.0), r(2.0)], r(1.0));
        assert!((v - r(2.0)).norm() < 1e-15);
    }

    #[test]
    fn translate_examples() {
        let p = CharPoly::new(vec![r(0.0), r(-1.0)]).unwrap();
        assert_eq!(translate_coeffs(&p, r(0.0)), p);
        let t = translate_coeffs(&p, r(1.0));
        assert!(close(t.coeffs(), &[r(-2.0), r(0.0)], 1e-15));
    }

    #[test]
    fn cstar_examples() {
        let p = CharPoly::new(vec![r(-3.0), r(2.0)]).unwrap();
        assert_eq!(cstar_scale(&p, r(1.0)).unwrap(), p);
        let s = cstar_scale(&p, r(2.0)).unwrap();
        assert!(close(s.coeffs(), &[r(-6.0), r(8.0)], 0.0));
        assert_eq!(cstar_scale(&p, r(0.0)), Err(SymAlgError::ZeroScale));
    }

    #[test]
    fn lagrange_examples() {
        assert!(close(&lagrange_interpolant(&[c(3.0, 1.0)]).unwrap(), &[r(1.0)], 0.0));
        let q = lagrange_interpolant(&[r(2.0), r(0.0)]).unwrap();
        assert!(close(&q, &[r(0.0), r(0.5)], 1e-15));
        assert!(matches!(
            lagrange_interpolant(&[r(1.0), r(2.0), r(1.0 + 1e-12)]),
            Err(SymAlgError::CoincidentNodes { i: 0, j: 2, .. })
        ));
    }

    #[test]
    fn lagrange_coefficients_match_shifted_tau_index() {
        // coefficient of x^i is (-1)^{n-1-i} tau_{n-1-i} / s_x(lambda_1)
        let nodes = [c(0.4, 0.2), c(-1.1, 0.5), c(0.9, -0.8), c(0.1, 1.3)];
        let n = nodes.len();
        let q = lagrange_interpolant(&nodes).unwrap();
        let tau = elementary_symmetric(&nodes[1..]);
        let p = CharPoly::from_roots(&nodes).unwrap();
        let sx = p.eval_derivative(nodes[0]);
        for i in 0..n {
            let k = n - 1 - i;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let expected = tau[k] * sign / sx;
            assert!((q[i] - expected).norm() < 1e-12, "i = {i}");
        }
    }

    #[test]
    fn orbit_plus_minus_pair() {
        let g = c(0.6, -0.3);
        let p = orbit_charpoly(&OrbitValues::new(vec![g, -g]).unwrap());
        assert!(close(p.coeffs(), &[r(0.0), -(g * g)], 1e-15));
    }

    #[test]
    fn elementary_symmetric_matches_from_roots() {
        let roots = [c(1.0, 2.0), c(-0.5, 0.1), c(2.0, -1.0)];
        let e = elementary_symmetric(&roots);
        let p = CharPoly::from_roots(&roots).unwrap();
        for k in 1..=3 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((p.coeff(k) - e[k] * sign).norm() < 1e-14);
        }
    }

    #[test]
    fn empty_rank_rejected() {
        assert_eq!(CharPoly::new(vec![]), Err(SymAlgError::EmptyRank));
        assert_eq!(PowerSums::new(vec![]), Err(SymAlgError::EmptyRank));
        assert!(lagrange_interpolant(&[]).is_err());
    }
}
