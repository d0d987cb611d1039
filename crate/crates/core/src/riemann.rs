//! Genus-2 hyperelliptic base curves, sections of `K` and `K^2`, and the
//! singularity strata of rank-2 spectral curves over them.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::Poly;

/// Relative gap below which two branch points count as coincident.
pub const BRANCH_GAP_REL: f64 = 1e-9;
/// Relative tolerance for "vanishes at a branch point" and "has a double root".
pub const STRATUM_TOL_REL: f64 = 1e-8;
/// Values between `tol` and `AMBIGUITY_FACTOR * tol` cannot be classified.
pub const AMBIGUITY_FACTOR: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiemannError {
    #[error("a genus-2 curve needs exactly 6 branch points, got {0}")]
    BranchCount(usize),
    #[error("branch points {i} and {j} coincide (gap {gap:e})")]
    CoincidentBranchPoints { i: usize, j: usize, gap: f64 },
    #[error("non-finite branch point {0}")]
    NonFinite(usize),
    #[error("section of K^{m} must have numerator degree <= {max}, got {got}")]
    SectionDegree { m: u32, max: usize, got: usize },
    #[error("unsupported tensor power {0} (only 1 and 2)")]
    TensorPower(u32),
    #[error("evaluation at branch point {0} divides by zero")]
    AtBranchPoint(usize),
    #[error("rank {rank} family is inconsistent: {reason}")]
    Family { rank: u32, reason: &'static str },
    #[error("ambiguous classification: {quantity} = {value:e} lies between tol {tol:e} and {factor}x tol; supply exact input or a smaller tolerance")]
    Ambiguous {
        quantity: String,
        value: f64,
        tol: f64,
        factor: f64,
    },
    #[error("inconsistent singularity data: {0}")]
    Inconsistent(String),
}

/// `y^2 = f(z) = (z - z_1) ... (z - z_6)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperellipticCurve {
    branch: Vec<C64>,
}

impl HyperellipticCurve {
    pub fn new(branch: Vec<C64>) -> Result<Self, RiemannError> {
        if branch.len() != 6 {
            return Err(RiemannError::BranchCount(branch.len()));
        }
        if let Some(i) = branch.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(RiemannError::NonFinite(i));
        }
        let scale = branch.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..6 {
            for j in (i + 1)..6 {
                let gap = (branch[i] - branch[j]).norm();
                if gap <= BRANCH_GAP_REL * scale {
                    return Err(RiemannError::CoincidentBranchPoints { i, j, gap });
                }
            }
        }
        Ok(Self { branch })
    }

    pub fn from_real(branch: &[f64]) -> Result<Self, RiemannError> {
        Self::new(branch.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn branch_points(&self) -> &[C64] {
        &self.branch
    }

    pub fn genus(&self) -> i64 {
        2
    }

    /// `max(1, max |z_i|)`.
    pub fn scale(&self) -> f64 {
        self.branch.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }

    pub fn f(&self, z: C64) -> C64 {
        self.branch.iter().map(|&b| z - b).product()
    }

    pub fn f_poly(&self) -> Poly {
        Poly::from_roots(&self.branch)
    }

    /// `f'(z_i) = prod_{k != i} (z_i - z_k)`.
    pub fn f_derivative_at_branch(&self, i: usize) -> C64 {
        let zi = self.branch[i];
        self.branch
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &b)| zi - b)
            .product()
    }

    /// `sheet * sqrt(f(z))` with the principal square root.
    pub fn y(&self, z: C64, sheet: i8) -> C64 {
        let root = self.f(z).sqrt();
        if sheet < 0 {
            -root
        } else {
            root
        }
    }

    pub fn branch_index_at(&self, z: C64) -> Option<usize> {
        let scale = self.scale();
        self.branch
            .iter()
            .position(|&b| (b - z).norm() <= BRANCH_GAP_REL * scale)
    }

    /// The same curve with every branch point multiplied by `mu`.
    pub fn scaled(&self, mu: C64) -> Result<Self, RiemannError> {
        Self::new(self.branch.iter().map(|&b| b * mu).collect())
    }

    pub fn translated(&self, shift: C64) -> Result<Self, RiemannError> {
        Self::new(self.branch.iter().map(|&b| b + shift).collect())
    }
}

/// Which denominator turns the numerator into a section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    /// `numerator(z) dz / y`
    Y,
    /// `numerator(z) dz^2 / f`
    F,
}

/// A holomorphic section of `K^m` (`m = 1, 2`) on the genus-2 curve, stored
/// through its polynomial numerator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionKm {
    m: u32,
    numerator: Poly,
    denominator: Denominator,
}

impl SectionKm {
    pub fn new(m: u32, numerator: Poly) -> Result<Self, RiemannError> {
        let (max, denominator) = match m {
            1 => (1, Denominator::Y),
            2 => (2, Denominator::F),
            _ => return Err(RiemannError::TensorPower(m)),
        };
        if let Some(d) = numerator.degree() {
            if d > max {
                return Err(RiemannError::SectionDegree { m, max, got: d });
            }
        }
        Ok(Self {
            m,
            numerator,
            denominator,
        })
    }

    /// `(d_0 + d_1 z) dz / y`.
    pub fn one_form(numerator: Poly) -> Result<Self, RiemannError> {
        Self::new(1, numerator)
    }

    /// `(c_0 + c_1 z + c_2 z^2) dz^2 / f`.
    pub fn quadratic(numerator: Poly) -> Result<Self, RiemannError> {
        Self::new(2, numerator)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> Denominator {
        self.denominator
    }

    /// Number of complex coefficients parametrizing `H^0(K^m)`.
    pub fn dimension(&self) -> usize {
        self.m as usize + 1
    }

    /// Coefficients padded to the full dimension of `H^0(K^m)`.
    pub fn padded_coeffs(&self) -> Vec<C64> {
        (0..self.dimension()).map(|k| self.numerator.coeff(k)).collect()
    }
}

/// Value of the section in the `dz^m` trivialization on the given sheet.
pub fn section_eval(
    sec: &SectionKm,
    z: C64,
    sheet: i8,
    curve: &HyperellipticCurve,
) -> Result<C64, RiemannError> {
    if let Some(i) = curve.branch_index_at(z) {
        return Err(RiemannError::AtBranchPoint(i));
    }
    let num = sec.numerator.eval(z);
    Ok(match sec.denominator {
        Denominator::Y => num / curve.y(z, sheet),
        Denominator::F => num / curve.f(z),
    })
}

/// Spectral data over the base curve: `x = a_1` (rank 1, with `a_1` the
/// one-form) or `x^2 + a_1 x + a_2 = 0` (rank 2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFamily {
    curve: HyperellipticCurve,
    rank: u32,
    a1: Option<SectionKm>,
    a2: Option<SectionKm>,
}

impl SpectralFamily {
    pub fn rank1(curve: HyperellipticCurve, a1: SectionKm) -> Result<Self, RiemannError> {
        if a1.m() != 1 {
            return Err(RiemannError::Family {
                rank: 1,
                reason: "a1 must be a section of K",
            });
        }
        Ok(Self {
            curve,
            rank: 1,
            a1: Some(a1),
            a2: None,
        })
    }

    pub fn rank2(
        curve: HyperellipticCurve,
        a1: Option<SectionKm>,
        a2: SectionKm,
    ) -> Result<Self, RiemannError> {
        if a1.as_ref().is_some_and(|s| s.m() != 1) {
            return Err(RiemannError::Family {
                rank: 2,
                reason: "a1 must be a section of K",
            });
        }
        if a2.m() != 2 {
            return Err(RiemannError::Family {
                rank: 2,
                reason: "a2 must be a section of K^2",
            });
        }
        Ok(Self {
            curve,
            rank: 2,
            a1,
            a2: Some(a2),
        })
    }

    /// Traceless rank-2 family `x^2 + P dz^2/f = 0`.
    pub fn sl2(curve: HyperellipticCurve, p: Poly) -> Result<Self, RiemannError> {
        Self::rank2(curve, None, SectionKm::quadratic(p)?)
    }

    pub fn curve(&self) -> &HyperellipticCurve {
        &self.curve
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn a1(&self) -> Option<&SectionKm> {
        self.a1.as_ref()
    }

    pub fn a2(&self) -> Option<&SectionKm> {
        self.a2.as_ref()
    }

    pub fn is_traceless(&self) -> bool {
        self.a1.as_ref().is_none_or(|s| s.numerator().is_zero())
    }

    /// Numerator `D^2 - 4P` of the discriminant `a_1^2 - 4 a_2 = (D^2 - 4P) dz^2 / f`.
    ///
    /// Completing the square `(x + a_1/2)^2 = (a_1^2 - 4a_2)/4` shows the
    /// singularities of a rank-2 spectral curve depend on this alone.
    pub fn discriminant_numerator(&self) -> Option<Poly> {
        let a2 = self.a2.as_ref()?;
        let four_p = a2.numerator().scale(C64::new(4.0, 0.0));
        Some(match &self.a1 {
            Some(a1) => {
                let d = a1.numerator();
                &(d * d) - &four_p
            }
            None => -four_p,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StratumKind {
    #[serde(rename = "smooth")]
    Smooth,
    #[serde(rename = "B1-node")]
    B1Node,
    #[serde(rename = "B2-branch-pair")]
    B2BranchPair,
    #[serde(rename = "B2-involution-pair")]
    B2InvolutionPair,
    #[serde(rename = "non-ordinary")]
    NonOrdinary,
    #[serde(rename = "degenerate")]
    Degenerate,
}

impl fmt::Display for StratumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StratumKind::Smooth => "smooth",
            StratumKind::B1Node => "B1-node",
            StratumKind::B2BranchPair => "B2-branch-pair",
            StratumKind::B2InvolutionPair => "B2-involution-pair",
            StratumKind::NonOrdinary => "non-ordinary",
            StratumKind::Degenerate => "degenerate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    /// Location on the base; `None` is the point at infinity.
    pub z: Option<C64>,
    pub multiplicity: u32,
    pub at_branch_point: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub kind: StratumKind,
    pub singular_points: Vec<SingularPoint>,
    pub arithmetic_genus: i64,
    /// Absent when the singularities are not ordinary.
    pub normalization_genus: Option<i64>,
    pub codim_count: i64,
    /// 1-based branch-point indices labelling the component.
    pub component_label: Option<Vec<usize>>,
}

/// `n^2 (g - 1) + 1`.
pub fn arithmetic_genus(n: i64, g: i64) -> Result<i64, RiemannError> {
    if n < 1 || g < 2 {
        return Err(RiemannError::Inconsistent(format!(
            "arithmetic genus needs n >= 1 and g >= 2, got n = {n}, g = {g}"
        )));
    }
    Ok(n * n * (g - 1) + 1)
}

/// `sum m (m - 1) / 2` over ordinary singular points.
pub fn delta_dimension(mults: &[i64]) -> Result<i64, RiemannError> {
    mults.iter().try_fold(0, |acc, &m| {
        if m < 2 {
            Err(RiemannError::Inconsistent(format!(
                "singular multiplicity must be >= 2, got {m}"
            )))
        } else {
            Ok(acc + m * (m - 1) / 2)
        }
    })
}

/// Genus of the normalization of a curve with ordinary singularities.
pub fn normalization_genus(g_s: i64, mults: &[i64]) -> Result<i64, RiemannError> {
    if g_s < 0 {
        return Err(RiemannError::Inconsistent(format!(
            "arithmetic genus must be >= 0, got {g_s}"
        )));
    }
    let genus = g_s - delta_dimension(mults)?;
    if genus < 0 {
        return Err(RiemannError::Inconsistent(format!(
            "normalization genus {genus} < 0"
        )));
    }
    Ok(genus)
}

/// Both sides of `n^2(g-1) + 1 - (2g-2) n(n-1)/2 = n(g-1) + 1` for the
/// fixed locus of the `Z_n` action: `2g - 2` ordinary `n`-fold points.
pub fn zn_genus_identity(n: i64, g: i64) -> Result<(i64, i64), RiemannError> {
    // for n = 1 the action is trivial and there are no singular points
    let count = if n >= 2 { (2 * g - 2).max(0) as usize } else { 0 };
    let mults = vec![n; count];
    let lhs = normalization_genus(arithmetic_genus(n, g)?, &mults)?;
    Ok((lhs, n * (g - 1) + 1))
}

/// Component labels of the codimension-one and codimension-two strata.
pub fn enumerate_strata(curve: &HyperellipticCurve) -> (Vec<usize>, Vec<(usize, usize)>) {
    let n = curve.branch_points().len();
    let b1 = (1..=n).collect();
    let b2 = (1..=n)
        .flat_map(|i| ((i + 1)..=n).map(move |j| (i, j)))
        .collect();
    (b1, b2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Zero,
    NonZero,
}

fn judge(quantity: impl FnOnce() -> String, value: f64, tol: f64) -> Result<Verdict, RiemannError> {
    if value <= tol {
        Ok(Verdict::Zero)
    } else if value > AMBIGUITY_FACTOR * tol {
        Ok(Verdict::NonZero)
    } else {
        Err(RiemannError::Ambiguous {
            quantity: quantity(),
            value,
            tol,
            factor: AMBIGUITY_FACTOR,
        })
    }
}

/// Classifies a rank-2 spectral curve over the genus-2 base by the roots of
/// the discriminant numerator on the projective line.
///
/// Roots missing from a numerator of degree `< 2` sit at infinity, which is
/// not a branch point. Vanishing is judged on `|P(z_i)|` relative to
/// `sum |c_k| |z_i|^k` and on the discriminant `c_1^2 - 4 c_0 c_2` relative
/// to `max |c_k|^2`.
pub fn classify_stratum(fam: &SpectralFamily) -> Result<StratumRecord, RiemannError> {
    let p = fam.discriminant_numerator().ok_or(RiemannError::Family {
        rank: fam.rank(),
        reason: "classification needs a rank-2 family",
    })?;
    classify_numerator(fam.curve(), &p, STRATUM_TOL_REL)
}

/// Classification of `x^2 = P dz^2/f` for a numerator of degree at most two.
pub fn classify_numerator(
    curve: &HyperellipticCurve,
    p: &Poly,
    tol: f64,
) -> Result<StratumRecord, RiemannError> {
    let g_s = arithmetic_genus(2, curve.genus())?;
    if let Some(d) = p.degree() {
        if d > 2 {
            return Err(RiemannError::SectionDegree { m: 2, max: 2, got: d });
        }
    }
    if p.is_zero() {
        return Ok(StratumRecord {
            kind: StratumKind::Degenerate,
            singular_points: Vec::new(),
            arithmetic_genus: g_s,
            normalization_genus: None,
            codim_count: 0,
            component_label: None,
        });
    }
    let (c0, c1, c2) = (p.coeff(0), p.coeff(1), p.coeff(2));
    let cmax = p.max_abs_coeff();
    let disc = c1 * c1 - c0 * c2 * 4.0;
    let double = judge(|| "relative discriminant".into(), disc.norm() / (cmax * cmax), tol)?
        == Verdict::Zero;

    let mut at_branch = Vec::new();
    for (i, &zi) in curve.branch_points().iter().enumerate() {
        let rel = p.eval(zi).norm() / p.abs_scale_at(zi);
        if judge(|| format!("relative |P(z_{})|", i + 1), rel, tol)? == Verdict::Zero {
            at_branch.push(i);
        }
    }
    if at_branch.len() > 2 || (double && at_branch.len() > 1) {
        return Err(RiemannError::Inconsistent(format!(
            "numerator of degree <= 2 vanishes at branch points {at_branch:?}"
        )));
    }

    let node = |z: Option<C64>, at_branch_point: bool| SingularPoint {
        z,
        multiplicity: 2,
        at_branch_point,
    };
    let branch = |i: usize| node(Some(curve.branch_points()[i]), true);

    let (kind, singular_points, label) = if double {
        if let Some(&i) = at_branch.first() {
            (StratumKind::NonOrdinary, vec![branch(i)], Some(vec![i + 1]))
        } else {
            // double root, at infinity when the quadratic coefficient is negligible
            let loc = if c2.norm() <= tol * cmax {
                None
            } else {
                Some(-c1 / (c2 * 2.0))
            };
            (
                StratumKind::B2InvolutionPair,
                vec![node(loc, false), node(loc, false)],
                None,
            )
        }
    } else {
        match at_branch.as_slice() {
            [] => (StratumKind::Smooth, Vec::new(), None),
            [i] => (StratumKind::B1Node, vec![branch(*i)], Some(vec![i + 1])),
            [i, j] => (
                StratumKind::B2BranchPair,
                vec![branch(*i), branch(*j)],
                Some(vec![i + 1, j + 1]),
            ),
            _ => unreachable!("at most two branch roots"),
        }
    };

    let mults: Vec<i64> = singular_points
        .iter()
        .map(|s| s.multiplicity as i64)
        .collect();
    let codim_count = delta_dimension(&mults)?;
    let normalization = match kind {
        StratumKind::NonOrdinary | StratumKind::Degenerate => None,
        _ => Some(normalization_genus(g_s, &mults)?),
    };
    Ok(StratumRecord {
        kind,
        singular_points,
        arithmetic_genus: g_s,
        normalization_genus: normalization,
        codim_count,
        component_label: label,
    })
}
