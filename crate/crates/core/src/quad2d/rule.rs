//! Tensor-product Gauss–Kronrod 7/15 rule on parameter rectangles.

/// Kronrod abscissae on [-1, 1], non-negative half; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub(crate) const NODES: usize = 15;

/// The 15 Kronrod nodes on [-1, 1] in increasing order, with Kronrod and
/// Gauss weights (zero where the node is not a Gauss node).
pub(crate) struct Rule1d {
    pub x: [f64; NODES],
    pub wk: [f64; NODES],
    pub wg: [f64; NODES],
}

pub(crate) const fn rule() -> Rule1d {
    let mut x = [0.0; NODES];
    let mut wk = [0.0; NODES];
    let mut wg = [0.0; NODES];
    let mut i = 0;
    while i < 8 {
        // left half (and centre) then mirrored right half
        x[i] = -XGK[i];
        wk[i] = WGK[i];
        x[NODES - 1 - i] = XGK[i];
        wk[NODES - 1 - i] = WGK[i];
        if i % 2 == 1 {
            wg[i] = WG[i / 2];
            wg[NODES - 1 - i] = WG[i / 2];
        }
        i += 1;
    }
    Rule1d { x, wk, wg }
}

pub(crate) static RULE: Rule1d = rule();

/// Applies the tensor rule to `g` on `[u0, u1] x [v0, v1]`; returns the
/// Kronrod value and the Gauss value.
pub(crate) fn tensor_gk15<G>(mut g: G, u0: f64, u1: f64, v0: f64, v1: f64) -> (f64, f64)
where
    G: FnMut(f64, f64) -> f64,
{
    let (uc, uh) = (0.5 * (u0 + u1), 0.5 * (u1 - u0));
    let (vc, vh) = (0.5 * (v0 + v1), 0.5 * (v1 - v0));
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for i in 0..NODES {
        let u = uc + uh * RULE.x[i];
        let mut row_k = 0.0;
        let mut row_g = 0.0;
        for j in 0..NODES {
            let v = vc + vh * RULE.x[j];
            let val = g(u, v);
            row_k += RULE.wk[j] * val;
            row_g += RULE.wg[j] * val;
        }
        kron += RULE.wk[i] * row_k;
        gauss += RULE.wg[i] * row_g;
    }
    let area = uh * vh;
    (kron * area, gauss * area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate_1d(weights: &[f64; NODES], p: impl Fn(f64) -> f64) -> f64 {
        (0..NODES).map(|i| weights[i] * p(RULE.x[i])).sum()
    }

    #[test]
    fn weights_sum_to_two() {
        assert!((RULE.wk.iter().sum::<f64>() - 2.0).abs() < 1e-15);
        assert!((RULE.wg.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_exactness() {
        // Kronrod-15 is exact through degree 22, Gauss-7 through degree 13
        for k in 0..=22 {
            let exact = if k % 2 == 0 { 2.0 / (k + 1) as f64 } else { 0.0 };
            let kr = integrate_1d(&RULE.wk, |x| x.powi(k));
            assert!((kr - exact).abs() < 1e-14, "kronrod degree {k}");
            if k <= 13 {
                let ga = integrate_1d(&RULE.wg, |x| x.powi(k));
                assert!((ga - exact).abs() < 1e-14, "gauss degree {k}");
            }
        }
    }

    #[test]
    fn tensor_rule_on_rectangle() {
        let (k, g) = tensor_gk15(|u, v| u * u * v + 1.0, 0.0, 2.0, -1.0, 3.0);
        // int_0^2 int_-1^3 (u^2 v + 1) = (8/3)(4) + 8
        let exact = 8.0 / 3.0 * 4.0 + 8.0;
        assert!((k - exact).abs() < 1e-13);
        assert!((g - exact).abs() < 1e-13);
    }
}
