//! Airy functions Ai, Bi and their derivatives for real argument.
//!
//! * `-6 ≤ z ≤ 4`: Maclaurin series (Bi and Bi′ up to `z = 8`, where all
//!   terms are positive and there is no cancellation).
//! * `z > 8` and `z < -8`: asymptotic expansions in `ζ = (2/3)|z|^{3/2}`,
//!   exponential and trigonometric form respectively, truncated at the
//!   smallest term.
//! * `4 < z ≤ 8` (Ai, Ai′) and `-8 ≤ z < -6` (all four): Taylor expansion of
//!   the Airy equation `y″ = z y` about the anchor `±8`, seeded with the
//!   asymptotic values there. This bridges the band where the Maclaurin
//!   series loses digits to cancellation and the asymptotic series has not
//!   yet reached full precision.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::{Error, Result};

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`
const AI0: f64 = 0.355_028_053_887_817_24;
/// `-Ai′(0) = 3^{-1/3} / Γ(1/3)`
const DAI0: f64 = 0.258_819_403_792_806_8;
const SQRT3: f64 = 1.732_050_807_568_877_2;

const ANCHOR: f64 = 8.0;
const MACLAURIN_NEG: f64 = -6.0;
const MACLAURIN_POS_AI: f64 = 4.0;

/// Validated argument range; Bi overflows `f64` shortly past the upper end.
pub const Z_MIN: f64 = -1.0e4;
pub const Z_MAX: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValues {
    pub ai: f64,
    pub bi: f64,
    pub dai: f64,
    pub dbi: f64,
}

impl AiryValues {
    /// `Ai·Bi′ - Ai′·Bi`, which equals `1/π`.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.dbi - self.dai * self.bi
    }
}

pub fn airy(z: f64) -> Result<AiryValues> {
    if !(Z_MIN..=Z_MAX).contains(&z) {
        return Err(Error::AiryOutOfRange {
            z,
            min: Z_MIN,
            max: Z_MAX,
        });
    }
    let values = if z > ANCHOR {
        asymptotic_positive(z)
    } else if z > MACLAURIN_POS_AI {
        let (ai, dai) = anchored_ai(z);
        let (bi, dbi) = maclaurin(z).bi();
        AiryValues { ai, bi, dai, dbi }
    } else if z >= MACLAURIN_NEG {
        let series = maclaurin(z);
        let (ai, dai) = series.ai();
        let (bi, dbi) = series.bi();
        AiryValues { ai, bi, dai, dbi }
    } else if z >= -ANCHOR {
        let anchor = asymptotic_negative(ANCHOR);
        let (ai, dai) = taylor_shift(-ANCHOR, anchor.ai, anchor.dai, z);
        let (bi, dbi) = taylor_shift(-ANCHOR, anchor.bi, anchor.dbi, z);
        AiryValues { ai, bi, dai, dbi }
    } else {
        asymptotic_negative(-z)
    };
    Ok(values)
}

fn anchored_ai(z: f64) -> (f64, f64) {
    let anchor = asymptotic_positive(ANCHOR);
    taylor_shift(ANCHOR, anchor.ai, anchor.dai, z)
}

/// The two standard power-series solutions of `y″ = z y` and their
/// derivatives: `f = 1 + z³/6 + …`, `g = z + z⁴/12 + …`.
struct Maclaurin {
    f: f64,
    df: f64,
    g: f64,
    dg: f64,
}

impl Maclaurin {
    fn ai(&self) -> (f64, f64) {
        (AI0 * self.f - DAI0 * self.g, AI0 * self.df - DAI0 * self.dg)
    }

    fn bi(&self) -> (f64, f64) {
        (
            SQRT3 * (AI0 * self.f + DAI0 * self.g),
            SQRT3 * (AI0 * self.df + DAI0 * self.dg),
        )
    }
}

fn maclaurin(z: f64) -> Maclaurin {
    let z3 = z * z * z;
    // f_k = z^{3k} Π (3j-2) / (3k)!, g_k = z^{3k+1} Π (3j-1) / (3k+1)!
    let (mut tf, mut tg) = (1.0, z);
    // derivative terms: 3k f_k / z and (3k+1) g_k / z, written without 1/z
    let (mut tdf, mut tdg) = (0.0, 1.0);
    let (mut f, mut g, mut df, mut dg) = (tf, tg, tdf, tdg);
    for k in 1..400 {
        let k3 = 3.0 * k as f64;
        tf *= z3 / ((k3 - 1.0) * k3);
        tg *= z3 / (k3 * (k3 + 1.0));
        tdf = if k == 1 { z * z / 2.0 } else { tdf * z3 / ((k3 - 3.0) * (k3 - 1.0)) };
        tdg *= z3 / ((k3 - 2.0) * k3);
        f += tf;
        g += tg;
        df += tdf;
        dg += tdg;
        let small = |t: f64, s: f64| t.abs() <= 1e-17 * s.abs();
        if small(tf, f) && small(tg, g) && small(tdf, df) && small(tdg, dg) {
            break;
        }
        if z == 0.0 {
            break;
        }
    }
    Maclaurin { f, df, g, dg }
}

/// Coefficients `u_k` of the asymptotic expansions; `v_k = -(6k+1)/(6k-1) u_k`.
fn asymptotic_coefficients() -> &'static [(f64, f64)] {
    use std::sync::OnceLock;
    static COEFFS: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut out = Vec::with_capacity(64);
        let mut u = 1.0;
        out.push((1.0, 1.0));
        for k in 1..64 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
            out.push((u, v));
        }
        out
    })
}

/// Sums `Σ sign_k c_k ζ^{-k}` for the `u` and `v` coefficients, stopping at
/// the smallest term. `sign(k)` selects which terms enter and with what sign.
fn truncated_sums(zeta: f64, sign: impl Fn(usize) -> f64) -> (f64, f64) {
    let coeffs = asymptotic_coefficients();
    let (mut su, mut sv) = (0.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut power = 1.0;
    for (k, &(u, v)) in coeffs.iter().enumerate() {
        let size = (u * power).abs().max((v * power).abs());
        if size > prev || size < 1e-18 {
            break;
        }
        let s = sign(k);
        su += s * u * power;
        sv += s * v * power;
        prev = size;
        power /= zeta;
    }
    (su, sv)
}

fn asymptotic_positive(z: f64) -> AiryValues {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let quarter = z.sqrt().sqrt();
    let norm = PI.sqrt();
    let (dec_u, dec_v) = truncated_sums(zeta, |k| if k % 2 == 0 { 1.0 } else { -1.0 });
    let (inc_u, inc_v) = truncated_sums(zeta, |_| 1.0);
    let decay = (-zeta).exp();
    let grow = zeta.exp();
    AiryValues {
        ai: decay / (2.0 * norm * quarter) * dec_u,
        dai: -quarter * decay / (2.0 * norm) * dec_v,
        bi: grow / (norm * quarter) * inc_u,
        dbi: quarter * grow / norm * inc_v,
    }
}

/// Values at `z = -x` for `x > 0`.
fn asymptotic_negative(x: f64) -> AiryValues {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let quarter = x.sqrt().sqrt();
    let norm = PI.sqrt();
    // even terms with alternating signs: k = 0, 2, 4, … → +, -, +, …
    let (eu, ev) = truncated_sums(zeta, |k| match k % 4 {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    });
    // odd terms: k = 1, 3, 5, … → +, -, +, …
    let (ou, ov) = truncated_sums(zeta, |k| match k % 4 {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    });
    let (sin, cos) = (zeta - FRAC_PI_4).sin_cos();
    AiryValues {
        ai: (cos * eu + sin * ou) / (norm * quarter),
        dai: quarter / norm * (sin * ev - cos * ov),
        bi: (-sin * eu + cos * ou) / (norm * quarter),
        dbi: quarter / norm * (cos * ev + sin * ov),
    }
}

/// Evaluates the solution of `y″ = z y` with `y(z0) = y0`, `y′(z0) = dy0`
/// at `z` from its Taylor series about `z0`.
fn taylor_shift(z0: f64, y0: f64, dy0: f64, z: f64) -> (f64, f64) {
    let h = z - z0;
    // c_{n+2} = (z0 c_n + c_{n-1}) / ((n+2)(n+1))
    let (mut c_prev, mut c_cur, mut c_next) = (0.0, y0, dy0);
    let mut hp = 1.0; // h^n for the current coefficient c_cur = c_n
    let (mut y, mut dy) = (0.0, 0.0);
    let mut quiet = 0;
    for n in 0..500usize {
        let term = c_cur * hp;
        y += term;
        // derivative: n c_n h^{n-1} = n c_n hp / h, accumulated as (n+1) c_{n+1} h^n
        let dterm = (n as f64 + 1.0) * c_next * hp;
        dy += dterm;
        let nf = n as f64;
        let c_after = (z0 * c_cur + c_prev) / ((nf + 2.0) * (nf + 1.0));
        c_prev = c_cur;
        c_cur = c_next;
        c_next = c_after;
        hp *= h;
        if term.abs() <= 1e-18 * y.abs() && dterm.abs() <= 1e-18 * dy.abs() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if h == 0.0 {
            break;
        }
    }
    (y, dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_PI;

    // reference values from an independent arbitrary-precision evaluation
    const REFERENCE: &[(f64, [f64; 4])] = &[
        (-30.0, [-0.0879681884568421628, 1.22862060263748513, -0.22444694220056632, -0.483694725827681493]),
        (-10.0, [0.0402412384864431907, 0.996265044132790056, -0.314679829643838633, 0.119414113399909238]),
        (-8.5, [-0.330290237630208879, -0.0323133482846391359, 0.00775443644765840443, -0.962969165120174798]),
        (-7.0, [0.184280835250505637, -0.771008168410126548, 0.29376207185441402, 0.498244590058113489]),
        (-6.5, [-0.238020301997115804, -0.674952492513202173, 0.261012657636483952, -0.597170666291622017]),
        (-6.0, [-0.329145173629823105, 0.345935487281342895, -0.146698376670557038, -0.812898785105067]),
        (-5.0, [0.35076100902411432, 0.327192818554443137, -0.138369134901600577, 0.778411773001899246]),
        (-2.0, [0.227407428201685576, 0.618259020741691041, -0.412302587956398488, 0.278795166921169523]),
        (-1.0, [0.535560883292352119, -0.0101605671166452094, 0.103997389496944612, 0.592375626422792351]),
        (0.0, [0.355028053887817239, -0.258819403792806798, 0.614926627446000735, 0.448288357353826358]),
        (0.5, [0.23169360648083349, -0.224910532664683893, 0.854277043103155493, 0.544572564140592302]),
        (1.0, [0.135292416312881416, -0.159147441296793213, 1.20742359495287126, 0.932435933392775633]),
        (2.0, [0.0349241304232743791, -0.0530903844336536317, 3.29809499997821471, 4.10068204993288989]),
        (4.0, [0.000951563851204801874, -0.0019586409502041789, 83.8470714084681399, 161.926683504613402]),
        (4.5, [0.000330250323514308984, -0.000717866567557508889, 227.588081835599718, 469.135077327966398]),
        (5.0, [0.000108344428136074417, -0.000247413890868462476, 657.792044171171182, 1435.81908021798252]),
        (6.0, [9.94769436025288957e-6, -0.0000247652003970349548, 6536.44610480986345, 15725.6026219304768]),
        (7.0, [7.49212886399716708e-7, -2.00815089473879199e-6, 80327.790709430247, 209552.67087397132]),
        (8.0, [4.69220761609923163e-8, -1.34143929790678657e-7, 1199586.00412445993, 3354342.31274453888]),
        (9.5, [5.33026370461749163e-10, -1.65663945937406663e-9, 96892265.5804510928, 296034763.868005039]),
        (10.0, [1.10475325528986859e-10, -3.52063367673892364e-10, 455641153.548225141, 1429236134.48286578]),
        (20.0, [1.69167286867054031e-27, -7.58639162574835496e-27, 2.10376504965110381e+25, 9.38183933613396435e+25]),
        (30.0, [3.20821759155049557e-49, -1.75987658143272598e-48, 9.05728851215130695e+46, 4.95330451289129904e+47]),
    ];

    fn close(got: f64, want: f64) -> bool {
        // absolute 1e-10 for O(1) values, relative beyond
        (got - want).abs() <= 1e-10 * want.abs().max(1.0)
    }

    #[test]
    fn matches_reference_table() {
        for &(z, [ai, dai, bi, dbi]) in REFERENCE {
            let v = airy(z).unwrap();
            assert!(close(v.ai, ai), "Ai({z}) = {} vs {ai}", v.ai);
            assert!(close(v.dai, dai), "Ai'({z}) = {} vs {dai}", v.dai);
            assert!(close(v.bi, bi), "Bi({z}) = {} vs {bi}", v.bi);
            assert!(close(v.dbi, dbi), "Bi'({z}) = {} vs {dbi}", v.dbi);
            if z > 0.0 {
                // exponentially small: demand relative accuracy as well
                assert!((v.ai - ai).abs() <= 1e-11 * ai.abs(), "Ai({z}) rel");
                assert!((v.dai - dai).abs() <= 1e-11 * dai.abs(), "Ai'({z}) rel");
            }
        }
    }

    #[test]
    fn values_at_origin() {
        let v = airy(0.0).unwrap();
        assert!((v.ai - 0.3550280539).abs() < 1e-10);
        assert!((v.bi - 0.6149266274).abs() < 1e-10);
        assert!((v.dai + 0.2588194038).abs() < 1e-10);
    }

    #[test]
    fn wronskian_is_one_over_pi() {
        let mut z = -30.0;
        while z <= 30.0 {
            let w = airy(z).unwrap().wronskian();
            assert!((w - FRAC_1_PI).abs() < 1e-10, "W({z}) = {w}");
            z += 0.01;
        }
    }

    #[test]
    fn first_zero_of_ai() {
        let (mut lo, mut hi) = (-2.4, -2.3);
        assert!(airy(lo).unwrap().ai * airy(hi).unwrap().ai < 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if airy(mid).unwrap().ai > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((lo - (-2.3381074105)).abs() < 1e-9);
        assert!(airy(-2.3381074105).unwrap().ai.abs() < 1e-9);
    }

    #[test]
    fn satisfies_airy_equation() {
        let h = 1e-3;
        for z in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            let f = |x: f64| airy(x).unwrap().ai;
            let second = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
            assert!((second - z * f(z)).abs() < 1e-6, "z = {z}");
        }
    }

    #[test]
    fn continuous_across_method_boundaries() {
        for edge in [-ANCHOR, MACLAURIN_NEG, MACLAURIN_POS_AI, ANCHOR] {
            let below = airy(edge - 1e-12).unwrap();
            let above = airy(edge + 1e-12).unwrap();
            for (a, b) in [
                (below.ai, above.ai),
                (below.dai, above.dai),
                (below.bi, above.bi),
                (below.dbi, above.dbi),
            ] {
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "edge {edge}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn overlapping_representations_agree() {
        // both representations evaluated on either side of each switch
        for z in [-6.5, -7.0, -7.5, -8.0] {
            let shifted = airy(z).unwrap();
            let direct = asymptotic_negative(-z);
            assert!((shifted.ai - direct.ai).abs() < 1e-10, "Ai({z})");
            assert!((shifted.bi - direct.bi).abs() < 1e-10, "Bi({z})");
        }
        for z in [-6.0, -5.0] {
            let series = maclaurin(z);
            let anchor = asymptotic_negative(ANCHOR);
            let (ai, _) = taylor_shift(-ANCHOR, anchor.ai, anchor.dai, z);
            assert!((series.ai().0 - ai).abs() < 1e-10, "Ai({z})");
        }
        for z in [3.0, 4.0] {
            let (ai, _) = anchored_ai(z);
            assert!((maclaurin(z).ai().0 - ai).abs() < 1e-10 * ai.abs() * 10.0, "Ai({z})");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(airy(101.0), Err(Error::AiryOutOfRange { .. })));
        assert!(matches!(airy(-2e4), Err(Error::AiryOutOfRange { .. })));
        assert!(airy(f64::NAN).is_err());
    }
}
