//! Log-gamma, digamma, trigamma and inverse digamma on the positive half-line.
//!
//! All routines are restricted to `x > 0`; there is no reflection formula.
//! Accuracy near the zeros of `ln Γ` (x = 1, 2) and of `ψ` (x ≈ 1.4616) is
//! kept relative by switching to local Taylor expansions there, which is
//! what the curvature function in [`crate::dirichlet`] relies on.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant γ = −ψ(1).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ψ'(1) = ζ(2) = π²/6.
pub const ZETA_2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// ζ(k) − 1 for k = 2, 3, …, 40.
const ZETA_MINUS_ONE: [f64; 39] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_34,
    0.002_008_392_826_082_214_3,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_5,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_15,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_763e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_962e-7,
    4.769_329_867_878_064e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_110_6e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504_3e-8,
    7.450_711_789_835_43e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
    4.656_629_065_033_784e-10,
    2.328_311_833_676_505_3e-10,
    1.164_155_017_270_052e-10,
    5.820_772_087_902_701e-11,
    2.910_385_044_497_1e-11,
    1.455_192_189_104_198_5e-11,
    7.275_959_835_057_482e-12,
    3.637_979_547_378_651e-12,
    1.818_989_650_307_066e-12,
    9.094_947_840_263_888e-13,
];

/// Positive zero of ψ, split into a leading double and its residual.
const DIGAMMA_ROOT_HI: f64 = 1.461_632_144_968_362_2;
const DIGAMMA_ROOT_LO: f64 = 9.549_995_429_965_697e-17;

/// ψ⁽ᵏ⁾(x₀)/k! for k = 1..=21, with x₀ the positive zero of ψ.
const DIGAMMA_ROOT_TAYLOR: [f64; 21] = [
    0.967_672_245_447_621_2,
    -0.442_763_168_983_592_1,
    0.258_499_760_955_651,
    -0.163_942_705_442_406_52,
    0.107_824_050_691_262_37,
    -0.072_199_561_256_454_71,
    0.048_804_288_164_143_11,
    -0.033_161_126_474_847_36,
    0.022_597_648_232_218_104,
    -0.015_424_765_904_948_96,
    0.010_538_791_616_612_175,
    -0.007_204_534_386_356_869,
    0.004_926_781_395_729_853,
    -0.003_369_801_655_439_328,
    0.002_305_126_326_734_928,
    -0.001_576_936_771_430_197_2,
    0.001_078_825_201_916_296_7,
    -0.000_738_070_938_996_005_2,
    0.000_504_953_265_834_602,
    -0.000_345_468_025_106_307_7,
    0.000_236_356_015_640_270_53,
];

/// B₂ₖ / (2k(2k−1)) for the Stirling series of ln Γ.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B₂ₖ / (2k) for the asymptotic series of ψ.
const DIGAMMA_ASYMP: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// B₂ₖ for the asymptotic series of ψ'.
const TRIGAMMA_ASYMP: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const ASYMPTOTIC_THRESHOLD: f64 = 10.0;
const TRIGAMMA_THRESHOLD: f64 = 12.0;

/// A strictly positive, finite real number.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PositiveReal(f64);

impl PositiveReal {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(PositiveReal(value))
        } else {
            Err(Error::domain(
                "PositiveReal::new",
                value,
                "expected a finite value > 0",
            ))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn ln_gamma(self) -> f64 {
        ln_gamma_pos(self.0)
    }

    pub fn digamma(self) -> f64 {
        digamma_pos(self.0)
    }

    pub fn trigamma(self) -> f64 {
        trigamma_pos(self.0)
    }
}

fn check(func: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::domain(func, x, "expected a finite value > 0"))
    }
}

/// ln Γ(x) for finite `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check("ln_gamma", x).map(ln_gamma_pos)
}

/// ψ(x) = d/dx ln Γ(x) for finite `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check("digamma", x).map(digamma_pos)
}

/// ψ'(x) for finite `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    check("trigamma", x).map(trigamma_pos)
}

/// Σ_{k≥2} (−1)ᵏ (ζ(k) − 1) zᵏ / k, which equals ln Γ(2 + z) − (1 − γ) z.
fn zeta_tail_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = -z;
    for (i, &zm1) in ZETA_MINUS_ONE.iter().enumerate() {
        let k = (i + 2) as f64;
        power *= -z;
        let term = zm1 * power / k;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// ln Γ(2 + z) for |z| ≤ 1/2, relative accuracy preserved near z = 0.
fn ln_gamma_two_plus(z: f64) -> f64 {
    (1.0 - EULER_GAMMA) * z + zeta_tail_series(z)
}

/// Derivative of [`zeta_tail_series`]: ψ(2 + z) − (1 − γ).
fn zeta_tail_series_derivative(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = -1.0;
    for &zm1 in ZETA_MINUS_ONE.iter() {
        power *= -z;
        let term = zm1 * power;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// ln Γ(1 + t) for 0 ≤ t ≤ 1/2 without rounding 1 + t.
pub(crate) fn ln_gamma_one_plus(t: f64) -> f64 {
    ln_gamma_two_plus(t) - t.ln_1p()
}

/// ψ(1 + t) for 0 ≤ t ≤ 1/2 without rounding 1 + t.
pub(crate) fn digamma_one_plus(t: f64) -> f64 {
    -EULER_GAMMA + t / (1.0 + t) + zeta_tail_series_derivative(t)
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut power = inv;
    for &c in &STIRLING {
        corr += c * power;
        power *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // ln Γ(x) = ln Γ(x + 1) − ln x, with x + 1 ∈ (1, 1.5)
        return ln_gamma_two_plus(x) - x.ln_1p() - x.ln();
    }
    if x < 1.5 {
        let z = x - 1.0;
        return ln_gamma_two_plus(z) - z.ln_1p();
    }
    if x <= 2.5 {
        return ln_gamma_two_plus(x - 2.0);
    }
    if x < ASYMPTOTIC_THRESHOLD {
        let mut y = x;
        let mut prod = 1.0;
        while y > 2.5 {
            y -= 1.0;
            prod *= y;
        }
        return ln_gamma_two_plus(y - 2.0) + prod.ln();
    }
    stirling(x)
}

pub(crate) fn digamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let dz = x - DIGAMMA_ROOT_HI;
    if dz.abs() < 0.05 {
        let z = dz - DIGAMMA_ROOT_LO;
        let mut acc = 0.0;
        for &c in DIGAMMA_ROOT_TAYLOR.iter().rev() {
            acc = acc * z + c;
        }
        return acc * z;
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < ASYMPTOTIC_THRESHOLD {
        shift += 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    let mut power = inv2;
    for &c in &DIGAMMA_ASYMP {
        series += c * power;
        power *= inv2;
    }
    y.ln() - 0.5 / y - series - shift
}

pub(crate) fn trigamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut shift = 0.0;
    let mut y = x;
    while y < TRIGAMMA_THRESHOLD {
        shift += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut power = inv2 * inv;
    for &c in &TRIGAMMA_ASYMP {
        series += c * power;
        power *= inv2;
    }
    inv + 0.5 * inv2 + series + shift
}

const INV_DIGAMMA_MAX_STEPS: usize = 20;

/// Solves ψ(x) = y for x > 0 by Newton's method.
///
/// Fails for `y` above ψ(f64::MAX) ≈ 709.78 since no representable solution
/// exists, and reports [`Error::Accuracy`] if Newton misses the residual
/// target within 20 steps.
pub fn inv_digamma(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::domain("inv_digamma", y, "expected a finite value"));
    }
    if y > 709.0 {
        return Err(Error::domain(
            "inv_digamma",
            y,
            "solution exceeds the f64 range",
        ));
    }
    let mut x = if y >= -2.22 {
        y.exp() + 0.5
    } else {
        -1.0 / (y + EULER_GAMMA)
    };
    let tol = 1e-11 * y.abs().max(1.0);
    for _ in 0..INV_DIGAMMA_MAX_STEPS {
        let residual = digamma_pos(x) - y;
        let step = residual / trigamma_pos(x);
        let mut next = x - step;
        // ψ is concave, so a Newton step from the left can overshoot past 0.
        if next <= 0.0 {
            next = 0.5 * x;
        }
        let converged = (next - x).abs() <= 4.0 * f64::EPSILON * x;
        x = next;
        if converged {
            break;
        }
    }
    let residual = (digamma_pos(x) - y).abs();
    if residual <= tol {
        Ok(x)
    } else {
        Err(Error::Accuracy(format!(
            "inv_digamma({y}) stopped at x = {x} with residual {residual:e}"
        )))
    }
}

/// ζ(k) for integer k ≥ 2 (k ≤ 40).
pub(crate) fn zeta_int(k: usize) -> f64 {
    debug_assert!((2..=40).contains(&k));
    1.0 + ZETA_MINUS_ONE[k - 2]
}
