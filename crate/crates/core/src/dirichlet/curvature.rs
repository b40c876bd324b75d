use crate::error::{Error, Result};
use crate::specfun::{
    digamma_one_plus, digamma_pos, ln_gamma_one_plus, ln_gamma_pos, zeta_int, ZETA_2,
};

/// Below this argument the closed form loses digits to cancellation and the
/// power series is used instead.
pub const CURVATURE_SERIES_THRESHOLD: f64 = 1e-3;

const SERIES_TERMS: usize = 14;

/// Curvature of the tightest tangent parabola majorizing φ = ln Γ(· + 1):
///
///   c(0) = φ''(0) = π²/6,   c(t) = 2 (φ(0) − φ(t) + t φ'(t)) / t²  (t > 0).
///
/// c is positive, bounded by π²/6 and decays like 2/t.
pub fn curvature(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain("curvature", t, "expected a finite value >= 0"));
    }
    Ok(curvature_unchecked(t))
}

pub(crate) fn curvature_unchecked(t: f64) -> f64 {
    if t < CURVATURE_SERIES_THRESHOLD {
        curvature_series(t)
    } else {
        curvature_closed_form(t)
    }
}

/// Power series of c about 0: c(t) = Σ_{k≥2} 2 (−1)ᵏ ((k−1)/k) ζ(k) t^{k−2}.
///
/// Accurate to rounding for t ≤ 1e-3; converges for t < 1.
pub fn curvature_series(t: f64) -> f64 {
    let mut acc = 0.0;
    for k in (2..SERIES_TERMS + 2).rev() {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = if k == 2 { ZETA_2 } else { 2.0 * sign * (kf - 1.0) / kf * zeta_int(k) };
        acc = acc * t + coeff;
    }
    acc
}

/// The defining formula 2(t ψ(t+1) − ln Γ(t+1))/t², arranged so that t·ψ
/// cannot overflow. Not for t = 0.
///
/// For t ≤ 1/2 both terms are evaluated from t itself: the rounding of
/// 1 + t would otherwise be amplified by 1/t².
pub fn curvature_closed_form(t: f64) -> f64 {
    let (phi, dphi) = if t <= 0.5 {
        (ln_gamma_one_plus(t), digamma_one_plus(t))
    } else {
        (ln_gamma_pos(t + 1.0), digamma_pos(t + 1.0))
    };
    2.0 * (dphi - phi / t) / t
}
