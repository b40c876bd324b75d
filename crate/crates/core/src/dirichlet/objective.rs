use super::types::{BoxConstraint, DirichletParams, SampleSet};
use crate::error::{Error, Result};
use crate::specfun::{digamma_pos, ln_gamma_pos};

fn check(alpha: &[f64], data: &SampleSet, func: &'static str) -> Result<()> {
    if alpha.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: alpha.len(),
        });
    }
    if let Some(&bad) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::domain(func, bad, "parameters must be finite and > 0"));
    }
    Ok(())
}

/// Negative log-likelihood at a raw parameter slice.
pub fn nll_at(alpha: &[f64], data: &SampleSet) -> Result<f64> {
    check(alpha, data, "nll")?;
    let total: f64 = alpha.iter().sum();
    let per_sample: f64 = alpha
        .iter()
        .zip(data.log_geo_mean())
        .map(|(&a, &g)| ln_gamma_pos(a) - (a - 1.0) * g)
        .sum::<f64>()
        - ln_gamma_pos(total);
    Ok(data.num_samples() as f64 * per_sample)
}

pub fn nll(params: &DirichletParams, data: &SampleSet) -> Result<f64> {
    nll_at(params.as_slice(), data)
}

/// ∂f/∂αᵢ = M (ψ(αᵢ) − ψ(ᾱ) − ḡᵢ).
pub fn nll_gradient_at(alpha: &[f64], data: &SampleSet) -> Result<Vec<f64>> {
    check(alpha, data, "nll_gradient")?;
    let m = data.num_samples() as f64;
    let psi_total = digamma_pos(alpha.iter().sum());
    Ok(alpha
        .iter()
        .zip(data.log_geo_mean())
        .map(|(&a, &g)| m * (digamma_pos(a) - psi_total - g))
        .collect())
}

pub fn nll_gradient(params: &DirichletParams, data: &SampleSet) -> Result<Vec<f64>> {
    nll_gradient_at(params.as_slice(), data)
}

/// Rounding-level size of the gradient at `alpha`: below this, a smaller
/// gradient norm is not distinguishable from zero.
pub fn gradient_noise_floor(alpha: &[f64], data: &SampleSet) -> f64 {
    let m = data.num_samples() as f64;
    let psi_total = digamma_pos(alpha.iter().sum()).abs();
    let sq: f64 = alpha
        .iter()
        .zip(data.log_geo_mean())
        .map(|(&a, &g)| {
            let s = digamma_pos(a).abs() + psi_total + g.abs();
            s * s
        })
        .sum();
    32.0 * f64::EPSILON * m * sq.sqrt()
}

/// Right-hand side of the Stirling-based coercivity bound
///
///   f(α) > M [ ᾱ(1 − Σ z̃ᵢ) + Σ ln z̃ᵢ + ((1−d)/2) ln ᾱ − 1/(12ᾱ) + ((d−1)/2) ln 2π ]
///
/// with z̃ᵢ = exp(ḡᵢ) the per-coordinate geometric mean.
pub fn coercivity_lower_bound(params: &DirichletParams, data: &SampleSet) -> Result<f64> {
    check(params.as_slice(), data, "coercivity_lower_bound")?;
    let d = data.dim() as f64;
    let total = params.total();
    let g = data.log_geo_mean();
    let sum_geo: f64 = g.iter().map(|v| v.exp()).sum();
    let sum_log: f64 = g.iter().sum();
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    Ok(data.num_samples() as f64
        * (total * (1.0 - sum_geo) + sum_log + 0.5 * (1.0 - d) * total.ln() - 1.0 / (12.0 * total)
            + 0.5 * (d - 1.0) * ln_2pi))
}

/// ‖α − P_box(α − ∇f(α)/M)‖_∞: zero exactly at KKT points of the
/// box-constrained problem.
pub fn projected_gradient_residual(
    alpha: &[f64],
    data: &SampleSet,
    bx: &BoxConstraint,
) -> Result<f64> {
    let grad = nll_gradient_at(alpha, data)?;
    if bx.dim() != alpha.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            got: bx.dim(),
        });
    }
    let m = data.num_samples() as f64;
    Ok(alpha
        .iter()
        .zip(&grad)
        .zip(bx.lower().iter().zip(bx.upper()))
        .map(|((&a, &g), (&lo, &hi))| (a - (a - g / m).clamp(lo, hi)).abs())
        .fold(0.0, f64::max))
}
