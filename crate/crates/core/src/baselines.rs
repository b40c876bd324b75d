//! Reference solvers for the Dirichlet likelihood: a positivity-safeguarded
//! Newton method and the classical fixed-point iteration
//! αᵢ ← ψ⁻¹(ψ(ᾱ) + ḡᵢ). Neither handles box constraints.

use std::time::Instant;

use crate::bregman::{
    guard_slack, relative_change, relative_squared_error, ConvergenceTrace, IterationRecord,
    SolverConfig, TerminationStatus,
};
use crate::dirichlet::{gradient_noise_floor, nll_at, nll_gradient_at, DirichletParams, SampleSet};
use crate::error::{Error, Result};
use crate::specfun::{digamma_pos, inv_digamma, trigamma_pos};

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    pub max_iterations: usize,
    /// Converged once ‖∇f‖ ≤ max(this, rounding floor of the gradient).
    pub gradient_norm_tolerance: f64,
    pub max_step_halvings: usize,
    pub record_iterates: bool,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1_000,
            gradient_norm_tolerance: 1e-10,
            max_step_halvings: 60,
            record_iterates: false,
        }
    }
}

impl NewtonConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.max_step_halvings == 0 {
            return Err(Error::InvalidInput(
                "max_iterations and max_step_halvings must be positive".into(),
            ));
        }
        if !(self.gradient_norm_tolerance > 0.0) {
            return Err(Error::InvalidInput("gradient tolerance must be positive".into()));
        }
        Ok(())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves H p = −g for H = M·diag(ψ'(αᵢ)) − M·ψ'(ᾱ)·𝟙𝟙ᵀ in O(d) using
/// Sherman–Morrison. Returns `None` when the computed H is not positive
/// definite, i.e. when 1 − ψ'(ᾱ) Σ 1/ψ'(αᵢ) ≤ 0.
pub fn newton_direction(alpha: &[f64], grad: &[f64], num_samples: usize) -> Option<Vec<f64>> {
    let m = num_samples as f64;
    let q: Vec<f64> = alpha.iter().map(|&a| trigamma_pos(a)).collect();
    let z = trigamma_pos(alpha.iter().sum());
    let inv_q_sum: f64 = q.iter().map(|v| 1.0 / v).sum();
    let denom = 1.0 - z * inv_q_sum;
    if !(denom > 0.0) {
        return None;
    }
    // H⁻¹g = D⁻¹g + z (𝟙ᵀD⁻¹g) D⁻¹𝟙 / denom with D = diag(q), all over M
    let g_over_q: f64 = grad.iter().zip(&q).map(|(g, q)| g / q).sum();
    let b = z * g_over_q / denom;
    Some(
        grad.iter()
            .zip(&q)
            .map(|(g, q)| -(g + b) / (q * m))
            .collect(),
    )
}

/// Newton's method on the negative log-likelihood.
///
/// The step is halved until every component stays positive and the
/// objective does not increase beyond rounding. A non-positive-definite
/// Hessian (only possible through rounding) falls back to a diagonally
/// scaled gradient step.
pub fn newton_dirichlet(
    x0: &DirichletParams,
    data: &SampleSet,
    cfg: &NewtonConfig,
    reference: Option<&[f64]>,
) -> Result<(DirichletParams, ConvergenceTrace)> {
    cfg.validate()?;
    let rse = |x: &[f64]| reference.map(|r| relative_squared_error(x, r));
    let mut x = x0.as_slice().to_vec();
    let mut fx = nll_at(&x, data)?;
    let mut trace = ConvergenceTrace::new(cfg.record_iterates);
    trace.push(
        IterationRecord {
            iteration: 0,
            objective: fx,
            elapsed_secs: 0.0,
            rse: rse(&x),
            step_divergence: None,
        },
        &x,
    );
    let m = data.num_samples();
    let mut elapsed = 0.0;
    let mut status = TerminationStatus::MaxIterations;

    for iteration in 1..=cfg.max_iterations {
        let start = Instant::now();
        let grad = nll_gradient_at(&x, data)?;
        let gnorm = norm(&grad);
        if gnorm <= cfg.gradient_norm_tolerance.max(gradient_noise_floor(&x, data)) {
            status = TerminationStatus::Converged;
            break;
        }
        let dir = newton_direction(&x, &grad, m).unwrap_or_else(|| {
            log::debug!("Hessian not positive definite at iteration {iteration}; gradient step");
            grad.iter()
                .zip(&x)
                .map(|(g, &a)| -g / (m as f64 * trigamma_pos(a)))
                .collect()
        });
        let slope: f64 = grad.iter().zip(&dir).map(|(g, p)| g * p).sum();

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_step_halvings {
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(a, p)| a + t * p).collect();
            if cand.iter().all(|v| *v > 0.0 && v.is_finite()) {
                let fc = nll_at(&cand, data)?;
                let slack = 64.0 * f64::EPSILON * (1.0 + fx.abs());
                if fc <= fx + 1e-4 * t * slope + slack {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            t *= 0.5;
        }
        elapsed += start.elapsed().as_secs_f64();
        let Some((next, f_next)) = accepted else {
            status = TerminationStatus::Stalled;
            break;
        };
        let change = relative_change(&next, &x);
        x = next;
        fx = f_next;
        trace.push(
            IterationRecord {
                iteration,
                objective: fx,
                elapsed_secs: elapsed,
                rse: rse(&x),
                step_divergence: None,
            },
            &x,
        );
        if change <= 4.0 * f64::EPSILON {
            let g = norm(&nll_gradient_at(&x, data)?);
            status = if g <= 100.0 * cfg.gradient_norm_tolerance.max(gradient_noise_floor(&x, data))
            {
                TerminationStatus::Converged
            } else {
                TerminationStatus::Stalled
            };
            break;
        }
    }
    trace.status = status;
    Ok((DirichletParams::new(x)?, trace))
}

/// One fixed-point update αᵢ ← ψ⁻¹(ψ(Σⱼ αⱼ) + ḡᵢ).
pub fn minka_update(alpha: &[f64], data: &SampleSet) -> Result<Vec<f64>> {
    let psi_total = digamma_pos(alpha.iter().sum());
    data.log_geo_mean()
        .iter()
        .map(|&g| inv_digamma(psi_total + g))
        .collect()
}

/// Fixed-point iteration on the likelihood stationarity conditions.
pub fn minka_fixed_point(
    x0: &DirichletParams,
    data: &SampleSet,
    cfg: &SolverConfig,
    reference: Option<&[f64]>,
) -> Result<(DirichletParams, ConvergenceTrace)> {
    cfg.validate()?;
    if x0.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: x0.dim(),
        });
    }
    let rse = |x: &[f64]| reference.map(|r| relative_squared_error(x, r));
    let mut x = x0.as_slice().to_vec();
    let mut fx = nll_at(&x, data)?;
    let mut trace = ConvergenceTrace::new(cfg.record_iterates);
    trace.push(
        IterationRecord {
            iteration: 0,
            objective: fx,
            elapsed_secs: 0.0,
            rse: rse(&x),
            step_divergence: None,
        },
        &x,
    );
    let mut elapsed = 0.0;
    trace.status = TerminationStatus::MaxIterations;
    for iteration in 1..=cfg.max_iterations {
        let start = Instant::now();
        let next = minka_update(&x, data)?;
        elapsed += start.elapsed().as_secs_f64();
        let f_next = nll_at(&next, data)?;
        let change = relative_change(&next, &x);
        let violated = cfg.monotonicity_guard && f_next > fx + guard_slack(fx);
        x = next;
        fx = f_next;
        trace.push(
            IterationRecord {
                iteration,
                objective: fx,
                elapsed_secs: elapsed,
                rse: rse(&x),
                step_divergence: None,
            },
            &x,
        );
        if violated {
            trace.status = TerminationStatus::GuardViolation;
            break;
        }
        if change < cfg.rel_change_tolerance {
            trace.status = TerminationStatus::Converged;
            break;
        }
    }
    Ok((DirichletParams::new(x)?, trace))
}
