use std::time::Instant;

use super::divergence::SeparableBregman;
use super::trace::{relative_squared_error, ConvergenceTrace, IterationRecord, TerminationStatus};
use crate::error::{Error, Result};

/// F = f + g with f smooth on an open domain 𝒟 and g handled only through
/// its Bregman proximal subproblem.
pub trait CompositeObjective {
    fn dim(&self) -> usize;

    /// Membership in 𝒟 (the domain of f).
    fn in_domain(&self, x: &[f64]) -> bool;

    fn smooth_value(&self, x: &[f64]) -> Result<f64>;

    fn smooth_gradient(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// g(x); `f64::INFINITY` outside dom g.
    fn nonsmooth_value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    /// Exact minimizer of g(x) + ⟨grad, x⟩ + D_h(x, anchor).
    fn solve_subproblem(
        &self,
        anchor: &[f64],
        grad: &[f64],
        h: &SeparableBregman,
    ) -> Result<Vec<f64>>;

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.smooth_value(x)? + self.nonsmooth_value(x))
    }
}

/// Anchor-indexed family y ↦ h_y.
pub trait BregmanFamily {
    fn at(&self, anchor: &[f64]) -> Result<SeparableBregman>;
}

impl<F> BregmanFamily for F
where
    F: Fn(&[f64]) -> Result<SeparableBregman>,
{
    fn at(&self, anchor: &[f64]) -> Result<SeparableBregman> {
        self(anchor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop once ‖x⁽ˡ⁺¹⁾ − x⁽ˡ⁾‖ / max(‖x⁽ˡ⁾‖, 1) falls below this.
    pub rel_change_tolerance: f64,
    pub monotonicity_guard: bool,
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            rel_change_tolerance: 1e-10,
            monotonicity_guard: true,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
        }
        if !(self.rel_change_tolerance > 0.0) {
            return Err(Error::InvalidInput(format!(
                "rel_change_tolerance must be positive, got {}",
                self.rel_change_tolerance
            )));
        }
        Ok(())
    }
}

/// Slack allowed by the monotonicity guard.
pub fn guard_slack(previous: f64) -> f64 {
    1e-10 * (1.0 + previous.abs())
}

/// q_y(x) = f(y) + ⟨∇f(y), x − y⟩ + D_{h}(x, y), with `h` anchored at `y`.
pub fn majorant_value<O: CompositeObjective + ?Sized>(
    obj: &O,
    h: &SeparableBregman,
    y: &[f64],
    x: &[f64],
) -> Result<f64> {
    let fy = obj.smooth_value(y)?;
    let grad = obj.smooth_gradient(y)?;
    let lin: f64 = grad.iter().zip(x.iter().zip(y)).map(|(g, (a, b))| g * (a - b)).sum();
    Ok(fy + lin + h.divergence(x, y)?)
}

pub(crate) fn relative_change(next: &[f64], current: &[f64]) -> f64 {
    let diff: f64 = next
        .iter()
        .zip(current)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = current.iter().map(|v| v * v).sum::<f64>().sqrt();
    diff / norm.max(1.0)
}

/// Variable Bregman majorization-minimization.
///
/// Each iteration anchors the family at the current point and replaces it
/// with the exact minimizer of g + ⟨∇f(x⁽ˡ⁾), ·⟩ + D_{h_{x⁽ˡ⁾}}(·, x⁽ˡ⁾).
pub fn vbmm_run<O, B>(
    obj: &O,
    family: &B,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, ConvergenceTrace)>
where
    O: CompositeObjective + ?Sized,
    B: BregmanFamily + ?Sized,
{
    vbmm_run_with_reference(obj, family, x0, cfg, None)
}

/// [`vbmm_run`] that also records the RSE against `reference` per iteration.
pub fn vbmm_run_with_reference<O, B>(
    obj: &O,
    family: &B,
    x0: &[f64],
    cfg: &SolverConfig,
    reference: Option<&[f64]>,
) -> Result<(Vec<f64>, ConvergenceTrace)>
where
    O: CompositeObjective + ?Sized,
    B: BregmanFamily + ?Sized,
{
    cfg.validate()?;
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            got: x0.len(),
        });
    }
    if !obj.in_domain(x0) {
        return Err(Error::Precondition("x0 must lie in the domain of f".into()));
    }
    let rse = |x: &[f64]| reference.map(|r| relative_squared_error(x, r));

    let mut trace = ConvergenceTrace::new(cfg.record_iterates);
    let mut x = x0.to_vec();
    let mut fx = obj.value(&x)?;
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
    for iteration in 1..=cfg.max_iterations {
        let start = Instant::now();
        let grad = obj.smooth_gradient(&x)?;
        let h = family.at(&x)?;
        let next = obj.solve_subproblem(&x, &grad, &h)?;
        elapsed += start.elapsed().as_secs_f64();

        if !obj.in_domain(&next) {
            return Err(Error::Accuracy(format!(
                "subproblem solver left the domain at iteration {iteration}"
            )));
        }
        let f_next = obj.value(&next)?;
        let step_div = h.divergence(&x, &next)?;
        let change = relative_change(&next, &x);
        trace.push(
            IterationRecord {
                iteration,
                objective: f_next,
                elapsed_secs: elapsed,
                rse: rse(&next),
                step_divergence: Some(step_div),
            },
            &next,
        );

        let violated = cfg.monotonicity_guard && f_next > fx + guard_slack(fx);
        x = next;
        fx = f_next;
        if violated {
            trace.status = TerminationStatus::GuardViolation;
            return Ok((x, trace));
        }
        if change < cfg.rel_change_tolerance {
            trace.status = TerminationStatus::Converged;
            return Ok((x, trace));
        }
    }
    trace.status = TerminationStatus::MaxIterations;
    Ok((x, trace))
}
