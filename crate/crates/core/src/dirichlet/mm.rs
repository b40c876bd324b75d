use std::sync::Arc;

use super::curvature::curvature_unchecked;
use super::objective::{nll_at, nll_gradient_at};
use super::types::{BoxConstraint, DirichletParams, SampleSet};
use crate::bregman::{
    positive_quadratic_root, vbmm_run_with_reference, BregmanFamily, CompositeObjective,
    ConvergenceTrace, NegLog, SeparableBregman, SolverConfig,
};
use crate::error::{Error, Result};
use crate::specfun::{digamma_pos, ZETA_2};

/// Which quadratic coefficient the majorant uses on each coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MajorantMetric {
    /// c(βᵢ), re-evaluated at every anchor.
    Variable,
    /// sup c = π²/6 everywhere; the fixed-metric ablation.
    Fixed,
}

impl MajorantMetric {
    fn coefficient(self, beta_i: f64) -> f64 {
        match self {
            MajorantMetric::Variable => curvature_unchecked(beta_i),
            MajorantMetric::Fixed => ZETA_2,
        }
    }
}

fn check_beta(beta: &[f64], data: &SampleSet) -> Result<()> {
    if beta.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: beta.len(),
        });
    }
    if let Some(&bad) = beta.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(Error::domain("mm step", bad, "parameters must be finite and > 0"));
    }
    Ok(())
}

/// αᵢ = positive root of cᵢ αᵢ² + δᵢ αᵢ = 1 with
/// δᵢ = ψ(βᵢ + 1) − ψ(Σβⱼ) − cᵢ βᵢ − ḡᵢ.
fn mm_update(beta: &[f64], data: &SampleSet, metric: MajorantMetric) -> Vec<f64> {
    let psi_total = digamma_pos(beta.iter().sum());
    beta.iter()
        .zip(data.log_geo_mean())
        .map(|(&b, &g)| {
            let c = metric.coefficient(b);
            let delta = digamma_pos(b + 1.0) - psi_total - c * b - g;
            positive_quadratic_root(c, delta)
        })
        .collect()
}

/// One variable-metric majorization-minimization step from `beta`.
pub fn vbmm_dirichlet_step(beta: &DirichletParams, data: &SampleSet) -> Result<DirichletParams> {
    check_beta(beta.as_slice(), data)?;
    DirichletParams::new(mm_update(beta.as_slice(), data, MajorantMetric::Variable))
}

/// [`vbmm_dirichlet_step`] projected onto the box. The one-dimensional
/// majorants are convex, so clamping gives their constrained minimizers.
pub fn vbmm_dirichlet_step_boxed(
    beta: &DirichletParams,
    data: &SampleSet,
    bx: &BoxConstraint,
) -> Result<DirichletParams> {
    check_beta(beta.as_slice(), data)?;
    if !bx.contains(beta.as_slice()) {
        return Err(Error::Precondition("beta must lie inside the box".into()));
    }
    let mut next = mm_update(beta.as_slice(), data, MajorantMetric::Variable);
    bx.clamp_in_place(&mut next);
    DirichletParams::new(next)
}

/// Step of the fixed-metric variant, with every curvature set to π²/6.
pub fn bmm_dirichlet_step(beta: &DirichletParams, data: &SampleSet) -> Result<DirichletParams> {
    check_beta(beta.as_slice(), data)?;
    DirichletParams::new(mm_update(beta.as_slice(), data, MajorantMetric::Fixed))
}

/// h_β(α) = −M Σ ln αᵢ + M Σ cᵢ αᵢ²/2.
#[derive(Debug, Clone)]
pub struct DirichletBregmanFamily {
    num_samples: f64,
    metric: MajorantMetric,
}

impl DirichletBregmanFamily {
    pub fn new(num_samples: usize, metric: MajorantMetric) -> Self {
        Self {
            num_samples: num_samples as f64,
            metric,
        }
    }
}

impl BregmanFamily for DirichletBregmanFamily {
    fn at(&self, anchor: &[f64]) -> Result<SeparableBregman> {
        if let Some(&bad) = anchor.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::domain(
                "DirichletBregmanFamily::at",
                bad,
                "anchor must be in (0, inf)^d",
            ));
        }
        let m = self.num_samples;
        let a = vec![m; anchor.len()];
        let b = anchor.iter().map(|&t| m * self.metric.coefficient(t)).collect();
        SeparableBregman::uniform(Arc::new(NegLog), a, b)
    }
}

/// The estimation problem F = f + g with g = 0 or the indicator of a box.
#[derive(Debug, Clone, Copy)]
pub struct DirichletProblem<'a> {
    data: &'a SampleSet,
    metric: MajorantMetric,
    bx: Option<&'a BoxConstraint>,
}

impl<'a> DirichletProblem<'a> {
    pub fn new(data: &'a SampleSet, metric: MajorantMetric, bx: Option<&'a BoxConstraint>) -> Self {
        Self { data, metric, bx }
    }

    pub fn family(&self) -> DirichletBregmanFamily {
        DirichletBregmanFamily::new(self.data.num_samples(), self.metric)
    }
}

impl CompositeObjective for DirichletProblem<'_> {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.data.dim() && x.iter().all(|v| v.is_finite() && *v > 0.0)
    }

    fn smooth_value(&self, x: &[f64]) -> Result<f64> {
        nll_at(x, self.data)
    }

    fn smooth_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        nll_gradient_at(x, self.data)
    }

    fn nonsmooth_value(&self, x: &[f64]) -> f64 {
        match self.bx {
            Some(bx) if !bx.contains(x) => f64::INFINITY,
            _ => 0.0,
        }
    }

    /// Closed form for the majorant produced by [`DirichletBregmanFamily`]
    /// with the same metric; `grad` and `h` are implied by the anchor.
    fn solve_subproblem(
        &self,
        anchor: &[f64],
        _grad: &[f64],
        _h: &SeparableBregman,
    ) -> Result<Vec<f64>> {
        check_beta(anchor, self.data)?;
        let mut next = mm_update(anchor, self.data, self.metric);
        if let Some(bx) = self.bx {
            bx.clamp_in_place(&mut next);
        }
        Ok(next)
    }
}

/// Runs the majorization-minimization iteration from `x0` to convergence.
///
/// `bx` turns on the projected variant; `x0` must then lie inside the box.
/// `reference`, when given, adds an RSE column to the trace.
pub fn fit_mm(
    data: &SampleSet,
    x0: &DirichletParams,
    metric: MajorantMetric,
    bx: Option<&BoxConstraint>,
    cfg: &SolverConfig,
    reference: Option<&[f64]>,
) -> Result<(DirichletParams, ConvergenceTrace)> {
    if let Some(bx) = bx {
        if bx.dim() != data.dim() {
            return Err(Error::DimensionMismatch {
                expected: data.dim(),
                got: bx.dim(),
            });
        }
        if !bx.contains(x0.as_slice()) {
            return Err(Error::Precondition("x0 must lie inside the box".into()));
        }
    }
    if !data.has_distinct_rows() {
        log::warn!("all samples are identical; the likelihood has no maximizer");
    }
    let problem = DirichletProblem::new(data, metric, bx);
    let family = problem.family();
    let (x, trace) =
        vbmm_run_with_reference(&problem, &family, x0.as_slice(), cfg, reference)?;
    Ok((DirichletParams::new(x)?, trace))
}
