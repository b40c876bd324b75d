//! Generic variable Bregman majorization-minimization machinery.
//!
//! A problem supplies its smooth part f, a nonsmooth part g reached only
//! through an exact subproblem solver, and a family of separable Bregman
//! functions h_y indexed by the anchor y. [`vbmm_run`] then iterates
//! x⁽ˡ⁺¹⁾ = argmin g(x) + ⟨∇f(x⁽ˡ⁾), x⟩ + D_{h_{x⁽ˡ⁾}}(x, x⁽ˡ⁾).

mod divergence;
mod solver;
mod subproblem;
mod trace;

pub use divergence::{
    bregman_divergence, three_points_residual, EntropyKernel, NegLog, ScalarKernel,
    SeparableBregman, ZeroKernel,
};
pub use solver::{
    guard_slack, majorant_value, vbmm_run, vbmm_run_with_reference, BregmanFamily,
    CompositeObjective, SolverConfig,
};
pub(crate) use solver::relative_change;
pub use subproblem::{
    golden_section_by_difference, golden_section_minimize, golden_section_prox,
    neglog_quadratic_prox, positive_quadratic_root,
};
pub use trace::{
    relative_squared_error, ConvergenceTrace, IterationRecord, TerminationStatus,
};
