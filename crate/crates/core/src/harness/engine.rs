use rayon::prelude::*;

use super::spec::{build_alpha_true, ExperimentSpec, SolverKind};
use super::table::{RunSummary, TraceRow, TraceTable};
use crate::baselines::{minka_fixed_point, newton_dirichlet, NewtonConfig};
use crate::bregman::{relative_squared_error, ConvergenceTrace, SolverConfig, TerminationStatus};
use crate::dirichlet::{
    fit_mm, gradient_noise_floor, nll_gradient_at, sample, BoxConstraint, DirichletParams,
    MajorantMetric, SampleSet,
};
use crate::error::{Error, Result};

/// Starting point of every benchmark run.
pub const START_VALUE: f64 = 10.0;
/// RSE level at which the summary counts a run as having reached the optimum.
pub const RSE_TARGET: f64 = 1e-8;

const REFERENCE_GRADIENT_TOL: f64 = 1e-13;
const REFERENCE_FALLBACK_ITERATIONS: usize = 100_000;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Maximum-likelihood estimate used as α_opt when measuring RSE.
///
/// Newton is driven to a gradient norm of 1e-13, or to the rounding floor of
/// the gradient when that is larger. If it does not get there, the
/// variable-metric MM iteration continues from Newton's last point for up
/// to 10⁵ iterations.
pub fn reference_optimum(data: &SampleSet) -> Result<DirichletParams> {
    if !data.has_distinct_rows() {
        return Err(Error::DegenerateData(
            "all samples are identical; the likelihood has no maximizer".into(),
        ));
    }
    let x0 = DirichletParams::constant(data.dim(), START_VALUE)?;
    let cfg = NewtonConfig {
        max_iterations: 500,
        gradient_norm_tolerance: REFERENCE_GRADIENT_TOL,
        ..NewtonConfig::default()
    };
    let (x, trace) = newton_dirichlet(&x0, data, &cfg, None)?;
    if trace.status == TerminationStatus::Converged {
        return Ok(x);
    }
    log::debug!("Newton reference ended with {}; continuing with MM", trace.status);
    let mm_cfg = SolverConfig {
        max_iterations: REFERENCE_FALLBACK_ITERATIONS,
        rel_change_tolerance: 1e-16,
        monotonicity_guard: false,
        record_iterates: false,
    };
    let (x, _) = fit_mm(data, &x, MajorantMetric::Variable, None, &mm_cfg, None)?;
    let g = norm(&nll_gradient_at(x.as_slice(), data)?);
    let floor = gradient_noise_floor(x.as_slice(), data);
    if g > 1e3 * REFERENCE_GRADIENT_TOL.max(floor) {
        log::warn!("reference optimum only reached gradient norm {g:e}");
    }
    Ok(x)
}

/// Long projected MM run used as the constrained optimum.
pub fn boxed_reference(data: &SampleSet, bx: &BoxConstraint) -> Result<DirichletParams> {
    let x0 = start_point(data.dim(), Some(bx))?;
    let cfg = SolverConfig {
        max_iterations: REFERENCE_FALLBACK_ITERATIONS,
        rel_change_tolerance: 1e-15,
        monotonicity_guard: false,
        record_iterates: false,
    };
    let (x, _) = fit_mm(data, &x0, MajorantMetric::Variable, Some(bx), &cfg, None)?;
    Ok(x)
}

/// 10·𝟙, projected onto the box when there is one.
pub fn start_point(d: usize, bx: Option<&BoxConstraint>) -> Result<DirichletParams> {
    let mut x = vec![START_VALUE; d];
    if let Some(bx) = bx {
        for ((v, lo), hi) in x.iter_mut().zip(bx.lower()).zip(bx.upper()) {
            *v = v.clamp(*lo, *hi);
        }
    }
    DirichletParams::new(x)
}

/// Runs one solver with the tolerances of `spec`.
pub fn run_solver(
    kind: SolverKind,
    data: &SampleSet,
    x0: &DirichletParams,
    spec: &ExperimentSpec,
    bx: Option<&BoxConstraint>,
    reference: Option<&[f64]>,
) -> Result<(DirichletParams, ConvergenceTrace)> {
    let mm_cfg = SolverConfig {
        max_iterations: spec.max_iterations,
        rel_change_tolerance: spec.tol,
        ..SolverConfig::default()
    };
    if bx.is_some() && !kind.supports_box() {
        return Err(Error::InvalidInput(format!(
            "{kind} does not handle box constraints"
        )));
    }
    match kind {
        SolverKind::Vbmm => fit_mm(data, x0, MajorantMetric::Variable, bx, &mm_cfg, reference),
        SolverKind::Bmm => fit_mm(data, x0, MajorantMetric::Fixed, bx, &mm_cfg, reference),
        SolverKind::Newton => {
            let cfg = NewtonConfig {
                max_iterations: spec.max_iterations,
                gradient_norm_tolerance: spec.tol,
                ..NewtonConfig::default()
            };
            newton_dirichlet(x0, data, &cfg, reference)
        }
        SolverKind::Minka => minka_fixed_point(x0, data, &mm_cfg, reference),
    }
}

struct RepetitionOutput {
    rows: Vec<TraceRow>,
    runs: Vec<RunSummary>,
}

fn run_repetition(spec: &ExperimentSpec, rep: usize) -> Result<RepetitionOutput> {
    let alpha_true = build_alpha_true(spec)?;
    let seed = spec.base_seed.wrapping_add(rep as u64);
    let data = sample(&alpha_true, spec.num_samples, seed)?;
    let bx = spec.box_constraint()?;
    let reference = match &bx {
        Some(bx) => boxed_reference(&data, bx)?,
        None => reference_optimum(&data)?,
    };
    let x0 = start_point(spec.d, bx.as_ref())?;

    let mut out = RepetitionOutput {
        rows: Vec::new(),
        runs: Vec::new(),
    };
    for &kind in &spec.solvers {
        match run_solver(kind, &data, &x0, spec, bx.as_ref(), Some(reference.as_slice())) {
            Ok((x, trace)) => {
                out.rows.extend(trace.records.iter().map(|r| TraceRow {
                    solver: kind,
                    repetition: rep,
                    iteration: r.iteration,
                    elapsed_secs: r.elapsed_secs,
                    objective: r.objective,
                    rse: r.rse.unwrap_or(f64::NAN),
                }));
                out.runs.push(RunSummary {
                    solver: kind,
                    repetition: rep,
                    status: trace.status.as_str().to_string(),
                    iterations: trace.iterations(),
                    iterations_to_target: trace.iterations_to_rse(RSE_TARGET),
                    final_rse: relative_squared_error(x.as_slice(), reference.as_slice()),
                    final_objective: trace.final_objective().unwrap_or(f64::NAN),
                    elapsed_secs: trace.records.last().map_or(0.0, |r| r.elapsed_secs),
                });
            }
            Err(e) => {
                log::warn!("{} rep {rep}: {kind} failed: {e}", spec.id());
                out.runs.push(RunSummary {
                    solver: kind,
                    repetition: rep,
                    status: "error".to_string(),
                    iterations: 0,
                    iterations_to_target: None,
                    final_rse: f64::NAN,
                    final_objective: f64::NAN,
                    elapsed_secs: 0.0,
                });
            }
        }
    }
    Ok(out)
}

/// Runs every repetition of `spec` and collects the traces.
///
/// Repetition r uses seed `base_seed + r` and its own data set; repetitions
/// execute in parallel and are merged in repetition order, so the table is
/// identical to a sequential run apart from the timing column.
pub fn run_grid(spec: &ExperimentSpec) -> Result<TraceTable> {
    spec.validate()?;
    let outputs: Vec<RepetitionOutput> = (0..spec.repetitions)
        .into_par_iter()
        .map(|rep| run_repetition(spec, rep))
        .collect::<Result<_>>()?;
    let mut table = TraceTable::new(spec.id(), spec.solvers.clone());
    for out in outputs {
        table.rows.extend(out.rows);
        table.runs.extend(out.runs);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::spec::MeanFamily;

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec {
            family: MeanFamily::M3,
            scale: 10.0,
            d: 5,
            num_samples: 50,
            repetitions: 3,
            base_seed: 11,
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn reference_has_tiny_gradient() {
        let data = sample(&DirichletParams::new(vec![0.5, 1.0, 2.0]).unwrap(), 40, 2).unwrap();
        let x = reference_optimum(&data).unwrap();
        let g = norm(&nll_gradient_at(x.as_slice(), &data).unwrap());
        assert!(g <= 1e-12, "gradient norm {g:e}");
    }

    #[test]
    fn degenerate_data_is_rejected() {
        let data = SampleSet::from_rows(vec![vec![0.25, 0.75]; 4]).unwrap();
        assert!(matches!(reference_optimum(&data), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn grid_rows_are_ordered_and_converge() {
        let table = run_grid(&small_spec()).unwrap();
        assert_eq!(table.runs.len(), 12);
        for run in &table.runs {
            assert_eq!(run.status, "converged", "{run:?}");
            assert!(run.final_rse <= 1e-10, "{run:?}");
        }
        for w in table.rows.windows(2) {
            if w[0].solver == w[1].solver && w[0].repetition == w[1].repetition {
                assert_eq!(w[1].iteration, w[0].iteration + 1);
            }
        }
        let vbmm: Vec<&TraceRow> = table
            .rows
            .iter()
            .filter(|r| r.solver == SolverKind::Vbmm)
            .collect();
        for w in vbmm.windows(2) {
            if w[0].repetition == w[1].repetition {
                assert!(w[1].objective <= w[0].objective + 1e-10 * (1.0 + w[0].objective.abs()));
            }
        }
    }

    #[test]
    fn boxed_grid_converges_and_refuses_baselines() {
        let spec = ExperimentSpec {
            solvers: vec![SolverKind::Vbmm, SolverKind::Bmm],
            box_bounds: Some((1e-10, 1.0)),
            repetitions: 2,
            ..small_spec()
        };
        let table = run_grid(&spec).unwrap();
        assert!(table.runs.iter().all(|r| r.status == "converged"));
        let mut bad = spec.clone();
        bad.solvers.push(SolverKind::Newton);
        assert!(run_grid(&bad).is_err());
    }
}
