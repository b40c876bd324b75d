use std::io::{self, Write};

use super::spec::SolverKind;
use crate::dirichlet::fmt_float;

/// One iteration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub solver: SolverKind,
    pub repetition: usize,
    pub iteration: usize,
    pub elapsed_secs: f64,
    pub objective: f64,
    pub rse: f64,
}

/// Outcome of one (solver, repetition) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub solver: SolverKind,
    pub repetition: usize,
    pub status: String,
    pub iterations: usize,
    /// First iteration with RSE ≤ 1e-8.
    pub iterations_to_target: Option<usize>,
    pub final_rse: f64,
    pub final_objective: f64,
    pub elapsed_secs: f64,
}

/// Long-format traces of one experiment, ordered by repetition, then solver
/// in roster order, then iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub experiment: String,
    pub solvers: Vec<SolverKind>,
    pub rows: Vec<TraceRow>,
    pub runs: Vec<RunSummary>,
}

pub const TRACE_HEADER: &str = "experiment,solver,repetition,iteration,objective,rse";
pub const SUMMARY_HEADER: &str = "experiment,solver,iteration,mean_rse,active_runs";
pub const RUNS_HEADER: &str =
    "experiment,solver,repetition,status,iterations,iterations_to_rse_1e-8,final_rse,final_objective";
pub const TIME_SUMMARY_HEADER: &str = "experiment,solver,time_secs,mean_rse";

/// Upper edges of the time buckets: four per decade from 1 µs to 100 s.
pub fn time_bucket_edges() -> Vec<f64> {
    (-24..=8).map(|k| 10f64.powf(k as f64 / 4.0)).collect()
}

impl TraceTable {
    pub fn new(experiment: String, solvers: Vec<SolverKind>) -> Self {
        Self {
            experiment,
            solvers,
            rows: Vec::new(),
            runs: Vec::new(),
        }
    }

    /// Contiguous per-run slices of `rows` for one solver.
    fn runs_of(&self, solver: SolverKind) -> Vec<&[TraceRow]> {
        let mut out = Vec::new();
        let mut start = 0;
        while start < self.rows.len() {
            let (s, r) = (self.rows[start].solver, self.rows[start].repetition);
            let mut end = start + 1;
            while end < self.rows.len()
                && self.rows[end].solver == s
                && self.rows[end].repetition == r
            {
                end += 1;
            }
            if s == solver {
                out.push(&self.rows[start..end]);
            }
            start = end;
        }
        out
    }

    /// Mean RSE across repetitions at each iteration index. Runs that
    /// stopped earlier contribute their terminal RSE; `active_runs` counts
    /// the ones still iterating.
    pub fn mean_rse_by_iteration(&self, solver: SolverKind) -> Vec<(usize, f64, usize)> {
        let runs = self.runs_of(solver);
        let Some(len) = runs.iter().map(|r| r.len()).max() else {
            return Vec::new();
        };
        (0..len)
            .map(|i| {
                let sum: f64 = runs.iter().map(|r| r[i.min(r.len() - 1)].rse).sum();
                let active = runs.iter().filter(|r| i < r.len()).count();
                (i, sum / runs.len() as f64, active)
            })
            .collect()
    }

    /// Mean RSE across repetitions at each time edge, using the last record
    /// reached by that time (the starting row for runs not yet begun).
    pub fn mean_rse_by_time(&self, solver: SolverKind, edges: &[f64]) -> Vec<(f64, f64)> {
        let runs = self.runs_of(solver);
        if runs.is_empty() {
            return Vec::new();
        }
        edges
            .iter()
            .map(|&t| {
                let sum: f64 = runs
                    .iter()
                    .map(|r| {
                        let k = r.partition_point(|row| row.elapsed_secs <= t);
                        r[k.saturating_sub(1)].rse
                    })
                    .sum();
                (t, sum / runs.len() as f64)
            })
            .collect()
    }

    pub fn write_traces<W: Write>(&self, w: &mut W, timings: bool) -> io::Result<()> {
        if timings {
            writeln!(w, "{TRACE_HEADER},elapsed_secs")?;
        } else {
            writeln!(w, "{TRACE_HEADER}")?;
        }
        for r in &self.rows {
            write!(
                w,
                "{},{},{},{},{},{}",
                self.experiment,
                r.solver,
                r.repetition,
                r.iteration,
                fmt_float(r.objective),
                fmt_float(r.rse)
            )?;
            if timings {
                write!(w, ",{}", fmt_float(r.elapsed_secs))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Summary rows without header.
    pub fn write_summary_rows<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for &s in &self.solvers {
            for (i, mean, active) in self.mean_rse_by_iteration(s) {
                writeln!(w, "{},{s},{i},{},{active}", self.experiment, fmt_float(mean))?;
            }
        }
        Ok(())
    }

    pub fn write_time_summary_rows<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let edges = time_bucket_edges();
        for &s in &self.solvers {
            for (t, mean) in self.mean_rse_by_time(s, &edges) {
                writeln!(w, "{},{s},{},{}", self.experiment, fmt_float(t), fmt_float(mean))?;
            }
        }
        Ok(())
    }

    pub fn write_runs_rows<W: Write>(&self, w: &mut W, timings: bool) -> io::Result<()> {
        for r in &self.runs {
            write!(
                w,
                "{},{},{},{},{},{},{},{}",
                self.experiment,
                r.solver,
                r.repetition,
                r.status,
                r.iterations,
                r.iterations_to_target
                    .map_or_else(String::new, |n| n.to_string()),
                fmt_float(r.final_rse),
                fmt_float(r.final_objective)
            )?;
            if timings {
                write!(w, ",{}", fmt_float(r.elapsed_secs))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
