//! Synthetic benchmark engine: experiment grids, solver runs against a
//! reference optimum, CSV traces and summaries, and the curvature table.

mod engine;
mod spec;
mod table;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub use engine::{
    boxed_reference, reference_optimum, run_grid, run_solver, start_point, RSE_TARGET,
    START_VALUE,
};
pub use spec::{build_alpha_true, parse_scale, parse_spec, ExperimentSpec, MeanFamily, SolverKind};
pub use table::{
    time_bucket_edges, RunSummary, TraceRow, TraceTable, RUNS_HEADER, SUMMARY_HEADER,
    TIME_SUMMARY_HEADER, TRACE_HEADER,
};

use crate::dirichlet::{curvature, fmt_float};
use crate::error::{Error, Result};
use crate::specfun::ZETA_2;

/// Output options of [`bench`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BenchOptions {
    /// Adds elapsed-time columns and the time-bucket summary. Timings vary
    /// between runs, so the output is then no longer byte-reproducible.
    pub timings: bool,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub tables: Vec<TraceTable>,
    pub files: Vec<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Runs every experiment and writes, into `out_dir`:
/// `traces_<id>.csv` per experiment, `summary.csv` (mean RSE per
/// iteration), `runs.csv` (status and iteration counts per run) and, with
/// timings, `time_summary.csv`.
pub fn bench(specs: &[ExperimentSpec], out_dir: &Path, opts: BenchOptions) -> Result<BenchReport> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut tables = Vec::with_capacity(specs.len());
    for spec in specs {
        log::info!("running {} ({} repetitions)", spec.id(), spec.repetitions);
        tables.push(run_grid(spec)?);
    }

    let mut files = Vec::new();
    let mut emit = |name: String, f: &dyn Fn(&mut BufWriter<File>) -> std::io::Result<()>| {
        let path = out_dir.join(name);
        let mut w = create(&path)?;
        f(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
        files.push(path);
        Ok::<_, Error>(())
    };
    for t in &tables {
        emit(format!("traces_{}.csv", t.experiment), &|w| {
            t.write_traces(w, opts.timings)
        })?;
    }
    emit("summary.csv".into(), &|w| {
        writeln!(w, "{SUMMARY_HEADER}")?;
        tables.iter().try_for_each(|t| t.write_summary_rows(w))
    })?;
    emit("runs.csv".into(), &|w| {
        if opts.timings {
            writeln!(w, "{RUNS_HEADER},elapsed_secs")?;
        } else {
            writeln!(w, "{RUNS_HEADER}")?;
        }
        tables.iter().try_for_each(|t| t.write_runs_rows(w, opts.timings))
    })?;
    if opts.timings {
        emit("time_summary.csv".into(), &|w| {
            writeln!(w, "{TIME_SUMMARY_HEADER}")?;
            tables.iter().try_for_each(|t| t.write_time_summary_rows(w))
        })?;
    }
    Ok(BenchReport { tables, files })
}

/// Rows (t, c(t)): first (0, π²/6), then `points` log-spaced values of t
/// from `t_min` to `t_max`. A zero `t_min` starts the spacing at
/// `t_max · 1e-12`.
pub fn emit_curvature_table(t_min: f64, t_max: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    if !(t_min >= 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need 0 <= t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidInput("need at least 2 points".into()));
    }
    let lo = if t_min > 0.0 { t_min } else { t_max * 1e-12 };
    let (l0, l1) = (lo.ln(), t_max.ln());
    let mut rows = vec![(0.0, ZETA_2)];
    for k in 0..points {
        let t = if k + 1 == points {
            t_max
        } else {
            (l0 + (l1 - l0) * k as f64 / (points - 1) as f64).exp()
        };
        rows.push((t, curvature(t)?));
    }
    Ok(rows)
}

pub fn curvature_table_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("t,c\n");
    for &(t, c) in rows {
        out.push_str(&fmt_float(t));
        out.push(',');
        out.push_str(&fmt_float(c));
        out.push('\n');
    }
    out
}
