use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use vbmm::bregman::ConvergenceTrace;
use vbmm::dirichlet::{
    fmt_float, read_samples_csv, sample, write_params_csv, write_samples_csv, BoxConstraint,
};
use vbmm::harness::{
    bench, build_alpha_true, curvature_table_csv, emit_curvature_table, parse_scale, parse_spec,
    run_solver, start_point, BenchOptions, ExperimentSpec, MeanFamily, SolverKind,
};

#[derive(Parser)]
#[command(name = "vbmm", version, about = "Dirichlet maximum-likelihood estimation by variable Bregman MM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic Dirichlet sample.
    Synth {
        #[arg(long, value_parser = parse_family)]
        family: MeanFamily,
        /// s1, s2, s3 or a positive number.
        #[arg(long, value_parser = parse_scale_arg)]
        scale: f64,
        #[arg(long)]
        d: usize,
        #[arg(long = "M")]
        num_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit α to a sample file.
    Estimate {
        #[arg(long, value_parser = parse_solver)]
        solver: SolverKind,
        #[arg(long)]
        data: PathBuf,
        #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"])]
        bounds: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 10_000)]
        max_iter: usize,
        /// Final parameters; the trace goes next to it unless --trace is set.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a benchmark grid described by a key=value file.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Include wall-clock columns and the time-bucket summary.
        #[arg(long)]
        timings: bool,
    },
    /// Tabulate the curvature function.
    Curvature {
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 1e6)]
        tmax: f64,
        #[arg(long, default_value_t = 0.0)]
        tmin: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_family(s: &str) -> std::result::Result<MeanFamily, String> {
    s.parse().map_err(|e: vbmm::Error| e.to_string())
}

fn parse_solver(s: &str) -> std::result::Result<SolverKind, String> {
    s.parse().map_err(|e: vbmm::Error| e.to_string())
}

fn parse_scale_arg(s: &str) -> std::result::Result<f64, String> {
    parse_scale(s).map_err(|e| e.to_string())
}

fn trace_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("alpha");
    out.with_file_name(format!("{stem}_trace.csv"))
}

fn trace_csv(trace: &ConvergenceTrace) -> String {
    let mut out = String::from("iteration,objective,elapsed_secs,step_divergence\n");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.iteration,
            fmt_float(r.objective),
            fmt_float(r.elapsed_secs),
            r.step_divergence.map_or_else(String::new, fmt_float)
        );
    }
    out
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            family,
            scale,
            d,
            num_samples,
            seed,
            out,
        } => {
            let spec = ExperimentSpec {
                family,
                scale,
                d,
                num_samples,
                ..ExperimentSpec::default()
            };
            spec.validate()?;
            let data = sample(&build_alpha_true(&spec)?, num_samples, seed)?;
            write_samples_csv(&out, &data)?;
        }
        Command::Estimate {
            solver,
            data,
            bounds,
            tol,
            max_iter,
            out,
            trace,
        } => {
            let samples = read_samples_csv(&data)?;
            let bx = bounds
                .map(|b| BoxConstraint::uniform(samples.dim(), b[0], b[1]))
                .transpose()?;
            if bx.is_some() && !solver.supports_box() {
                bail!("solver '{solver}' does not support --box; use vbmm or bmm");
            }
            let spec = ExperimentSpec {
                d: samples.dim(),
                num_samples: samples.num_samples(),
                solvers: vec![solver],
                tol,
                max_iterations: max_iter,
                box_bounds: bx.as_ref().map(|b| (b.lower()[0], b.upper()[0])),
                ..ExperimentSpec::default()
            };
            spec.validate()?;
            let x0 = start_point(samples.dim(), bx.as_ref())?;
            let (alpha, tr) = run_solver(solver, &samples, &x0, &spec, bx.as_ref(), None)?;
            write_params_csv(&out, &alpha)?;
            let trace_file = trace.unwrap_or_else(|| trace_path(&out));
            fs::write(&trace_file, trace_csv(&tr))
                .with_context(|| format!("writing {}", trace_file.display()))?;
            eprintln!(
                "{solver}: {} after {} iterations, objective {}",
                tr.status,
                tr.iterations(),
                tr.final_objective().map_or_else(String::new, fmt_float)
            );
        }
        Command::Bench { spec, out, timings } => {
            let text = fs::read_to_string(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let grid = parse_spec(&text).with_context(|| format!("in {}", spec.display()))?;
            let report = bench(&grid, &out, BenchOptions { timings })?;
            for f in &report.files {
                eprintln!("wrote {}", f.display());
            }
        }
        Command::Curvature {
            points,
            tmax,
            tmin,
            out,
        } => {
            let rows = emit_curvature_table(tmin, tmax, points)?;
            fs::write(&out, curvature_table_csv(&rows))
                .with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
