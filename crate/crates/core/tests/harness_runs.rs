use std::fs;
use std::path::PathBuf;

use vbmm::bregman::SolverConfig;
use vbmm::dirichlet::{fit_mm, sample, MajorantMetric};
use vbmm::harness::{
    bench, boxed_reference, build_alpha_true, parse_spec, reference_optimum, run_grid, run_solver,
    start_point, BenchOptions, ExperimentSpec, MeanFamily, SolverKind,
};

fn config(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    fs::read_to_string(path).unwrap()
}

fn small(family: MeanFamily, scale: f64) -> ExperimentSpec {
    ExperimentSpec {
        family,
        scale,
        d: 6,
        num_samples: 40,
        repetitions: 3,
        base_seed: 9,
        max_iterations: 500_000,
        ..ExperimentSpec::default()
    }
}

#[test]
fn alpha_true_examples() {
    let spec = ExperimentSpec {
        family: MeanFamily::M2,
        scale: 100.0,
        d: 10,
        ..ExperimentSpec::default()
    };
    let a = build_alpha_true(&spec).unwrap();
    assert!((a.as_slice()[0] - 1000.0 / 19.0).abs() < 1e-12);
    assert!((a.as_slice()[5] - 100.0 / 19.0).abs() < 1e-12);

    let spec = ExperimentSpec {
        family: MeanFamily::M3,
        scale: 1.0,
        d: 4,
        ..ExperimentSpec::default()
    };
    let a = build_alpha_true(&spec).unwrap();
    for (v, k) in a.as_slice().iter().zip(1..) {
        assert!((v - k as f64 / 10.0).abs() < 1e-15);
    }
    assert!((a.total() - 1.0).abs() < 1e-15);
}

#[test]
fn shipped_configs_parse() {
    let desk = parse_spec(&config("desk.cfg")).unwrap();
    assert_eq!(desk.len(), 9);
    assert!(desk.iter().all(|s| s.solvers.len() == 4 && s.box_bounds.is_none()));
    assert!(desk.iter().all(|s| s.d == 50 && s.num_samples == 100 && s.repetitions == 20));

    let boxed = parse_spec(&config("box.cfg")).unwrap();
    assert_eq!(boxed.len(), 9);
    for s in &boxed {
        assert_eq!(s.box_bounds, Some((1e-10, 1.0)));
        assert!(s.solvers.iter().all(|k| k.supports_box()));
    }
}

#[test]
fn spec_errors() {
    assert!(parse_spec("colour = red\n").is_err());
    assert!(parse_spec("d = fifty\n").is_err());
    assert!(parse_spec("box_lo = 1e-10\nbox_hi = 1\nsolvers = newton\n").is_err());
    assert!(parse_spec("family = m4\n").is_err());
    let grid = parse_spec("# comment\nd = 3,4\nM = 10,20\n").unwrap();
    assert_eq!(grid.len(), 4);
}

#[test]
fn reference_matches_long_mm_run() {
    for (k, family) in [MeanFamily::M1, MeanFamily::M2, MeanFamily::M3].into_iter().enumerate() {
        let spec = small(family, 10.0);
        let data = sample(&build_alpha_true(&spec).unwrap(), 60, k as u64).unwrap();
        let r = reference_optimum(&data).unwrap();
        let cfg = SolverConfig {
            rel_change_tolerance: 1e-15,
            max_iterations: 200_000,
            ..SolverConfig::default()
        };
        let x0 = start_point(spec.d, None).unwrap();
        let (x, _) = fit_mm(&data, &x0, MajorantMetric::Variable, None, &cfg, None).unwrap();
        for (p, q) in r.as_slice().iter().zip(x.as_slice()) {
            assert!((p - q).abs() <= 1e-9 * p.max(1.0));
        }
    }
}

#[test]
fn large_sample_estimate_recovers_truth() {
    let spec = ExperimentSpec {
        family: MeanFamily::M1,
        scale: 1.0,
        d: 10,
        ..ExperimentSpec::default()
    };
    let truth = build_alpha_true(&spec).unwrap();
    let data = sample(&truth, 100_000, 2024).unwrap();
    let est = reference_optimum(&data).unwrap();
    let num: f64 = est
        .as_slice()
        .iter()
        .zip(truth.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let den = truth.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(num / den <= 0.05, "{}", num / den);
}

#[test]
fn grid_runs_converge_for_every_solver() {
    for family in [MeanFamily::M1, MeanFamily::M2, MeanFamily::M3] {
        for scale in [100.0, 10.0, 1.0] {
            let spec = small(family, scale);
            let table = run_grid(&spec).unwrap();
            assert_eq!(table.runs.len(), spec.repetitions * SolverKind::ALL.len());
            for run in &table.runs {
                assert_eq!(run.status, "converged", "{} {}", spec.id(), run.solver);
                assert!(run.final_rse <= 1e-10, "{} {}", spec.id(), run.solver);
            }
        }
    }
}

#[test]
fn boxed_runs_stay_feasible() {
    let spec = ExperimentSpec {
        box_bounds: Some((1e-10, 1.0)),
        solvers: vec![SolverKind::Vbmm, SolverKind::Bmm],
        ..small(MeanFamily::M3, 100.0)
    };
    let bx = spec.box_constraint().unwrap().unwrap();
    let data = sample(&build_alpha_true(&spec).unwrap(), 40, 3).unwrap();
    let x0 = start_point(spec.d, Some(&bx)).unwrap();
    assert!(x0.as_slice().iter().all(|v| *v == 1.0));
    let reference = boxed_reference(&data, &bx).unwrap();
    for kind in spec.solvers.iter().copied() {
        let (x, _) = run_solver(kind, &data, &x0, &spec, Some(&bx), Some(reference.as_slice())).unwrap();
        assert!(bx.contains(x.as_slice()));
    }
    assert!(run_solver(SolverKind::Newton, &data, &x0, &spec, Some(&bx), None).is_err());

    let table = run_grid(&spec).unwrap();
    assert!(table.runs.iter().all(|r| r.status == "converged"));
}

#[test]
fn bench_writes_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let specs = vec![small(MeanFamily::M1, 10.0), small(MeanFamily::M2, 1.0)];
    let report = bench(&specs, dir.path(), BenchOptions { timings: true }).unwrap();
    assert_eq!(report.tables.len(), 2);
    for name in ["summary.csv", "runs.csv", "time_summary.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    for spec in &specs {
        let traces = fs::read_to_string(dir.path().join(format!("traces_{}.csv", spec.id()))).unwrap();
        assert!(traces.lines().next().unwrap().ends_with("elapsed_secs"));
    }
    let runs = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 2 * 3 * SolverKind::ALL.len());

    let quiet = tempfile::tempdir().unwrap();
    bench(&specs, quiet.path(), BenchOptions::default()).unwrap();
    assert!(!quiet.path().join("time_summary.csv").exists());
}
