use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vbmm::baselines::{newton_dirichlet, NewtonConfig};
use vbmm::bregman::{golden_section_by_difference, SolverConfig, TerminationStatus};
use vbmm::dirichlet::{
    bmm_dirichlet_step, curvature, fit_mm, nll, nll_at, nll_gradient, nll_gradient_at,
    projected_gradient_residual, read_samples_csv, sample, samples_from_csv, vbmm_dirichlet_step,
    vbmm_dirichlet_step_boxed, write_samples_csv, BoxConstraint, DirichletParams,
    MajorantMetric, SampleSet,
};
use vbmm::specfun::{digamma, ln_gamma, trigamma, EULER_GAMMA, ZETA_2};
use vbmm::Error;

fn params(v: &[f64]) -> DirichletParams {
    DirichletParams::new(v.to_vec()).unwrap()
}

fn toy() -> SampleSet {
    SampleSet::from_rows(vec![vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap()
}

fn converged_mle(data: &SampleSet) -> DirichletParams {
    let cfg = NewtonConfig {
        gradient_norm_tolerance: 1e-13,
        ..NewtonConfig::default()
    };
    let x0 = DirichletParams::constant(data.dim(), 10.0).unwrap();
    newton_dirichlet(&x0, data, &cfg, None).unwrap().0
}

#[test]
fn nll_at_unit_alpha_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let data = sample(&params(&[rng.random_range(0.3..5.0), 2.0]), 15, rng.random()).unwrap();
        assert!(nll(&params(&[1.0, 1.0]), &data).unwrap().abs() < 1e-13);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let d = rng.random_range(2..=6);
        let alpha: Vec<f64> = (0..d).map(|_| rng.random_range(0.3..10.0)).collect();
        let data = sample(&params(&alpha), 25, rng.random()).unwrap();
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..20.0)).collect();
        let g = nll_gradient_at(&x, &data).unwrap();
        for i in 0..d {
            let h = 1e-6 * x[i];
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (nll_at(&xp, &data).unwrap() - nll_at(&xm, &data).unwrap()) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()), "{fd} vs {}", g[i]);
        }
    }
}

#[test]
fn gradient_symmetry_and_optimality() {
    let data = SampleSet::from_rows(vec![vec![0.2, 0.2, 0.6], vec![0.2, 0.6, 0.2], vec![0.6, 0.2, 0.2]])
        .unwrap();
    let g = nll_gradient(&params(&[2.0, 2.0, 2.0]), &data).unwrap();
    assert!((g[0] - g[1]).abs() < 1e-12 && (g[1] - g[2]).abs() < 1e-12);

    let data = sample(&params(&[0.5, 3.0, 1.2, 7.0, 2.0]), 50, 5).unwrap();
    let star = converged_mle(&data);
    let g = nll_gradient(&star, &data).unwrap();
    assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-8);
}

#[test]
fn hessian_is_positive_definite() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..1_000 {
        let d = rng.random_range(2..=10);
        let m = rng.random_range(2..=100) as f64;
        let alpha: Vec<f64> = (0..d).map(|_| (rng.random_range(-4.0f64..4.0)).exp()).collect();
        let z = trigamma(alpha.iter().sum()).unwrap();
        let h = DMatrix::from_fn(d, d, |i, j| {
            let diag = if i == j { trigamma(alpha[i]).unwrap() } else { 0.0 };
            m * (diag - z)
        });
        let eig = SymmetricEigen::new(h);
        assert!(eig.eigenvalues.min() > 0.0, "{alpha:?}");
    }
}

#[test]
fn scalar_majorant_holds_on_grid() {
    let grid: Vec<f64> = (1..=200).map(|k| 50.0 * k as f64 / 200.0).collect();
    for &t in &grid {
        let (phi_t, dphi_t, c) = (
            ln_gamma(t + 1.0).unwrap(),
            digamma(t + 1.0).unwrap(),
            curvature(t).unwrap(),
        );
        for &x in &grid {
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = phi_t + dphi_t * (x - t) + 0.5 * c * (x - t) * (x - t);
            assert!(lhs <= rhs + 1e-12 * (1.0 + lhs.abs()), "x={x}, t={t}");
        }
        // the parabola touches again at x = 0
        let at_zero = phi_t - dphi_t * t + 0.5 * c * t * t;
        assert!(at_zero.abs() <= 1e-12 * (1.0 + phi_t.abs()));
    }
}

#[test]
fn trigamma_is_decreasing() {
    let mut prev = f64::INFINITY;
    for k in 0..=10_000 {
        let t = 1e-6 * 1.0017f64.powi(k);
        let v = trigamma(t + 1.0).unwrap();
        assert!(v < prev);
        prev = v;
    }
}

#[test]
fn curvature_examples() {
    assert_eq!(curvature(0.0).unwrap(), ZETA_2);
    assert!((curvature(1.0).unwrap() - 2.0 * (1.0 - EULER_GAMMA)).abs() < 1e-14);
    let big = curvature(1e6).unwrap();
    assert!(big > 0.0 && big < 1e-5);
    assert!(curvature(-1.0).is_err());
    assert!(curvature(f64::NAN).is_err());
    let mut prev = ZETA_2;
    for k in 0..600 {
        let c = curvature(1e-9 * 10f64.powf(k as f64 / 40.0)).unwrap();
        assert!(c > 0.0 && c <= prev);
        prev = c;
    }
}

#[test]
fn step_matches_surrogate_minimizer_on_small_example() {
    let data = toy();
    let beta = [1.0, 1.0];
    let step = vbmm_dirichlet_step(&params(&beta), &data).unwrap();
    let c = curvature(1.0).unwrap();
    for i in 0..2 {
        // ψ(β) + 1/β − ψ(β̄) − ḡᵢ is the slope of the smooth part at β
        let slope = digamma(1.0).unwrap() + 1.0 - digamma(2.0).unwrap() - data.log_geo_mean()[i];
        let diff = |u: f64, v: f64| (u - v) * (slope + 0.5 * c * (u + v - 2.0)) - (u / v).ln();
        let oracle = golden_section_by_difference(diff, 1e-9, 50.0, 1e-14);
        assert!((step.as_slice()[i] - oracle).abs() <= 1e-8 * oracle);
    }
}

#[test]
fn step_has_mle_as_fixed_point() {
    let data = sample(&params(&[0.8, 2.5, 6.0]), 60, 8).unwrap();
    let star = converged_mle(&data);
    for step in [vbmm_dirichlet_step, bmm_dirichlet_step] {
        let next = step(&star, &data).unwrap();
        for (a, b) in next.as_slice().iter().zip(star.as_slice()) {
            assert!((a - b).abs() <= 1e-9 * b);
        }
    }
}

#[test]
fn step_output_is_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let data = sample(&params(&[0.4, 1.0, 20.0]), 30, 2).unwrap();
    for _ in 0..10_000 {
        let beta: Vec<f64> = (0..3).map(|_| (rng.random_range(-20.0f64..20.0)).exp()).collect();
        let next = vbmm_dirichlet_step(&params(&beta), &data).unwrap();
        assert!(next.as_slice().iter().all(|v| *v > 0.0 && v.is_finite()));
    }
}

#[test]
fn boxed_step_examples() {
    let data = sample(&params(&[3.0, 9.0, 27.0]), 40, 4).unwrap();
    let beta = params(&[2.0, 2.0, 2.0]);
    let free = vbmm_dirichlet_step(&beta, &data).unwrap();
    let loose = BoxConstraint::uniform(3, 1e-10, 1e300).unwrap();
    assert_eq!(vbmm_dirichlet_step_boxed(&beta, &data, &loose).unwrap(), free);

    let beta = params(&[0.5, 0.5, 0.5]);
    let free = vbmm_dirichlet_step(&beta, &data).unwrap();
    assert!(free.as_slice().iter().any(|v| *v > 1.0));
    let unit = BoxConstraint::uniform(3, 1e-10, 1.0).unwrap();
    let boxed = vbmm_dirichlet_step_boxed(&beta, &data, &unit).unwrap();
    for (f, b) in free.as_slice().iter().zip(boxed.as_slice()) {
        if *f > 1.0 {
            assert_eq!(*b, 1.0);
        }
    }
}

#[test]
fn boxed_limit_satisfies_kkt() {
    let data = sample(&params(&[0.3, 2.0, 5.0, 40.0]), 80, 6).unwrap();
    let bx = BoxConstraint::new(vec![1e-10, 1e-10, 2.0, 1e-10], vec![1.0, 1.0, 3.0, 1.0]).unwrap();
    let cfg = SolverConfig {
        rel_change_tolerance: 1e-14,
        ..SolverConfig::default()
    };
    let x0 = params(&[1.0, 1.0, 2.5, 1.0]);
    let (x, trace) = fit_mm(&data, &x0, MajorantMetric::Variable, Some(&bx), &cfg, None).unwrap();
    assert_eq!(trace.status, TerminationStatus::Converged);
    assert!(projected_gradient_residual(x.as_slice(), &data, &bx).unwrap() <= 1e-8);
    let g = nll_gradient(&x, &data).unwrap();
    for i in 0..4 {
        let v = x.as_slice()[i];
        if v == bx.upper()[i] {
            assert!(g[i] <= 0.0);
        } else if v == bx.lower()[i] {
            assert!(g[i] >= 0.0);
        } else {
            assert!(g[i].abs() / data.num_samples() as f64 <= 1e-8);
        }
    }
    let outside = params(&[1.0, 1.0, 1.0, 1.0]);
    assert!(matches!(
        fit_mm(&data, &outside, MajorantMetric::Variable, Some(&bx), &cfg, None),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn bmm_and_vbmm_reach_same_minimizer() {
    let data = sample(&params(&[1.0, 2.0, 3.0, 4.0, 5.0]), 50, 10).unwrap();
    let cfg = SolverConfig {
        rel_change_tolerance: 1e-13,
        max_iterations: 100_000,
        ..SolverConfig::default()
    };
    let x0 = DirichletParams::constant(5, 10.0).unwrap();
    let (v, _) = fit_mm(&data, &x0, MajorantMetric::Variable, None, &cfg, None).unwrap();
    let (b, _) = fit_mm(&data, &x0, MajorantMetric::Fixed, None, &cfg, None).unwrap();
    let n = converged_mle(&data);
    for ((p, q), r) in v.as_slice().iter().zip(b.as_slice()).zip(n.as_slice()) {
        assert!((p - q).abs() <= 1e-7 * r && (p - r).abs() <= 1e-7 * r);
    }
}

#[test]
fn small_problem_terminal_gradient() {
    let data = sample(&params(&[0.7, 1.9, 4.2]), 20, 12).unwrap();
    let cfg = SolverConfig {
        rel_change_tolerance: 1e-13,
        ..SolverConfig::default()
    };
    let x0 = DirichletParams::constant(3, 10.0).unwrap();
    let (x, _) = fit_mm(&data, &x0, MajorantMetric::Variable, None, &cfg, None).unwrap();
    let g = nll_gradient(&x, &data).unwrap();
    assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-8);
    let n = converged_mle(&data);
    for (p, q) in x.as_slice().iter().zip(n.as_slice()) {
        assert!((p - q).abs() <= 1e-7 * q);
    }
}

#[test]
fn identical_samples_end_without_convergence() {
    let data = SampleSet::from_rows(vec![vec![0.2, 0.3, 0.5]; 5]).unwrap();
    assert!(!data.has_distinct_rows());
    let cfg = SolverConfig {
        max_iterations: 200,
        ..SolverConfig::default()
    };
    let x0 = DirichletParams::constant(3, 10.0).unwrap();
    let (x, trace) = fit_mm(&data, &x0, MajorantMetric::Variable, None, &cfg, None).unwrap();
    assert_eq!(trace.status, TerminationStatus::MaxIterations);
    // the parameters drift off towards infinity along the mean direction
    assert!(x.total() > 30.0);
}

#[test]
fn sampler_moments_match_mean_and_variance() {
    let s = 10.0;
    let mbar = [0.1, 0.2, 0.3, 0.4];
    let alpha: Vec<f64> = mbar.iter().map(|m| s * m).collect();
    let n = 100_000;
    let data = sample(&params(&alpha), n, 77).unwrap();
    for (i, &m) in mbar.iter().enumerate() {
        let mean = data.rows().map(|r| r[i]).sum::<f64>() / n as f64;
        let se = (m * (1.0 - m) / (s + 1.0) / n as f64).sqrt();
        assert!((mean - m).abs() <= 3.0 * se, "component {i}: {mean} vs {m}");
    }
    assert!(data.log_geo_mean().iter().all(|g| *g <= 0.0));
}

#[test]
fn ingestion_rules() {
    assert!(samples_from_csv("0.5,0.5\n0.25,0.75\n", "t").is_ok());
    // off by 1e-10: renormalized
    let s = samples_from_csv("0.5,0.5000000001\n0.25,0.75\n", "t").unwrap();
    assert!((s.row(0).iter().sum::<f64>() - 1.0).abs() <= 1e-15);
    // off by 1e-6: rejected
    assert!(samples_from_csv("0.5,0.500001\n0.25,0.75\n", "t").is_err());
    assert!(samples_from_csv("0.0,1.0\n0.25,0.75\n", "t").is_err());
    assert!(samples_from_csv("1e-301,1.0\n0.25,0.75\n", "t").is_err());
    assert!(samples_from_csv("0.5,0.5\n0.2,0.3,0.5\n", "t").is_err());
    assert!(SampleSet::from_rows(vec![]).is_err());
}

#[test]
fn sample_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let data = sample(&params(&[0.05, 0.5, 5.0, 50.0]), 300, 13).unwrap();
    write_samples_csv(&path, &data).unwrap();
    assert_eq!(read_samples_csv(&path).unwrap(), data);
    assert!(matches!(read_samples_csv(&dir.path().join("missing.csv")), Err(Error::Io { .. })));
}

#[test]
fn invalid_inputs_are_reported() {
    assert!(DirichletParams::new(vec![1.0, 0.0]).is_err());
    assert!(DirichletParams::new(vec![1.0, f64::INFINITY]).is_err());
    assert!(BoxConstraint::uniform(2, 0.0, 1.0).is_err());
    assert!(BoxConstraint::uniform(2, 2.0, 1.0).is_err());
    let data = toy();
    assert!(matches!(
        nll(&params(&[1.0, 1.0, 1.0]), &data),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(sample(&params(&[1.0, 1.0]), 1, 0).is_err());
}
