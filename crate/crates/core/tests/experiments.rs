use onel1::experiments::{
    add_noise, fit_logistic_midpoint, generate_mri_pattern, run_benchmark_suite, run_recovery_trial,
    BenchmarkConfig, Ensemble, FitStatus, ReferenceCurve, TrialSpec, DEFAULT_SUCCESS_THRESHOLD,
};
use onel1::rng;
use onel1::solvers::{SolverKind, SolverOptions};
use rand::Rng as _;

#[test]
fn logistic_fit_covers_the_true_midpoint() {
    let (rho_true, slope) = (0.35, 60.0);
    let rhos: Vec<f64> = (0..21).map(|i| 0.25 + 0.01 * i as f64).collect();
    let trials = 20;
    let mut r = rng::seeded(77);
    let mut covered = 0;
    for _ in 0..100 {
        let successes: Vec<usize> = rhos
            .iter()
            .map(|rho| {
                let p = 1.0 / (1.0 + (slope * (rho - rho_true)).exp());
                (0..trials).filter(|_| r.random::<f64>() < p).count()
            })
            .collect();
        let fit = fit_logistic_midpoint(&rhos, &successes, trials).unwrap();
        assert_eq!(fit.status, FitStatus::Fitted);
        covered += usize::from((fit.rho_hat - rho_true).abs() <= 3.0 * fit.std_error);
    }
    assert_eq!(covered, 100);
}

#[test]
fn noise_energy_concentrates() {
    let n = 7419;
    for seed in 0..5 {
        let sigma = 1.0 + seed as f64;
        let noisy = add_noise(&vec![0.0; n], sigma, seed).unwrap();
        let energy = noisy.iter().map(|e| e * e).sum::<f64>() / n as f64 / (sigma * sigma);
        let band = 4.0 * (2.0 / n as f64).sqrt();
        assert!((energy - 1.0).abs() <= band, "{energy}");
    }
}

#[test]
fn image_mask_matches_the_demo_budget() {
    let mask = generate_mri_pattern(256, 256, 7419, 3).unwrap();
    assert_eq!(mask.len(), 7419);
    assert!((mask.len() as f64 / 65536.0 - 0.113).abs() < 5e-4);
    let full = generate_mri_pattern(8, 8, 64, 3).unwrap();
    assert_eq!(full.indices(), (0..64).collect::<Vec<_>>().as_slice());
    assert!(generate_mri_pattern(8, 8, 65, 3).is_err());
}

#[test]
fn square_systems_always_recover() {
    for kind in [SolverKind::RoneL1, SolverKind::EoneL1, SolverKind::IstContinuation, SolverKind::Amp] {
        let spec = TrialSpec {
            delta: 1.0,
            rho: 0.05,
            len: 256,
            ensemble: Ensemble::PartialDct,
            seed: 4,
        };
        let rec = run_recovery_trial(&spec, kind, &SolverOptions::default(), DEFAULT_SUCCESS_THRESHOLD);
        assert!(rec.success, "{kind}: {rec:?}");
    }
}

#[test]
fn hard_cell_costs_the_exact_solver_far_more_calls() {
    let config = BenchmarkConfig {
        rhos: vec![0.22],
        trials: 3,
        solvers: vec![SolverKind::EoneL1, SolverKind::RoneL1],
        master_seed: 8,
        ..BenchmarkConfig::default()
    };
    let run = run_benchmark_suite(&config, &SolverOptions::default()).unwrap();
    assert_eq!(run.records.len(), 2);
    let eone = run.records[0].operator_calls.mean;
    let rone = run.records[1].operator_calls.mean;
    assert!(eone >= 5.0 * rone, "{eone} vs {rone}");
}

#[test]
fn benchmark_is_reproducible_and_one_record_per_cell() {
    let config = BenchmarkConfig {
        len: 256,
        rhos: vec![0.1],
        trials: 1,
        solvers: vec![SolverKind::RoneL1],
        ..BenchmarkConfig::default()
    };
    let opts = SolverOptions::default();
    let strip = |mut v: Vec<onel1::experiments::TrialRecord>| {
        for t in &mut v {
            t.wall_time = 0.0;
        }
        v
    };
    let a = run_benchmark_suite(&config, &opts).unwrap();
    let b = run_benchmark_suite(&config, &opts).unwrap();
    assert_eq!(a.records.len(), 1);
    assert_eq!(strip(a.trials), strip(b.trials));
}

#[test]
fn bundled_curve_is_increasing_and_interpolates() {
    let curve = ReferenceCurve::bundled();
    let pts: Vec<(f64, f64)> = curve.points().collect();
    assert!(pts.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
    for &(d, r) in &pts {
        assert_eq!(curve.rho_at(d), r);
    }
    let (d0, r0) = pts[10];
    let (d1, r1) = pts[11];
    let mid = curve.rho_at(0.5 * (d0 + d1));
    assert!((mid - 0.5 * (r0 + r1)).abs() < 1e-12);
    assert!(curve.rho_at(0.1) < 0.2);
}
