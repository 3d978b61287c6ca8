//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Criteria:
//!  1. f(N, [N]) equals the top eigenvalue of A^T A (1e-9 relative).
//!  2. Recursion inequality slack >= -1e-9 on 200 random instances.
//!  3. Net-passing inequality slack >= -1e-9 on 100 random instances.
//!  4. Bai-Yin regime: pareto alpha=6, fitted exponent in [0.35, 0.65],
//!     r^2 >= 0.95.
//!  5. Heavy regime: pareto alpha=3, fitted exponent in [1/3 - 0.2, 0.55].
//!  6. Gaussian control: median deviation in [1.6, 2.6] sqrt(n/N).
//!  7. Coloring: zero validity violations; exceedance frequency within
//!     bound + 3 sigma on every nonvacuous grid point.
//!  8. Sparsify corpus: zero rank/survivor violations, failure rate < 5%
//!     at C_K = 8, corpus-max measured ratio <= 1e4.
//!  9. Tail-bound validators: zero Monte Carlo violations beyond 3 sigma;
//!     measured tail-norm constant <= 32.
//! 10. Byte-identical outputs across worker counts.

use htcov::dist::{moment_bound, sample_matrix, DistributionSpec, Family, Provenance};
use htcov::experiments::{
    run_coloring_experiment, run_scaling, Caps, ColoringGrid, ExperimentConfig, SigmaSpec,
};
use htcov::matrix::{deviation_report, gram, CovarianceTarget};
use htcov::nets::build_sparse_net;
use htcov::quadforms::{check_net_passing, f_value, QuadFormContext};
use htcov::suites::{suite_order_stats, suite_recursion, suite_sparsify};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

const SEED: u64 = 0x41_43_43_45_50_54; // fixed acceptance seed

fn families() -> [Family; 5] {
    [
        Family::Gaussian,
        Family::IidSymmetricPareto { alpha: 6.0, t0: 1.0 },
        Family::IidSymmetricPareto { alpha: 3.0, t0: 1.0 },
        Family::IidStudentT { nu: 4.5 },
        Family::CoordinateDiscrete,
    ]
}

fn scaling_config(family: Family, n: usize, p: f64, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        dist: DistributionSpec::new(family, n).unwrap(),
        p,
        n_values: vec![n],
        ratio_values: vec![4.0, 16.0, 64.0, 256.0],
        trials,
        master_seed: SEED,
        caps: Caps::default(),
        coloring: ColoringGrid::default(),
        sigma: SigmaSpec::Identity,
    }
}

#[test]
fn criterion_01_f_identity() {
    let mut rng = htcov::rng::stream(SEED, &[1]);
    for inst in 0..100usize {
        let family = families()[inst % 5];
        let n = 1 + rng.random_range(0..6usize); // <= 6
        let big_n = n.max(1 + rng.random_range(0..8usize)).min(8); // <= 8
        let spec = DistributionSpec::new(family, n).unwrap();
        let a = sample_matrix(&spec, n, big_n, SEED + inst as u64).unwrap();
        let g = gram(&a);
        let ctx = QuadFormContext::new(&g);
        let all: Vec<usize> = (0..big_n).collect();
        let f = f_value(&ctx, big_n, &all).unwrap();
        assert!(f.exact);
        let oracle = a
            .rows()
            .tr_mul(a.rows())
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, &l| m.max(l));
        let rel = (f.value - oracle).abs() / oracle.max(1e-300);
        assert!(
            rel <= 1e-9,
            "instance {inst}: f = {} vs lambda_max = {} (rel {rel})",
            f.value,
            oracle
        );
    }
    println!("acceptance criterion 1 (f identity): PASS");
}

#[test]
fn criterion_02_recursion_inequality() {
    let report = suite_recursion(SEED, 200);
    assert_eq!(report.checks, 200);
    assert!(
        report.pass(),
        "recursion failures: {}\n{}",
        report.failures,
        report.to_csv()
    );
    println!("acceptance criterion 2 (recursion inequality): PASS");
}

#[test]
fn criterion_03_net_passing() {
    // 4 net configurations x 25 instances = 100 checks; nets are reused
    // across instances of the same configuration.
    let configs = [
        (7usize, 2usize, 0.4f64, 8usize, 3usize),
        (10, 2, 0.35, 10, 4),
        (8, 3, 0.6, 9, 2),
        (6, 1, 0.5, 12, 2),
    ];
    let mut rng = htcov::rng::stream(SEED, &[3]);
    let mut checked = 0usize;
    for (cfg_idx, &(q, h, rho, p, r)) in configs.iter().enumerate() {
        let net = build_sparse_net(q, h, rho).unwrap();
        for inst in 0..25usize {
            let heavy = inst % 2 == 1;
            let t = DMatrix::from_fn(p, q, |_, _| {
                let g: f64 = StandardNormal.sample(&mut rng);
                if heavy {
                    g * g * g
                } else {
                    g
                }
            });
            let out = check_net_passing(
                &t,
                r,
                h,
                rho,
                &net,
                2000,
                SEED + (cfg_idx * 100 + inst) as u64,
            )
            .unwrap();
            assert!(
                out.slack >= -1e-9,
                "config {cfg_idx} instance {inst}: slack {}",
                out.slack
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 100);
    println!("acceptance criterion 3 (net passing): PASS");
}

#[test]
fn criterion_04_bai_yin_regime() {
    let cfg = scaling_config(
        Family::IidSymmetricPareto { alpha: 6.0, t0: 1.0 },
        50,
        5.0,
        200,
    );
    let res = run_scaling(&cfg).unwrap();
    let fit = res.fit.expect("four ratios give a fit");
    assert!(
        (0.35..=0.65).contains(&fit.alpha),
        "fitted alpha {} outside [0.35, 0.65]",
        fit.alpha
    );
    assert!(fit.r_squared >= 0.95, "r^2 {} below 0.95", fit.r_squared);
    assert!((res.theory_alpha - 0.5).abs() < 1e-12);
    println!(
        "acceptance criterion 4 (Bai-Yin regime): PASS (alpha={:.4}, r2={:.4})",
        fit.alpha, fit.r_squared
    );
}

#[test]
fn criterion_05_heavy_regime() {
    let cfg = scaling_config(
        Family::IidSymmetricPareto { alpha: 3.0, t0: 1.0 },
        50,
        3.0,
        200,
    );
    let res = run_scaling(&cfg).unwrap();
    let fit = res.fit.expect("four ratios give a fit");
    let lo = 1.0 / 3.0 - 0.2;
    assert!(
        (lo..=0.55).contains(&fit.alpha),
        "fitted alpha {} outside [{lo}, 0.55]",
        fit.alpha
    );
    assert!((res.theory_alpha - 1.0 / 3.0).abs() < 1e-12);
    println!(
        "acceptance criterion 5 (heavy regime): PASS (alpha={:.4})",
        fit.alpha
    );
}

#[test]
fn criterion_06_gaussian_control() {
    let spec = DistributionSpec::new(Family::Gaussian, 50).unwrap();
    let mut devs: Vec<f64> = (0..50u64)
        .map(|t| {
            let a = sample_matrix(&spec, 50, 5000, SEED + 600 + t).unwrap();
            deviation_report(&a, CovarianceTarget::Identity)
                .unwrap()
                .deviation
        })
        .collect();
    devs.sort_by(f64::total_cmp);
    let median = 0.5 * (devs[24] + devs[25]);
    let rate = (50.0f64 / 5000.0).sqrt();
    assert!(
        median >= 1.6 * rate && median <= 2.6 * rate,
        "median {median} outside [{}, {}]",
        1.6 * rate,
        2.6 * rate
    );
    println!(
        "acceptance criterion 6 (gaussian control): PASS (median/rate = {:.3})",
        median / rate
    );
}

#[test]
fn criterion_07_coloring_tail_bound() {
    let cfg = ExperimentConfig {
        dist: DistributionSpec::new(Family::CoordinateDiscrete, 16).unwrap(),
        p: 4.0,
        n_values: vec![4, 16],
        ratio_values: vec![2.0, 8.0],
        trials: 1,
        master_seed: SEED,
        caps: Caps::default(),
        coloring: ColoringGrid {
            m_values: vec![2, 3],
            h_factors: vec![0.5, 1.0, 2.0],
            trials: 1000,
        },
        sigma: SigmaSpec::Identity,
    };
    // The analytic moment bound must be used (B = n^{p/2 - 1}).
    let profile = moment_bound(&cfg.dist, cfg.p).unwrap();
    assert_eq!(profile.provenance, Provenance::Analytic);
    let res = run_coloring_experiment(&cfg).unwrap();
    assert_eq!(res.validity_violations, 0, "greedy produced invalid classes");
    let checked = res.grid.iter().filter(|g| g.checked).count();
    for point in &res.grid {
        if point.checked {
            assert!(
                point.exceed_frequency <= point.tolerance,
                "grid n={} N={} m={} H={}: freq {} above bound {} + 3sigma",
                point.n,
                point.big_n,
                point.m,
                point.h,
                point.exceed_frequency,
                point.bound
            );
        }
    }
    assert!(checked > 0, "no nonvacuous grid points were exercised");
    println!(
        "acceptance criterion 7 (coloring tail bound): PASS ({checked} nonvacuous grid points)"
    );
}

#[test]
fn criterion_08_sparsify_corpus() {
    let report = suite_sparsify(SEED, 1000, 8.0, 64, 1e4);
    assert!(
        report.pass(),
        "sparsify corpus failures: {}\nnotes: {:?}",
        report.failures,
        report.notes
    );
    // The corpus must exercise certificates (not only search failures).
    let produced = report.rows.iter().filter(|r| !r.contains("search-failure")).count();
    assert!(produced >= 950, "only {produced} certificates produced");
    println!(
        "acceptance criterion 8 (sparsify corpus): PASS ({:?})",
        report.notes
    );
}

#[test]
fn criterion_09_tail_bound_validators() {
    let report = suite_order_stats(SEED, 32.0);
    assert!(
        report.pass(),
        "tail-bound validator failures: {}\n{}",
        report.failures,
        report.to_csv()
    );
    assert!(report.checks >= 10, "grid unexpectedly small");
    println!("acceptance criterion 9 (tail-bound validators): PASS");
}

#[test]
fn criterion_10_parallel_determinism() {
    let cfg = scaling_config(Family::Gaussian, 12, 4.0, 10);
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let csv1 = pool1.install(|| run_scaling(&cfg).unwrap().to_csv());
    let csv4 = pool4.install(|| run_scaling(&cfg).unwrap().to_csv());
    assert_eq!(csv1.as_bytes(), csv4.as_bytes(), "scaling output differs");

    let col_cfg = ExperimentConfig {
        dist: DistributionSpec::new(Family::CoordinateDiscrete, 4).unwrap(),
        p: 4.0,
        n_values: vec![4],
        ratio_values: vec![4.0],
        trials: 1,
        master_seed: SEED,
        caps: Caps::default(),
        coloring: ColoringGrid { m_values: vec![2], h_factors: vec![1.0], trials: 64 },
        sigma: SigmaSpec::Identity,
    };
    let a = pool1.install(|| run_coloring_experiment(&col_cfg).unwrap().to_csv());
    let b = pool4.install(|| run_coloring_experiment(&col_cfg).unwrap().to_csv());
    assert_eq!(a.as_bytes(), b.as_bytes(), "coloring output differs");

    let s1 = pool1.install(|| suite_sparsify(SEED, 50, 8.0, 64, 1e4).to_csv());
    let s4 = pool4.install(|| suite_sparsify(SEED, 50, 8.0, 64, 1e4).to_csv());
    assert_eq!(s1.as_bytes(), s4.as_bytes(), "sparsify suite output differs");
    println!("acceptance criterion 10 (parallel determinism): PASS");
}
