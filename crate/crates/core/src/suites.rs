//! Invariant corpora for the verification CLI: each suite exercises one
//! module's bound or construction on a seeded corpus and reports CSV rows
//! plus a pass/fail summary.

use crate::concentration::{hoeffding_bound, kesten_bound, levy_concentration};
use crate::dist::{sample_matrix, DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::experiments::{run_coloring_experiment, ExperimentConfig};
use crate::matrix::gram;
use crate::nets::{build_sparse_net, net_quadform_check};
use crate::order_stats::{kmax_all, norm_tail_bound, order_stat_tail_bound, tail_l2_norm};
use crate::quadforms::{check_net_passing, check_raw_recurrent, f_value, g_value, QuadFormContext};
use crate::rng::{self, domain};
use crate::sparsify::{sparsify, verify_certificate, CertificateCase, SparsifyParams};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Pareto, StandardNormal};

/// Names of the available suites, in CLI order.
pub const SUITE_NAMES: [&str; 7] = [
    "nets",
    "quadforms",
    "recursion",
    "coloring",
    "sparsify",
    "concentration",
    "order-stats",
];

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub header: String,
    pub rows: Vec<String>,
    pub checks: usize,
    pub failures: usize,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str, header: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            header: header.to_string(),
            rows: Vec::new(),
            checks: 0,
            failures: 0,
            notes: Vec::new(),
        }
    }

    fn record(&mut self, row: String, pass: bool) {
        self.rows.push(row);
        self.checks += 1;
        if !pass {
            self.failures += 1;
        }
    }

    pub fn pass(&self) -> bool {
        self.failures == 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header);
        out.push('\n');
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        for note in &self.notes {
            out.push_str(&format!("#note {note}\n"));
        }
        out.push_str(&format!(
            "#summary suite={} checks={} failures={}\n",
            self.suite, self.checks, self.failures
        ));
        out
    }
}

/// Dispatch by suite name.
pub fn run_verification_suite(suite: &str, config: &ExperimentConfig) -> Result<SuiteReport> {
    match suite {
        "nets" => Ok(suite_nets(config.master_seed)),
        "quadforms" => Ok(suite_quadforms(config.master_seed)),
        "recursion" => Ok(suite_recursion(config.master_seed, 200)),
        "coloring" => suite_coloring(config),
        "sparsify" => Ok(suite_sparsify(
            config.master_seed,
            1000,
            config.caps.c_k,
            config.caps.max_draws,
            config.caps.c_cap,
        )),
        "concentration" => Ok(suite_concentration(config.master_seed)),
        "order-stats" => Ok(suite_order_stats(
            config.master_seed,
            config.caps.tail_constant_cap,
        )),
        other => Err(Error::Parameter(format!(
            "unknown suite `{other}`; expected one of {SUITE_NAMES:?}"
        ))),
    }
}

fn mixed_family(idx: usize) -> Family {
    match idx % 5 {
        0 => Family::Gaussian,
        1 => Family::IidSymmetricPareto { alpha: 3.0, t0: 1.0 },
        2 => Family::IidSymmetricPareto { alpha: 6.0, t0: 1.0 },
        3 => Family::IidStudentT { nu: 4.5 },
        _ => Family::CoordinateDiscrete,
    }
}

/// Sparse-net coverage probes and the dense quadratic-form net bound.
pub fn suite_nets(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("nets", "suite,instance_id,lhs,rhs,slack,pass_flag");
    let mut rng = rng::stream(seed, &[domain::SUITE, 1]);

    // Coverage: max probe distance must stay within the net radius.
    for (id, (ambient, r, rho, probes)) in [
        (2usize, 1usize, 1.0f64, 2000usize),
        (6, 2, 0.3, 10_000),
        (8, 2, 0.4, 5_000),
        (8, 3, 0.6, 3_000),
    ]
    .into_iter()
    .enumerate()
    {
        let net = build_sparse_net(ambient, r, rho).expect("envelope");
        let mut worst = 0.0f64;
        for _ in 0..probes {
            let mut support: Vec<usize> = Vec::new();
            let size = 1 + rng.random_range(0..r);
            while support.len() < size {
                let j = rng.random_range(0..ambient);
                if !support.contains(&j) {
                    support.push(j);
                }
            }
            let mut x = vec![0.0f64; ambient];
            loop {
                let mut norm_sq = 0.0;
                for &j in &support {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    x[j] = g;
                    norm_sq += g * g;
                }
                if norm_sq > 0.0 {
                    for &j in &support {
                        x[j] /= norm_sq.sqrt();
                    }
                    break;
                }
            }
            worst = worst.max(net.covering_distance(&x).unwrap_or(f64::INFINITY));
        }
        let pass = worst <= rho + 1e-12;
        rep.record(
            format!("nets,cover-{id},{worst},{rho},{},{}", rho - worst, pass as u8),
            pass,
        );
        rep.notes.push(format!(
            "net N={ambient} r={r} rho={rho}: cardinality={} c_net={:.3}",
            net.cardinality, net.c_net
        ));
    }

    // Dense quadratic-form net bound.
    let mut quad_instance = |id: &str, m: &DMatrix<f64>, rho: f64, probes: usize, s: u64| {
        match net_quadform_check(m, rho, probes, s) {
            Ok(out) => {
                let slack = out.net_bound - out.probe_sup;
                rep.record(
                    format!(
                        "nets,quad-{id},{},{},{slack},{}",
                        out.probe_sup, out.net_bound, out.pass as u8
                    ),
                    out.pass,
                );
            }
            Err(e) => {
                rep.record(format!("nets,quad-{id},nan,nan,nan,0"), false);
                rep.notes.push(format!("quad-{id}: {e}"));
            }
        }
    };
    quad_instance("identity", &DMatrix::identity(3, 3), 0.25, 1000, seed ^ 1);
    quad_instance("zero", &DMatrix::zeros(4, 4), 0.3, 1000, seed ^ 2);
    let sym = |n: usize, rng: &mut rand_chacha::ChaCha8Rng| {
        let half = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
        (&half + half.transpose()) * 0.5
    };
    let m4 = sym(4, &mut rng);
    quad_instance("random4", &m4, 0.25, 10_000, seed ^ 3);
    let m5 = sym(5, &mut rng);
    quad_instance("random5", &m5, 0.2, 100_000, seed ^ 4);
    rep
}

/// f/g oracle properties on random instances.
pub fn suite_quadforms(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("quadforms", "suite,instance_id,lhs,rhs,slack,pass_flag");
    let mut rng = rng::stream(seed, &[domain::SUITE, 2]);
    for inst in 0..25usize {
        let fam = mixed_family(inst);
        let n = 2 + inst % 5;
        let big_n = 4 + inst % 5;
        let spec = DistributionSpec::new(fam, n).expect("valid family");
        let a = sample_matrix(&spec, n, big_n, seed ^ (3000 + inst as u64)).expect("sampling");
        let g = gram(&a);
        let ctx = QuadFormContext::new(&g);
        let all: Vec<usize> = (0..big_n).collect();

        // Identity: f(N, [N]) equals the top eigenvalue of A^T A.
        let f_full = f_value(&ctx, big_n, &all).expect("envelope").value;
        let oracle = a
            .rows()
            .tr_mul(a.rows())
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, &l| m.max(l));
        let rel = (f_full - oracle).abs() / oracle.max(1e-300);
        rep.record(
            format!(
                "quadforms,f-identity-{inst},{f_full},{oracle},{},{}",
                oracle - f_full,
                (rel <= 1e-9) as u8
            ),
            rel <= 1e-9,
        );

        // Monotonicity in k.
        let mut prev = 0.0;
        let mut monotone = true;
        for k in 1..=big_n {
            let v = f_value(&ctx, k, &all).expect("envelope").value;
            monotone &= v >= prev - 1e-12;
            prev = v;
        }
        rep.record(
            format!("quadforms,f-monotone-{inst},0,0,0,{}", monotone as u8),
            monotone,
        );

        // Split symmetry and domination by f(2k).
        let i_set: Vec<usize> = all.iter().copied().filter(|_| rng.random::<bool>()).collect();
        let comp: Vec<usize> = all.iter().copied().filter(|v| !i_set.contains(v)).collect();
        let k = 1 + rng.random_range(0..3usize);
        let forward = g_value(&ctx, k, &all, &i_set).expect("envelope").value;
        let backward = g_value(&ctx, k, &all, &comp).expect("envelope").value;
        let sym_ok = (forward - backward).abs() <= 1e-9 * forward.max(1.0);
        rep.record(
            format!(
                "quadforms,g-symmetry-{inst},{forward},{backward},{},{}",
                forward - backward,
                sym_ok as u8
            ),
            sym_ok,
        );
        let f2k = f_value(&ctx, 2 * k, &all).expect("envelope").value;
        let dom_ok = forward <= f2k + 1e-9;
        rep.record(
            format!(
                "quadforms,g-le-f2k-{inst},{forward},{f2k},{},{}",
                f2k - forward,
                dom_ok as u8
            ),
            dom_ok,
        );
    }

    // Net-passing instances (shares the suite with the f/g oracles).
    let net = build_sparse_net(7, 2, 0.4).expect("envelope");
    for inst in 0..20usize {
        let t = DMatrix::from_fn(8, 7, |_, _| {
            let v: f64 = StandardNormal.sample(&mut rng);
            if inst % 2 == 1 {
                v * v * v // heavier tails on odd instances
            } else {
                v
            }
        });
        match check_net_passing(&t, 3, 2, 0.4, &net, 2000, seed ^ (500 + inst as u64)) {
            Ok(out) => {
                let pass = out.slack >= -1e-9;
                rep.record(
                    format!(
                        "quadforms,net-passing-{inst},{},{},{},{}",
                        out.lhs, out.rhs, out.slack, pass as u8
                    ),
                    pass,
                );
            }
            Err(e) => {
                rep.record(format!("quadforms,net-passing-{inst},nan,nan,nan,0"), false);
                rep.notes.push(format!("net-passing-{inst}: {e}"));
            }
        }
    }
    rep
}

/// The m = 1 recursion inequality on a random corpus.
pub fn suite_recursion(seed: u64, instances: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("recursion", "suite,instance_id,lhs,rhs,slack,pass_flag");
    let mut rng = rng::stream(seed, &[domain::SUITE, 3]);
    for inst in 0..instances {
        let fam = mixed_family(inst);
        let n = 2 + rng.random_range(0..5usize); // <= 6
        let big_n = 4 + rng.random_range(0..7usize); // <= 10
        let spec = DistributionSpec::new(fam, n).expect("valid family");
        let a = sample_matrix(&spec, n, big_n, seed ^ (9000 + inst as u64)).expect("sampling");
        let g = gram(&a);
        let ctx = QuadFormContext::new(&g);
        let all: Vec<usize> = (0..big_n).collect();
        let c_set: Vec<usize> = if inst % 3 == 0 {
            all.clone()
        } else {
            all.iter().copied().filter(|_| rng.random::<bool>()).collect()
        };
        let i_set: Vec<usize> = all.iter().copied().filter(|_| rng.random::<bool>()).collect();
        let k = 1 + rng.random_range(0..4usize);
        match check_raw_recurrent(&ctx, k, &c_set, &i_set) {
            Ok(out) => {
                let pass = out.slack >= -1e-9;
                rep.record(
                    format!(
                        "recursion,{inst},{},{},{},{}",
                        out.lhs, out.rhs, out.slack, pass as u8
                    ),
                    pass,
                );
            }
            Err(e) => {
                rep.record(format!("recursion,{inst},nan,nan,nan,0"), false);
                rep.notes.push(format!("instance {inst}: {e}"));
            }
        }
    }
    rep
}

/// Coloring validity plus the chromatic tail bound, via the experiment
/// driver.
pub fn suite_coloring(config: &ExperimentConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(
        "coloring",
        crate::experiments::ColoringResult::CSV_HEADER,
    );
    let res = run_coloring_experiment(config)?;
    for r in &res.records {
        rep.rows.push(format!(
            "{},{},{},{},{},{},{},{},{}",
            r.n, r.big_n, r.p, r.h, r.trial, r.color_count, r.bound_m, r.bound_value,
            r.exceeded as u8
        ));
    }
    for point in &res.grid {
        rep.checks += 1;
        if !point.pass {
            rep.failures += 1;
        }
        rep.notes.push(format!(
            "grid n={} N={} H={:.4} m={}: bound={:.4} freq={:.4} checked={}",
            point.n, point.big_n, point.h, point.m, point.bound, point.exceed_frequency,
            point.checked
        ));
    }
    rep.checks += 1;
    if res.validity_violations > 0 {
        rep.failures += 1;
    }
    rep.notes.push(format!(
        "validity violations: {}",
        res.validity_violations
    ));
    Ok(rep)
}

/// Sparsify certificate corpus: rank bound, case invariants, failure rate
/// and measured-constant cap.
pub fn suite_sparsify(
    seed: u64,
    instances: usize,
    c_k: f64,
    max_draws: usize,
    c_cap: f64,
) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "sparsify",
        "instance_id,case,rank,survivors,draws_used,measured_ratio,pass_flag",
    );
    let mut rng = rng::stream(seed, &[domain::SUITE, 5]);
    let dims_m = [4usize, 6, 8, 12, 16, 24, 32];
    let dims_k = [48usize, 64, 96, 128, 256, 512];
    let mut failures_at_ck = 0usize;
    let mut max_ratio = 0.0f64;
    let mut case_counts = [0usize; 3];
    for inst in 0..instances {
        let m = dims_m[inst % dims_m.len()];
        let k = dims_k[(inst / dims_m.len()) % dims_k.len()];
        let heavy = inst % 3 == 2;
        let t = DMatrix::from_fn(m, k, |_, _| {
            let g: f64 = StandardNormal.sample(&mut rng);
            if heavy {
                g * g * g
            } else {
                g
            }
        });
        // y alternates between flat, random dense and spiked profiles.
        let mut y: Vec<f64> = match inst % 4 {
            0 => vec![1.0; k],
            1 => (0..k).map(|_| StandardNormal.sample(&mut rng)).collect(),
            2 => {
                let mut v = vec![1.0; k];
                v[0] = (k as f64).sqrt() * 0.8;
                v
            }
            _ => (0..k).map(|j| 1.0 / (1.0 + j as f64)).collect(),
        };
        let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let delta_min = (12.0 / k as f64).sqrt();
        let delta = (delta_min + rng.random::<f64>() * (1.0 - delta_min)).min(1.0);
        let params = SparsifyParams {
            delta,
            c_k,
            max_draws,
            seed: seed ^ (40_000 + inst as u64),
        };
        match sparsify(&t, &y, &params) {
            Ok(cert) => {
                let report = verify_certificate(&t, &y, delta, c_k, &cert, c_cap);
                max_ratio = max_ratio.max(report.measured_ratio);
                case_counts[match cert.case {
                    CertificateCase::BigCoordinateProjection => 0,
                    CertificateCase::MaxEntryDomination => 1,
                    CertificateCase::RandomizedProjection => 2,
                }] += 1;
                rep.record(
                    format!(
                        "{inst},{},{},{},{},{},{}",
                        cert.case.name(),
                        cert.projection_support.len(),
                        cert.survivors.len(),
                        cert.draws_used,
                        report.measured_ratio,
                        report.pass as u8
                    ),
                    report.pass,
                );
            }
            Err(Error::SearchFailure { best_survivors, needed, .. }) => {
                failures_at_ck += 1;
                // Search failures are diagnostics, not violations; the rate
                // is capped below.
                rep.rows.push(format!(
                    "{inst},search-failure,0,{best_survivors},{max_draws},nan,1"
                ));
                let _ = needed;
            }
            Err(e) => {
                rep.record(format!("{inst},error,0,0,0,nan,0"), false);
                rep.notes.push(format!("instance {inst}: {e}"));
            }
        }
    }
    let failure_rate = failures_at_ck as f64 / instances as f64;
    rep.checks += 1;
    if failure_rate >= 0.05 {
        rep.failures += 1;
    }
    rep.checks += 1;
    if max_ratio > c_cap {
        rep.failures += 1;
    }
    rep.notes.push(format!(
        "search-failure rate at C_K={c_k}: {failure_rate:.4} ({failures_at_ck}/{instances})"
    ));
    rep.notes.push(format!("corpus max measured_ratio: {max_ratio:.4}"));
    rep.notes.push(format!(
        "cases: big-coordinate={} max-entry={} randomized={}",
        case_counts[0], case_counts[1], case_counts[2]
    ));
    rep
}

/// Hoeffding and Kesten Monte Carlo validators plus Lévy invariants.
pub fn suite_concentration(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "concentration",
        "suite,params,bound,empirical,min_sufficient_constant",
    );
    let mut rng = rng::stream(seed, &[domain::SUITE, 6]);
    let trials = 10_000usize;

    // Hoeffding: m = 30 uniform [0,1] summands on a t-grid with bound in
    // [0.01, 0.9].
    let m = 30usize;
    let ranges = vec![(0.0, 1.0); m];
    let mut sums = Vec::with_capacity(trials);
    for _ in 0..trials {
        let s: f64 = (0..m).map(|_| rng.random::<f64>()).sum();
        sums.push(s);
    }
    for &t in &[0.05, 0.1, 0.15, 0.2, 0.27] {
        let bound = hoeffding_bound(&ranges, t).expect("valid grid");
        assert!((0.01..=0.9).contains(&bound), "grid point drifted: {bound}");
        let hits = sums
            .iter()
            .filter(|&&s| s - m as f64 / 2.0 >= m as f64 * t)
            .count();
        let freq = hits as f64 / trials as f64;
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        let pass = freq <= bound + 3.0 * sigma;
        rep.record(
            format!("hoeffding,m=30;t={t},{bound},{freq},nan"),
            pass,
        );
    }

    // Kesten: sum of 100 Bernoulli(1/2) with unit coefficients; empirical
    // concentration inputs, window a_j = 0.4, R = 1.
    let m_k = 100usize;
    let mut bern = Vec::with_capacity(trials);
    let mut totals = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut s = 0.0;
        for _ in 0..m_k {
            let b = if rng.random::<bool>() { 1.0 } else { 0.0 };
            if bern.len() < trials {
                bern.push(b);
            }
            s += b;
        }
        totals.push(s);
    }
    let q_at_a = levy_concentration(&bern, 0.4).expect("samples").q_hat;
    let q_at_r = levy_concentration(&bern, 1.0).expect("samples").q_hat;
    let empirical = levy_concentration(&totals, 1.0).expect("samples").q_hat;
    let a = vec![0.4; m_k];
    let bound_at_one = kesten_bound(&a, 1.0, &vec![q_at_a; m_k], &vec![q_at_r; m_k], 1.0)
        .expect("nondegenerate");
    let min_ck = empirical / bound_at_one;
    let bound_at_eight = 8.0 * bound_at_one;
    let pass = empirical <= bound_at_eight;
    rep.record(
        format!("kesten,m=100;R=1;a=0.4,{bound_at_eight},{empirical},{min_ck}"),
        pass,
    );

    // Lévy invariants on random samples: monotone in t, saturates at the
    // spread, dominates the window around the median.
    let samples: Vec<f64> = (0..500).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
    let mut prev = 0.0;
    let mut monotone = true;
    for i in 0..=12 {
        let q = levy_concentration(&samples, i as f64 * 0.25).expect("samples").q_hat;
        monotone &= q >= prev;
        prev = q;
    }
    let spread = 6.0;
    let saturated = levy_concentration(&samples, spread).expect("samples").q_hat == 1.0;
    rep.record(
        format!("levy,monotone+saturation,nan,nan,nan"),
        monotone && saturated,
    );
    rep
}

/// Order-statistic and norm tail bounds plus the tail l2-norm constant.
pub fn suite_order_stats(seed: u64, tail_cap: f64) -> SuiteReport {
    let mut rep = SuiteReport::new(
        "order-stats",
        "suite,params,bound,empirical,violation_flag",
    );
    let mut rng = rng::stream(seed, &[domain::SUITE, 7]);
    let trials = 10_000usize;

    // kmax order-statistic bound: r Pareto(4,1) variables, h = 2, so
    // B = E xi^2 = 2 analytically.
    let r = 20usize;
    let pareto = Pareto::new(1.0, 4.0).expect("valid");
    let b = 2.0;
    let h = 2.0;
    let mut draws: Vec<Vec<f64>> = Vec::with_capacity(trials);
    for _ in 0..trials {
        draws.push((0..r).map(|_| pareto.sample(&mut rng)).collect());
    }
    for &(m, tau) in &[(1usize, 4.0f64), (1, 6.0), (2, 2.5), (2, 3.5), (4, 1.9)] {
        let bound = order_stat_tail_bound(b, h, r, m, tau).expect("valid grid");
        if bound.clamped > 0.9 {
            rep.notes.push(format!("skipped vacuous grid point m={m} tau={tau}"));
            continue;
        }
        let hits = draws
            .iter()
            .filter(|d| kmax_all(d, m).unwrap_or(0.0) >= tau)
            .count();
        let freq = hits as f64 / trials as f64;
        let sigma = (bound.clamped * (1.0 - bound.clamped) / trials as f64).sqrt();
        let pass = freq <= bound.clamped + 3.0 * sigma;
        rep.record(
            format!("order-stat,m={m};tau={tau},{},{freq},{}", bound.clamped, !pass as u8),
            pass,
        );
    }

    // Norm tail bound for two families with analytic B at p = 4.
    for (family, b4, label) in [
        (Family::Gaussian, 3.0, "gaussian"),
        // Kurtosis of the normalized symmetric Pareto(6) coordinate is 4/3,
        // below the gaussian 3, so B = 3 is a valid fourth-moment bound.
        (Family::IidSymmetricPareto { alpha: 6.0, t0: 1.0 }, 3.0, "pareto6"),
    ] {
        let n = 4usize;
        let spec = DistributionSpec::new(family, n).expect("valid");
        let a = sample_matrix(&spec, n, trials, seed ^ 0xA11CE).expect("sampling");
        let norms: Vec<f64> = (0..trials).map(|i| a.row_norm_sq(i).sqrt()).collect();
        for &tau in &[3.0f64, 4.0, 6.0] {
            let bound = norm_tail_bound(b4, 4.0, n, tau).expect("valid");
            if bound.clamped > 0.9 {
                continue;
            }
            let freq =
                norms.iter().filter(|&&v| v >= tau).count() as f64 / trials as f64;
            let sigma = (bound.clamped * (1.0 - bound.clamped) / trials as f64).sqrt();
            let pass = freq <= bound.clamped + 3.0 * sigma;
            rep.record(
                format!(
                    "norm-tail,{label};tau={tau},{},{freq},{}",
                    bound.clamped, !pass as u8
                ),
                pass,
            );
        }
    }

    // Tail l2-norm: measured constant against B^{1/q} sqrt(n) (N/n)^{1/min(q,2)}
    // for q above and below 2.
    for (alpha, q, label) in [(5.0f64, 2.5f64, "q2.5"), (3.0, 1.5, "q1.5")] {
        let b = alpha / (alpha - q);
        let pareto = Pareto::new(1.0, alpha).expect("valid");
        for &(n, big_n) in &[(4usize, 64usize), (8, 256), (16, 1024)] {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let values: Vec<f64> = (0..big_n).map(|_| pareto.sample(&mut rng)).collect();
                let tail = tail_l2_norm(&values, n).expect("nonnegative");
                let denom = b.powf(1.0 / q)
                    * (n as f64).sqrt()
                    * (big_n as f64 / n as f64).powf(1.0 / q.min(2.0));
                worst = worst.max(tail / denom);
            }
            let pass = worst <= tail_cap;
            rep.record(
                format!("tail-l2,{label};n={n};N={big_n},{tail_cap},{worst},{}", !pass as u8),
                pass,
            );
        }
    }
    rep
}
