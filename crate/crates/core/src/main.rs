//! Command-line driver for the covariance concentration experiments.

use clap::{Args, Parser, Subcommand, ValueEnum};
use htcov::dist::{sample_matrix, DistributionSpec, Family};
use htcov::experiments::{
    run_coloring_experiment, run_general_covariance, run_scaling, run_square_norm,
    ExperimentConfig,
};
use htcov::suites::run_verification_suite;
use htcov::{Error, Result};
use std::io::Write;
use std::path::PathBuf;

const SEED_ENV: &str = "HTCOV_SEED";

#[derive(Parser)]
#[command(
    name = "htcov",
    version,
    about = "Monte Carlo experiments on sample covariance concentration for heavy-tailed samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON); defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config (HTCOV_SEED is the env fallback).
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rayon worker threads; library default when omitted.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample matrix and emit it.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Dimension override (defaults to the first grid value).
        #[arg(long)]
        n: Option<usize>,
        /// Sample count override (defaults to the first ratio times n).
        #[arg(long)]
        big_n: Option<usize>,
    },
    /// Deviation scaling experiment over the (n, N/n) grid with a log-log fit.
    Scaling {
        #[command(flatten)]
        common: Common,
    },
    /// Square-matrix norm ratio experiment (N = n).
    SquareNorm {
        #[command(flatten)]
        common: Common,
    },
    /// General-covariance experiment against a configured SPD target.
    GeneralCov {
        #[command(flatten)]
        common: Common,
    },
    /// Greedy-coloring experiment with the chromatic tail bound.
    Coloring {
        #[command(flatten)]
        common: Common,
    },
    /// Run one of the module verification suites.
    Verify {
        /// nets | quadforms | recursion | coloring | sparsify |
        /// concentration | order-stats
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        dist: DistributionSpec::new(Family::Gaussian, 20).expect("static default"),
        p: 4.0,
        n_values: vec![20],
        ratio_values: vec![4.0, 16.0, 64.0],
        trials: 20,
        master_seed: 0,
        caps: Default::default(),
        coloring: Default::default(),
        sigma: Default::default(),
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text)?
        }
        None => default_config(),
    };
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    } else if let Ok(env) = std::env::var(SEED_ENV) {
        config.master_seed = env
            .parse()
            .map_err(|_| Error::Parameter(format!("{SEED_ENV} must be a u64, got `{env}`")))?;
    }
    config.validate()?;
    Ok(config)
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            file.write_all(text.as_bytes())?;
        }
        None => {
            print!("{text}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Parameter(format!("cannot build worker pool: {e}")))?;
            pool.install(f)
        }
        None => f(),
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sample { common, n, big_n } => {
            let config = load_config(&common)?;
            let n = n.unwrap_or(config.n_values[0]);
            let big_n =
                big_n.unwrap_or((config.ratio_values[0] * n as f64).round() as usize);
            let matrix = sample_matrix(&config.dist, n, big_n, config.master_seed)?;
            let text = match common.format {
                Format::Csv => {
                    let mut out = format!(
                        "# family={} n={} N={} seed={}\n",
                        matrix.spec().family().name(),
                        n,
                        big_n,
                        matrix.seed()
                    );
                    for i in 0..big_n {
                        let row: Vec<String> =
                            (0..n).map(|j| matrix.rows()[(i, j)].to_string()).collect();
                        out.push_str(&row.join(","));
                        out.push('\n');
                    }
                    out
                }
                Format::Json => {
                    let rows: Vec<Vec<f64>> = (0..big_n)
                        .map(|i| (0..n).map(|j| matrix.rows()[(i, j)]).collect())
                        .collect();
                    serde_json::to_string_pretty(&serde_json::json!({
                        "spec": matrix.spec(),
                        "n": n,
                        "N": big_n,
                        "seed": matrix.seed(),
                        "rows": rows,
                    }))? + "\n"
                }
            };
            emit(&common, &text)?;
            Ok(0)
        }
        Command::Scaling { common } => {
            let config = load_config(&common)?;
            let result = in_pool(common.workers, || run_scaling(&config))?;
            let text = match common.format {
                Format::Csv => result.to_csv(),
                Format::Json => serde_json::to_string_pretty(&result)? + "\n",
            };
            emit(&common, &text)?;
            Ok(0)
        }
        Command::SquareNorm { common } => {
            let config = load_config(&common)?;
            let result = in_pool(common.workers, || run_square_norm(&config))?;
            let text = match common.format {
                Format::Csv => {
                    let mut out = String::from("n,median_ratio,max_ratio\n");
                    for c in &result.cells {
                        out.push_str(&format!("{},{},{}\n", c.n, c.median_ratio, c.max_ratio));
                    }
                    out.push_str(&format!(
                        "#cap={} asserted={} pass={}\n",
                        result.cap, result.asserted, result.pass
                    ));
                    out
                }
                Format::Json => serde_json::to_string_pretty(&result)? + "\n",
            };
            emit(&common, &text)?;
            Ok(if result.pass { 0 } else { 1 })
        }
        Command::GeneralCov { common } => {
            let config = load_config(&common)?;
            let sigma = config.sigma.build(config.n_values[0])?;
            let result = in_pool(common.workers, || run_general_covariance(&config, &sigma))?;
            let text = match common.format {
                Format::Csv => {
                    let mut out = String::from("n,N,trial,seed,lhs,rhs,ratio\n");
                    for r in &result.records {
                        out.push_str(&format!(
                            "{},{},{},{},{},{},{}\n",
                            r.n, r.big_n, r.trial, r.seed, r.lhs, r.rhs, r.ratio
                        ));
                    }
                    out.push_str(&format!(
                        "#ratio median={} q95={} max={} cap={} within_cap={}\n",
                        result.ratio_median,
                        result.ratio_q95,
                        result.ratio_max,
                        result.cap,
                        result.fraction_within_cap
                    ));
                    out
                }
                Format::Json => serde_json::to_string_pretty(&result)? + "\n",
            };
            emit(&common, &text)?;
            Ok(if result.fraction_within_cap >= 0.95 { 0 } else { 1 })
        }
        Command::Coloring { common } => {
            let config = load_config(&common)?;
            let result = in_pool(common.workers, || run_coloring_experiment(&config))?;
            let text = match common.format {
                Format::Csv => {
                    let mut out = result.to_csv();
                    out.push_str(&format!(
                        "#validity_violations={} pass={}\n",
                        result.validity_violations, result.pass
                    ));
                    out
                }
                Format::Json => serde_json::to_string_pretty(&result)? + "\n",
            };
            emit(&common, &text)?;
            Ok(if result.pass { 0 } else { 1 })
        }
        Command::Verify { suite, common } => {
            let config = load_config(&common)?;
            let report = in_pool(common.workers, || run_verification_suite(&suite, &config))?;
            let text = match common.format {
                Format::Csv => report.to_csv(),
                Format::Json => {
                    serde_json::to_string_pretty(&serde_json::json!({
                        "suite": report.suite,
                        "checks": report.checks,
                        "failures": report.failures,
                        "pass": report.pass(),
                        "rows": report.rows,
                        "notes": report.notes,
                    }))? + "\n"
                }
            };
            emit(&common, &text)?;
            Ok(if report.pass() { 0 } else { 1 })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
