//! Samplers for centered isotropic n-dimensional distributions with a
//! controlled p-th moment bound for one-dimensional projections.
//!
//! Five families are provided, spanning the regimes the deviation bound
//! distinguishes: a light-tailed control (gaussian), heavy i.i.d. coordinates
//! with tail index in (2, 4] and above 4 (symmetric pareto, student-t), a
//! spherically symmetric heavy radius, and a bounded-norm discrete family
//! whose moment bound is analytic. Every family is normalized so that its
//! population covariance is exactly the identity.

use crate::error::{Error, Result};
use crate::rng::{self, domain};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Pareto, StandardNormal, StudentT};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Distribution family with its shape parameters (dimension excluded).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Standard gaussian coordinates.
    Gaussian,
    /// I.i.d. coordinates: sign-symmetrized Pareto(alpha, t0), scaled to unit
    /// variance.
    IidSymmetricPareto { alpha: f64, t0: f64 },
    /// I.i.d. coordinates: Student t with nu degrees of freedom, scaled to
    /// unit variance.
    IidStudentT { nu: f64 },
    /// Uniform direction on the sphere times an independent Pareto(alpha, 1)
    /// radius, scaled so that E ||X||^2 = n.
    SphericalParetoRadius { alpha: f64 },
    /// X = sqrt(n) * eps * e_I with eps a uniform sign and I uniform on [n];
    /// the norm is sqrt(n) deterministically.
    CoordinateDiscrete,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::IidSymmetricPareto { .. } => "iid-symmetric-pareto",
            Family::IidStudentT { .. } => "iid-student-t",
            Family::SphericalParetoRadius { .. } => "spherical-pareto-radius",
            Family::CoordinateDiscrete => "coordinate-discrete",
        }
    }

    /// Supremum of the finite moment orders, `None` when all moments exist.
    pub fn tail_index(&self) -> Option<f64> {
        match self {
            Family::Gaussian | Family::CoordinateDiscrete => None,
            Family::IidSymmetricPareto { alpha, .. } => Some(*alpha),
            Family::IidStudentT { nu } => Some(*nu),
            Family::SphericalParetoRadius { alpha } => Some(*alpha),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        match *self {
            Family::Gaussian | Family::CoordinateDiscrete => Ok(()),
            Family::IidSymmetricPareto { alpha, t0 } => {
                if !(alpha > 2.0) {
                    return bad(format!("pareto tail index must exceed 2, got {alpha}"));
                }
                if !(t0 > 0.0) {
                    return bad(format!("pareto cutoff must be positive, got {t0}"));
                }
                Ok(())
            }
            Family::IidStudentT { nu } => {
                if !(nu > 2.0) {
                    return bad(format!("student-t degrees of freedom must exceed 2, got {nu}"));
                }
                Ok(())
            }
            Family::SphericalParetoRadius { alpha } => {
                if !(alpha > 2.0) {
                    return bad(format!("radius tail index must exceed 2, got {alpha}"));
                }
                Ok(())
            }
        }
    }
}

/// A family together with its ambient dimension and the per-coordinate scale
/// that makes the population covariance exactly the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    n: usize,
    normalization: f64,
}

impl DistributionSpec {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        family.validate()?;
        let normalization = match family {
            Family::Gaussian => 1.0,
            // Sign-symmetrized Pareto has mean zero and second moment
            // E P^2 = alpha t0^2/(alpha-2); dividing by its square root gives
            // coordinate variance exactly 1.
            Family::IidSymmetricPareto { alpha, t0 } => {
                1.0 / (alpha * t0 * t0 / (alpha - 2.0)).sqrt()
            }
            Family::IidStudentT { nu } => ((nu - 2.0) / nu).sqrt(),
            // E R^2 = c^2 alpha/(alpha-2) must equal n for Cov = I.
            Family::SphericalParetoRadius { alpha } => {
                (n as f64 * (alpha - 2.0) / alpha).sqrt()
            }
            Family::CoordinateDiscrete => (n as f64).sqrt(),
        };
        Ok(DistributionSpec {
            family,
            n,
            normalization,
        })
    }

    /// Same family re-targeted at dimension `n` (normalization recomputed).
    pub fn with_dimension(&self, n: usize) -> Result<Self> {
        DistributionSpec::new(self.family, n)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn tail_index(&self) -> Option<f64> {
        self.family.tail_index()
    }

    fn sample_row(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        match self.family {
            Family::Gaussian => {
                for x in out.iter_mut() {
                    *x = StandardNormal.sample(rng);
                }
            }
            Family::IidSymmetricPareto { alpha, t0 } => {
                let pareto = Pareto::new(t0, alpha).expect("validated parameters");
                for x in out.iter_mut() {
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    *x = sign * pareto.sample(rng) * self.normalization;
                }
            }
            Family::IidStudentT { nu } => {
                let t = StudentT::new(nu).expect("validated parameters");
                for x in out.iter_mut() {
                    *x = t.sample(rng) * self.normalization;
                }
            }
            Family::SphericalParetoRadius { alpha } => {
                let pareto = Pareto::new(1.0, alpha).expect("validated parameters");
                loop {
                    let mut norm_sq = 0.0;
                    for x in out.iter_mut() {
                        let g: f64 = StandardNormal.sample(rng);
                        *x = g;
                        norm_sq += g * g;
                    }
                    if norm_sq > 0.0 {
                        let radius = self.normalization * pareto.sample(rng);
                        let s = radius / norm_sq.sqrt();
                        for x in out.iter_mut() {
                            *x *= s;
                        }
                        break;
                    }
                }
            }
            Family::CoordinateDiscrete => {
                let idx = rng.random_range(0..self.n);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                out.fill(0.0);
                out[idx] = sign * self.normalization;
            }
        }
    }
}

// JSON contract: {"family": string, "params": {...}, "n": int}.
#[derive(Serialize, Deserialize)]
struct SpecJson {
    family: String,
    #[serde(default)]
    params: serde_json::Map<String, serde_json::Value>,
    n: usize,
}

impl Serialize for DistributionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut params = serde_json::Map::new();
        let mut put = |k: &str, v: f64| {
            params.insert(k.to_string(), serde_json::json!(v));
        };
        match self.family {
            Family::Gaussian | Family::CoordinateDiscrete => {}
            Family::IidSymmetricPareto { alpha, t0 } => {
                put("alpha", alpha);
                put("t0", t0);
            }
            Family::IidStudentT { nu } => put("nu", nu),
            Family::SphericalParetoRadius { alpha } => put("alpha", alpha),
        }
        SpecJson {
            family: self.family.name().to_string(),
            params,
            n: self.n,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DistributionSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SpecJson::deserialize(deserializer)?;
        let get = |key: &str| -> std::result::Result<f64, D::Error> {
            raw.params
                .get(key)
                .and_then(|v| v.as_f64())
                .ok_or_else(|| D::Error::custom(format!("missing numeric param `{key}`")))
        };
        let family = match raw.family.as_str() {
            "gaussian" => Family::Gaussian,
            "iid-symmetric-pareto" => Family::IidSymmetricPareto {
                alpha: get("alpha")?,
                t0: raw.params.get("t0").and_then(|v| v.as_f64()).unwrap_or(1.0),
            },
            "iid-student-t" => Family::IidStudentT { nu: get("nu")? },
            "spherical-pareto-radius" => Family::SphericalParetoRadius { alpha: get("alpha")? },
            "coordinate-discrete" => Family::CoordinateDiscrete,
            other => return Err(D::Error::custom(format!("unknown family `{other}`"))),
        };
        DistributionSpec::new(family, raw.n).map_err(D::Error::custom)
    }
}

/// The N-by-n sample matrix whose rows are the sample vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    rows: DMatrix<f64>,
    seed: u64,
    spec: DistributionSpec,
    transform: Option<String>,
}

impl SampleMatrix {
    /// Row-major matrix (row i is the i-th sample vector, transposed).
    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    /// Number of samples N.
    pub fn sample_count(&self) -> usize {
        self.rows.nrows()
    }

    /// Ambient dimension n.
    pub fn dimension(&self) -> usize {
        self.rows.ncols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    /// Description of any linear transform applied after sampling.
    pub fn transform(&self) -> Option<&str> {
        self.transform.as_deref()
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.rows.row(i).norm_squared()
    }

    pub fn max_row_norm_sq(&self) -> f64 {
        (0..self.sample_count())
            .map(|i| self.row_norm_sq(i))
            .fold(0.0, f64::max)
    }

    pub(crate) fn from_parts(
        rows: DMatrix<f64>,
        seed: u64,
        spec: DistributionSpec,
        transform: Option<String>,
    ) -> Self {
        SampleMatrix {
            rows,
            seed,
            spec,
            transform,
        }
    }
}

/// Draw an N-by-n matrix of i.i.d. rows from `spec`; deterministic in `seed`.
pub fn sample_matrix(
    spec: &DistributionSpec,
    n: usize,
    big_n: usize,
    seed: u64,
) -> Result<SampleMatrix> {
    if big_n == 0 {
        return Err(Error::Parameter("sample count must be positive".into()));
    }
    let spec = spec.with_dimension(n)?;
    let mut rng = rng::stream(seed, &[domain::SAMPLE_MATRIX]);
    let mut buf = vec![0.0; n];
    let mut rows = DMatrix::zeros(big_n, n);
    for i in 0..big_n {
        spec.sample_row(&mut rng, &mut buf);
        for (j, &x) in buf.iter().enumerate() {
            rows[(i, j)] = x;
        }
        debug_assert!(buf.iter().all(|x| x.is_finite()));
        if let Family::CoordinateDiscrete = spec.family {
            debug_assert_eq!(
                buf.iter().map(|x| x * x).sum::<f64>(),
                spec.normalization * spec.normalization
            );
        }
    }
    Ok(SampleMatrix {
        rows,
        seed,
        spec,
        transform: None,
    })
}

/// Which route produced a moment profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Analytic,
    MonteCarloEstimate,
}

/// (p, B) pair certifying sup_a E|<X,a>|^p <= B over unit directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentProfile {
    pub p: f64,
    pub b: f64,
    pub provenance: Provenance,
}

/// Knobs for the Monte Carlo direction sweep in [`moment_bound`].
#[derive(Debug, Clone, Copy)]
pub struct MomentBoundOptions {
    /// Random unit directions, added to all basis vectors and the two
    /// uniform diagonals.
    pub directions: usize,
    /// Samples per estimate.
    pub samples: usize,
    pub seed: u64,
    /// Multiplier applied to the empirical maximum before reporting.
    pub safety: f64,
}

impl Default for MomentBoundOptions {
    fn default() -> Self {
        MomentBoundOptions {
            directions: 1000,
            samples: 100_000,
            seed: 0x4d4f_4d45,
            safety: 1.2,
        }
    }
}

/// Moment bound B for the family at order p: analytic for the gaussian and
/// coordinate-discrete families, otherwise a direction-sweep Monte Carlo
/// estimate flagged as such.
pub fn moment_bound(spec: &DistributionSpec, p: f64) -> Result<MomentProfile> {
    moment_bound_with(spec, p, &MomentBoundOptions::default())
}

pub fn moment_bound_with(
    spec: &DistributionSpec,
    p: f64,
    opts: &MomentBoundOptions,
) -> Result<MomentProfile> {
    if !(p > 2.0) {
        return Err(Error::Parameter(format!("moment order must exceed 2, got {p}")));
    }
    if let Some(tail) = spec.tail_index() {
        if p >= tail {
            return Err(Error::InfiniteMoment { p, tail_index: tail });
        }
    }
    match spec.family {
        Family::Gaussian => Ok(MomentProfile {
            p,
            b: gaussian_abs_moment(p),
            provenance: Provenance::Analytic,
        }),
        // sup_a sum |a_i|^p is attained at a basis vector for p > 2.
        Family::CoordinateDiscrete => Ok(MomentProfile {
            p,
            b: (spec.n as f64).powf(p / 2.0 - 1.0),
            provenance: Provenance::Analytic,
        }),
        _ => {
            let b = monte_carlo_direction_sweep(spec, p, opts);
            Ok(MomentProfile {
                p,
                b,
                provenance: Provenance::MonteCarloEstimate,
            })
        }
    }
}

/// E|g|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi) for a standard gaussian g.
pub fn gaussian_abs_moment(p: f64) -> f64 {
    let ln = 0.5 * p * std::f64::consts::LN_2 + statrs::function::gamma::ln_gamma((p + 1.0) / 2.0)
        - 0.5 * std::f64::consts::PI.ln();
    ln.exp()
}

fn monte_carlo_direction_sweep(spec: &DistributionSpec, p: f64, opts: &MomentBoundOptions) -> f64 {
    let n = spec.n;
    let mut dir_rng = rng::stream(opts.seed, &[domain::MOMENT_SWEEP, 1]);
    let n_dirs = opts.directions + n + 2;
    // Columns are directions: basis vectors, +-(1/sqrt n)(1..1), then random.
    let mut dirs = DMatrix::zeros(n, n_dirs);
    for j in 0..n {
        dirs[(j, j)] = 1.0;
    }
    let inv_sqrt = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        dirs[(j, n)] = inv_sqrt;
        dirs[(j, n + 1)] = -inv_sqrt;
    }
    for c in (n + 2)..n_dirs {
        loop {
            let mut norm_sq = 0.0;
            for j in 0..n {
                let g: f64 = StandardNormal.sample(&mut dir_rng);
                dirs[(j, c)] = g;
                norm_sq += g * g;
            }
            if norm_sq > 0.0 {
                let s = 1.0 / norm_sq.sqrt();
                for j in 0..n {
                    dirs[(j, c)] *= s;
                }
                break;
            }
        }
    }

    let mut sample_rng = rng::stream(opts.seed, &[domain::MOMENT_SWEEP, 2]);
    let mut sums = vec![0.0f64; n_dirs];
    let mut buf = vec![0.0; n];
    let batch = 2048.min(opts.samples.max(1));
    let mut remaining = opts.samples.max(1);
    let mut block = DMatrix::zeros(batch, n);
    while remaining > 0 {
        let rows = batch.min(remaining);
        for i in 0..rows {
            spec.sample_row(&mut sample_rng, &mut buf);
            for (j, &x) in buf.iter().enumerate() {
                block[(i, j)] = x;
            }
        }
        let proj = block.rows(0, rows) * &dirs;
        for c in 0..n_dirs {
            let mut acc = 0.0;
            for i in 0..rows {
                acc += proj[(i, c)].abs().powf(p);
            }
            sums[c] += acc;
        }
        remaining -= rows;
    }
    let m = opts.samples.max(1) as f64;
    let max_moment = sums.iter().fold(0.0f64, |a, &s| a.max(s / m));
    (max_moment * opts.safety).max(1.0)
}

/// Spectral deviation of the empirical covariance of M fresh samples from
/// the identity.
pub fn isotropy_check(spec: &DistributionSpec, n: usize, m: usize, seed: u64) -> Result<f64> {
    if m < n {
        return Err(Error::Parameter(format!(
            "need at least n = {n} samples for an isotropy check, got {m}"
        )));
    }
    let spec = spec.with_dimension(n)?;
    let mut rng = rng::stream(seed, &[domain::ISOTROPY]);
    let mut acc = DMatrix::<f64>::zeros(n, n);
    let mut buf = vec![0.0; n];
    for _ in 0..m {
        spec.sample_row(&mut rng, &mut buf);
        for i in 0..n {
            for j in i..n {
                acc[(i, j)] += buf[i] * buf[j];
            }
        }
    }
    let inv = 1.0 / m as f64;
    let mut dev = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = acc[(i, j)] * inv - if i == j { 1.0 } else { 0.0 };
            dev[(i, j)] = v;
            dev[(j, i)] = v;
        }
    }
    crate::matrix::spectral_norm_sym(&dev, 1e-8)
}
