//! Gram/covariance computations and extreme eigen/singular values.
//!
//! The spectral routines use shifted power iteration with a Rayleigh-quotient
//! residual criterion on the n-by-n side (N >= n), with a dense symmetric
//! eigensolver fallback for dimension <= 64.

use crate::dist::SampleMatrix;
use crate::error::{Error, Result};
use crate::rng::{self, domain};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Iteration cap for the power method.
const POWER_ITERATION_CAP: usize = 10_000;
/// Largest dimension for which the dense eigensolver backstops the iteration.
const DENSE_FALLBACK_DIM: usize = 64;

/// Matrix of pairwise inner products of the sample vectors, mirrored so that
/// G[i][j] == G[j][i] holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
}

impl GramMatrix {
    pub fn from_matrix_rows(rows: &DMatrix<f64>) -> Self {
        let n = rows.nrows();
        let mut entries = rows * rows.transpose();
        // Mirror the upper triangle so symmetry holds bit-for-bit.
        for i in 0..n {
            for j in (i + 1)..n {
                entries[(j, i)] = entries[(i, j)];
            }
        }
        GramMatrix { entries }
    }

    /// Number of sample vectors.
    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.nrows() == 0
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Euclidean norm of vector i.
    pub fn norm(&self, i: usize) -> f64 {
        self.entries[(i, i)].sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.len()).map(|i| self.norm(i)).fold(0.0, f64::max)
    }
}

/// G[i][j] = <row_i, row_j>; exact symmetry by construction.
pub fn gram(a: &SampleMatrix) -> GramMatrix {
    GramMatrix::from_matrix_rows(a.rows())
}

/// Sample covariance (1/N) A^T A, mirrored to exact symmetry.
pub fn sample_covariance(a: &SampleMatrix) -> DMatrix<f64> {
    let rows = a.rows();
    let n = rows.ncols();
    let inv = 1.0 / rows.nrows() as f64;
    let mut cov = rows.tr_mul(rows);
    for i in 0..n {
        for j in i..n {
            let v = cov[(i, j)] * inv;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    cov
}

struct PowerOutcome {
    value: f64,
    converged: bool,
}

/// Dominant eigenvalue of a symmetric PSD matrix by power iteration with a
/// Rayleigh-quotient residual stop.
fn dominant_eigen_psd(m: &DMatrix<f64>, tol: f64) -> PowerOutcome {
    let n = m.nrows();
    if n == 0 {
        return PowerOutcome { value: 0.0, converged: true };
    }
    let mut best = 0.0f64;
    for restart in 0..3u64 {
        let mut rng = rng::stream(0x50_4f_57_45 + restart, &[domain::POWER_ITERATION, n as u64]);
        let mut v = DVector::from_fn(n, |_, _| {
            use rand::Rng;
            rng.random::<f64>() - 0.5
        });
        let nv = v.norm();
        if nv == 0.0 {
            continue;
        }
        v /= nv;
        for _ in 0..POWER_ITERATION_CAP {
            let w = m * &v;
            let theta = v.dot(&w);
            best = best.max(theta);
            let residual = (&w - theta * &v).norm();
            if residual <= tol * theta.abs().max(f64::EPSILON) {
                return PowerOutcome { value: theta, converged: true };
            }
            let wn = w.norm();
            if wn == 0.0 {
                // v landed in the kernel; try a fresh start vector.
                break;
            }
            v = w / wn;
        }
    }
    PowerOutcome { value: best, converged: false }
}

fn max_abs_eigen_dense(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()))
}

fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest row sum of absolute values; upper bound for the spectral radius.
fn inf_norm(m: &DMatrix<f64>) -> f64 {
    let mut best = 0.0f64;
    for i in 0..m.nrows() {
        let s: f64 = m.row(i).iter().map(|x| x.abs()).sum();
        best = best.max(s);
    }
    best
}

/// Spectral norm max |lambda_i| of a symmetric matrix within relative `tol`.
///
/// Shifted power iteration: with R >= rho(M) both M + R I and R I - M are
/// PSD, and their dominant eigenvalues recover lambda_max and lambda_min.
pub fn spectral_norm_sym(m: &DMatrix<f64>, tol: f64) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::Contract("matrix must be square".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let fro = frobenius(m);
    let mut asym = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > 1e-9 * fro {
        return Err(Error::Contract(format!(
            "matrix is not symmetric: max asymmetry {asym:e} vs Frobenius {fro:e}"
        )));
    }
    let n = m.nrows();
    let r = inf_norm(m);
    if r == 0.0 {
        return Ok(0.0);
    }
    let shift = DMatrix::from_diagonal_element(n, n, r);
    let plus = dominant_eigen_psd(&(m + &shift), tol);
    let minus = dominant_eigen_psd(&(&shift - m), tol);
    let lambda_max = plus.value - r;
    let lambda_min = r - minus.value;
    let best = lambda_max.abs().max(lambda_min.abs());
    if plus.converged && minus.converged {
        return Ok(best);
    }
    if n <= DENSE_FALLBACK_DIM {
        return Ok(max_abs_eigen_dense(m));
    }
    Err(Error::NoConvergence { iterations: POWER_ITERATION_CAP, best })
}

/// Extreme singular values (s_min, s_max) of an N-by-n matrix with N >= n,
/// via eigen-iteration on A^T A with a shift for the smallest eigenvalue.
pub fn extreme_singular_values(a: &DMatrix<f64>, tol: f64) -> Result<(f64, f64)> {
    if a.nrows() < a.ncols() {
        return Err(Error::Parameter(format!(
            "need at least as many rows as columns, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    let c = a.tr_mul(a);
    let n = c.nrows();
    let top = dominant_eigen_psd(&c, tol);
    let lambda_max = top.value;
    // Shift just past the top estimate so c*I - C stays PSD.
    let shift = 1.01 * lambda_max + f64::EPSILON;
    let shifted = DMatrix::from_diagonal_element(n, n, shift) - &c;
    let bottom = dominant_eigen_psd(&shifted, tol);
    let lambda_min = (shift - bottom.value).max(0.0);
    if top.converged && bottom.converged {
        return Ok((lambda_min.sqrt(), lambda_max.sqrt()));
    }
    if n <= DENSE_FALLBACK_DIM {
        let eig = c.symmetric_eigen();
        let lmax = eig.eigenvalues.iter().fold(0.0f64, |x, &l| x.max(l));
        let lmin = eig.eigenvalues.iter().fold(f64::INFINITY, |x, &l| x.min(l)).max(0.0);
        return Ok((lmin.sqrt(), lmax.sqrt()));
    }
    Err(Error::NoConvergence {
        iterations: POWER_ITERATION_CAP,
        best: lambda_max.sqrt(),
    })
}

/// Target covariance for a deviation measurement.
pub enum CovarianceTarget<'a> {
    Identity,
    Spd(&'a DMatrix<f64>),
}

/// Deviation of the sample covariance from the target, with the extreme
/// singular values of the sample matrix and the max precision quadratic form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeviationReport {
    pub n: usize,
    pub big_n: usize,
    pub seed: u64,
    /// ||Sigma_N - Sigma|| / ||Sigma|| (spectral norms).
    pub deviation: f64,
    pub s_min: f64,
    pub s_max: f64,
    /// max_i ||X_i||^2, or max_i <X_i, Sigma^{-1} X_i> in the general case.
    pub max_norm_sq: f64,
}

impl DeviationReport {
    pub const CSV_HEADER: &'static str = "n,N,seed,deviation,s_min,s_max,max_norm_sq";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n, self.big_n, self.seed, self.deviation, self.s_min, self.s_max, self.max_norm_sq
        )
    }
}

/// Relative spectral deviation of the sample covariance from the target.
pub fn deviation_report(a: &SampleMatrix, target: CovarianceTarget<'_>) -> Result<DeviationReport> {
    deviation_report_with_tol(a, target, 1e-8)
}

pub fn deviation_report_with_tol(
    a: &SampleMatrix,
    target: CovarianceTarget<'_>,
    tol: f64,
) -> Result<DeviationReport> {
    let cov = sample_covariance(a);
    let (s_min, s_max) = extreme_singular_values(a.rows(), tol)?;
    let (deviation, max_norm_sq) = match target {
        CovarianceTarget::Identity => {
            let mut dev = cov;
            for i in 0..dev.nrows() {
                dev[(i, i)] -= 1.0;
            }
            (spectral_norm_sym(&dev, tol)?, a.max_row_norm_sq())
        }
        CovarianceTarget::Spd(sigma) => {
            if sigma.nrows() != a.dimension() || sigma.ncols() != a.dimension() {
                return Err(Error::Parameter("covariance dimension mismatch".into()));
            }
            let chol = sigma
                .clone()
                .cholesky()
                .ok_or_else(|| Error::Parameter("target covariance is not SPD".into()))?;
            let diff = &cov - sigma;
            let rel = spectral_norm_sym(&diff, tol)? / spectral_norm_sym(sigma, tol)?;
            let mut max_form = 0.0f64;
            for i in 0..a.sample_count() {
                let x = a.rows().row(i).transpose();
                let solved = chol.solve(&x);
                max_form = max_form.max(x.dot(&solved));
            }
            (rel, max_form)
        }
    };
    Ok(DeviationReport {
        n: a.dimension(),
        big_n: a.sample_count(),
        seed: a.seed(),
        deviation,
        s_min,
        s_max,
        max_norm_sq,
    })
}

/// Replace each row X_i by Sigma_half * X_i; the transform is recorded in the
/// returned matrix's metadata.
pub fn apply_covariance(a: &SampleMatrix, sigma_half: &DMatrix<f64>) -> Result<SampleMatrix> {
    let n = a.dimension();
    if sigma_half.nrows() != n || sigma_half.ncols() != n {
        return Err(Error::Parameter(format!(
            "transform must be {n}x{n}, got {}x{}",
            sigma_half.nrows(),
            sigma_half.ncols()
        )));
    }
    let rows = a.rows() * sigma_half.transpose();
    let note = format!("sigma_half {n}x{n}");
    Ok(SampleMatrix::from_parts(
        rows,
        a.seed(),
        a.spec().clone(),
        Some(match a.transform() {
            Some(prev) => format!("{prev}; {note}"),
            None => note,
        }),
    ))
}

/// Symmetric PSD square root via eigendecomposition.
pub fn symmetric_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Parameter("matrix must be square".into()));
    }
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < -1e-12) {
        return Err(Error::Parameter("matrix is not PSD".into()));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Random SPD matrix with the given condition number: eigenvalues spaced
/// geometrically in [1, cond], conjugated by a random orthogonal matrix.
pub fn random_spd_with_condition(n: usize, cond: f64, seed: u64) -> Result<DMatrix<f64>> {
    if n == 0 || !(cond >= 1.0) {
        return Err(Error::Parameter("need n >= 1 and condition >= 1".into()));
    }
    use rand::Rng;
    let mut rng = rng::stream(seed, &[domain::GENERAL_COV, 0x5350_44]);
    let g = DMatrix::from_fn(n, n, |_, _| {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        // Box-Muller keeps this independent of the sampler distributions.
        (-2.0 * u.max(f64::MIN_POSITIVE).ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    });
    let q = g.qr().q();
    let eigs = DVector::from_fn(n, |i, _| {
        if n == 1 {
            1.0
        } else {
            cond.powf(i as f64 / (n - 1) as f64)
        }
    });
    Ok(&q * DMatrix::from_diagonal(&eigs) * q.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample_matrix, DistributionSpec, Family};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn matrix_from_rows(rows: &[&[f64]]) -> DMatrix<f64> {
        let r = rows.len();
        let c = rows[0].len();
        DMatrix::from_fn(r, c, |i, j| rows[i][j])
    }

    fn sample_from_rows(rows: &[&[f64]]) -> SampleMatrix {
        let spec = DistributionSpec::new(Family::Gaussian, rows[0].len()).unwrap();
        SampleMatrix::from_parts(matrix_from_rows(rows), 0, spec, None)
    }

    #[test]
    fn gram_of_orthonormal_rows() {
        let a = sample_from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let g = gram(&a);
        assert_eq!(g.as_matrix(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn gram_of_repeated_row() {
        let a = sample_from_rows(&[&[1.0, 0.0], &[1.0, 0.0]]);
        let g = gram(&a);
        assert_eq!(g.as_matrix(), &DMatrix::from_element(2, 2, 1.0));
    }

    #[test]
    fn gram_matches_naive_triple_loop() {
        let spec = DistributionSpec::new(Family::Gaussian, 4).unwrap();
        let a = sample_matrix(&spec, 4, 6, 21).unwrap();
        let g = gram(&a);
        for i in 0..6 {
            for j in 0..6 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += a.rows()[(i, k)] * a.rows()[(j, k)];
                }
                assert_relative_eq!(g.entry(i, j), acc, epsilon = 1e-12);
                assert_eq!(g.entry(i, j), g.entry(j, i));
            }
        }
    }

    #[test]
    fn covariance_of_orthonormal_rows() {
        let a = sample_from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let cov = sample_covariance(&a);
        assert_eq!(cov, DMatrix::from_diagonal_element(2, 2, 0.5));
    }

    #[test]
    fn covariance_matches_naive_outer_products() {
        let spec = DistributionSpec::new(Family::Gaussian, 3).unwrap();
        let a = sample_matrix(&spec, 3, 20, 5).unwrap();
        let cov = sample_covariance(&a);
        let mut naive = DMatrix::zeros(3, 3);
        for i in 0..20 {
            let x = a.rows().row(i).transpose();
            naive += &x * x.transpose();
        }
        naive /= 20.0;
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(cov[(i, j)], naive[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn spectral_norm_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -4.0]));
        assert_relative_eq!(spectral_norm_sym(&m, 1e-10).unwrap(), 4.0, epsilon = 1e-9);
    }

    #[test]
    fn spectral_norm_identity() {
        let m = DMatrix::<f64>::identity(8, 8);
        assert_relative_eq!(spectral_norm_sym(&m, 1e-10).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_norm_zero_matrix() {
        let m = DMatrix::<f64>::zeros(5, 5);
        assert_eq!(spectral_norm_sym(&m, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn spectral_norm_matches_dense_eigensolver() {
        let mut rng = crate::rng::stream(17, &[0]);
        for trial in 0..20 {
            let half = DMatrix::from_fn(30, 30, |_, _| rng.random::<f64>() - 0.5);
            let m = (&half + half.transpose()) * 0.5;
            let exact = max_abs_eigen_dense(&m);
            let got = spectral_norm_sym(&m, 1e-10).unwrap();
            assert_relative_eq!(got, exact, max_relative = 1e-8);
            let _ = trial;
        }
    }

    #[test]
    fn spectral_norm_rejects_asymmetric() {
        let m = matrix_from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(
            spectral_norm_sym(&m, 1e-8),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn spectral_norm_scales_homogeneously() {
        let mut rng = crate::rng::stream(4, &[1]);
        let half = DMatrix::from_fn(12, 12, |_, _| rng.random::<f64>() - 0.5);
        let m = (&half + half.transpose()) * 0.5;
        let base = spectral_norm_sym(&m, 1e-10).unwrap();
        for c in [-3.0, 0.5, 7.25] {
            let scaled = spectral_norm_sym(&(&m * c), 1e-10).unwrap();
            assert_relative_eq!(scaled, c.abs() * base, max_relative = 1e-8);
        }
    }

    #[test]
    fn extreme_singular_values_rectangular() {
        let a = matrix_from_rows(&[&[3.0, 0.0], &[0.0, 4.0], &[0.0, 0.0]]);
        let (smin, smax) = extreme_singular_values(&a, 1e-10).unwrap();
        assert_relative_eq!(smin, 3.0, epsilon = 1e-8);
        assert_relative_eq!(smax, 4.0, epsilon = 1e-8);
    }

    #[test]
    fn extreme_singular_values_padded_identity() {
        let mut a = DMatrix::zeros(5, 3);
        for i in 0..3 {
            a[(i, i)] = 1.0;
        }
        let (smin, smax) = extreme_singular_values(&a, 1e-10).unwrap();
        assert_relative_eq!(smin, 1.0, epsilon = 1e-9);
        assert_relative_eq!(smax, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn extreme_singular_values_match_dense_svd() {
        let mut rng = crate::rng::stream(23, &[2]);
        let a = DMatrix::from_fn(40, 10, |_, _| rng.random::<f64>() - 0.5);
        let (smin, smax) = extreme_singular_values(&a, 1e-10).unwrap();
        let svd = a.svd(false, false);
        let vals = &svd.singular_values;
        let smax_ref = vals.iter().fold(0.0f64, |x, &s| x.max(s));
        let smin_ref = vals.iter().fold(f64::INFINITY, |x, &s| x.min(s));
        assert_relative_eq!(smax, smax_ref, max_relative = 1e-8);
        assert_relative_eq!(smin, smin_ref, max_relative = 1e-8);
    }

    #[test]
    fn gram_duality_top_eigenvalue() {
        // lambda_max(A^T A) == lambda_max(A A^T) on small instances.
        let spec = DistributionSpec::new(Family::IidStudentT { nu: 5.0 }, 7).unwrap();
        for seed in 0..5 {
            let a = sample_matrix(&spec, 7, 19, seed).unwrap();
            let via_cov = max_abs_eigen_dense(&a.rows().tr_mul(a.rows()));
            let via_gram = max_abs_eigen_dense(gram(&a).as_matrix());
            assert_relative_eq!(via_cov, via_gram, max_relative = 1e-9);
        }
    }

    #[test]
    fn deviation_report_orthonormal_pair() {
        let a = sample_from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let rep = deviation_report(&a, CovarianceTarget::Identity).unwrap();
        assert_relative_eq!(rep.deviation, 0.5, epsilon = 1e-9);
        assert_relative_eq!(rep.s_min, 1.0, epsilon = 1e-9);
        assert_relative_eq!(rep.s_max, 1.0, epsilon = 1e-9);
        assert_relative_eq!(rep.max_norm_sq, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn deviation_zero_for_exactly_isotropic_empirical_measure() {
        // n orthonormal directions repeated N/n times each, scaled by
        // sqrt(N/n): Sigma_N = I.
        let s = 2.0f64.sqrt();
        let a = sample_from_rows(&[
            &[s, 0.0],
            &[0.0, s],
            &[s, 0.0],
            &[0.0, s],
        ]);
        let rep = deviation_report(&a, CovarianceTarget::Identity).unwrap();
        assert!(rep.deviation.abs() <= 1e-9);
    }

    #[test]
    fn deviation_equals_extreme_eigen_gap() {
        // For Sigma = I the deviation equals
        // max(|s_max^2/N - 1|, |1 - s_min^2/N|) within solver tolerance.
        let spec = DistributionSpec::new(Family::Gaussian, 6).unwrap();
        for seed in [1, 2, 3] {
            let a = sample_matrix(&spec, 6, 40, seed).unwrap();
            let rep = deviation_report(&a, CovarianceTarget::Identity).unwrap();
            let n = 40.0;
            let alt = (rep.s_max * rep.s_max / n - 1.0)
                .abs()
                .max((1.0 - rep.s_min * rep.s_min / n).abs());
            assert_relative_eq!(rep.deviation, alt, epsilon = 1e-7);
        }
    }

    #[test]
    fn deviation_direct_matches_dense_eigen_gap() {
        let spec = DistributionSpec::new(Family::Gaussian, 5).unwrap();
        let a = sample_matrix(&spec, 5, 30, 9).unwrap();
        let rep = deviation_report(&a, CovarianceTarget::Identity).unwrap();
        let cov = sample_covariance(&a);
        let eig = cov.symmetric_eigen();
        let direct = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max((l - 1.0).abs()));
        assert_relative_eq!(rep.deviation, direct, epsilon = 1e-9);
    }

    #[test]
    fn deviation_rejects_non_spd_target() {
        let a = sample_from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let bad = matrix_from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(deviation_report(&a, CovarianceTarget::Spd(&bad)).is_err());
    }

    #[test]
    fn gaussian_median_deviation_in_classical_band() {
        let spec = DistributionSpec::new(Family::Gaussian, 50).unwrap();
        let mut devs: Vec<f64> = (0..50)
            .map(|t| {
                let a = sample_matrix(&spec, 50, 5000, 1000 + t).unwrap();
                deviation_report(&a, CovarianceTarget::Identity).unwrap().deviation
            })
            .collect();
        devs.sort_by(f64::total_cmp);
        let median = devs[devs.len() / 2];
        let rate = (50.0f64 / 5000.0).sqrt();
        assert!(
            median >= 1.6 * rate && median <= 2.6 * rate,
            "median {median} outside [{}, {}]",
            1.6 * rate,
            2.6 * rate
        );
    }

    #[test]
    fn apply_covariance_identity_is_noop() {
        let spec = DistributionSpec::new(Family::Gaussian, 3).unwrap();
        let a = sample_matrix(&spec, 3, 10, 1).unwrap();
        let b = apply_covariance(&a, &DMatrix::identity(3, 3)).unwrap();
        assert_eq!(a.rows(), b.rows());
        assert!(b.transform().is_some());
    }

    #[test]
    fn apply_covariance_scales_gram_quadratically() {
        let spec = DistributionSpec::new(Family::Gaussian, 3).unwrap();
        let a = sample_matrix(&spec, 3, 6, 2).unwrap();
        let b = apply_covariance(&a, &(DMatrix::identity(3, 3) * 2.0)).unwrap();
        let ga = gram(&a);
        let gb = gram(&b);
        for i in 0..6 {
            for j in 0..6 {
                assert_relative_eq!(gb.entry(i, j), 4.0 * ga.entry(i, j), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn apply_covariance_diagonal_rescales_rows() {
        let a = sample_from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let d = matrix_from_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let b = apply_covariance(&a, &d).unwrap();
        assert_eq!(b.rows()[(0, 0)], 1.0);
        assert_eq!(b.rows()[(1, 1)], 2.0);
        assert_eq!(b.rows()[(0, 1)], 0.0);
    }

    #[test]
    fn symmetric_sqrt_squares_back() {
        let m = random_spd_with_condition(6, 10.0, 3).unwrap();
        let half = symmetric_sqrt(&m).unwrap();
        let back = &half * &half;
        for i in 0..6 {
            for j in 0..6 {
                assert_relative_eq!(back[(i, j)], m[(i, j)], epsilon = 1e-10);
            }
        }
    }
}
