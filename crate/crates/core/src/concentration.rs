//! Hoeffding and Kesten bound evaluators and an empirical Lévy concentration
//! function.

use crate::error::{Error, Result};
use serde::Serialize;

/// Empirical Lévy concentration estimate at radius t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationEstimate {
    pub t: f64,
    /// Maximum over centers of the empirical mass of [center-t, center+t].
    pub q_hat: f64,
    pub sample_count: usize,
}

/// exp(-2 m^2 t^2 / sum (b_i - a_i)^2) for independent xi_i in [a_i, b_i].
///
/// When every range is degenerate the sum vanishes and the deviation is
/// impossible, so the bound is 0 for t > 0.
pub fn hoeffding_bound(ranges: &[(f64, f64)], t: f64) -> Result<f64> {
    if ranges.is_empty() {
        return Err(Error::Parameter("need at least one range".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("t must be positive, got {t}")));
    }
    let mut denom = 0.0;
    for &(a, b) in ranges {
        if b < a {
            return Err(Error::Parameter(format!("invalid range [{a}, {b}]")));
        }
        denom += (b - a) * (b - a);
    }
    if denom == 0.0 {
        return Ok(0.0);
    }
    let m = ranges.len() as f64;
    Ok((-2.0 * m * m * t * t / denom).exp())
}

/// Exact maximizer over centers of the empirical measure of [c-t, c+t],
/// computed by a sliding window over the sorted samples (the best window can
/// always be slid left until it abuts a sample point).
pub fn levy_concentration(samples: &[f64], t: f64) -> Result<ConcentrationEstimate> {
    if samples.is_empty() {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("t must be nonnegative, got {t}")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let width = 2.0 * t;
    let mut best = 0usize;
    let mut hi = 0usize;
    for lo in 0..n {
        if hi < lo {
            hi = lo;
        }
        while hi + 1 < n && sorted[hi + 1] - sorted[lo] <= width {
            hi += 1;
        }
        best = best.max(hi - lo + 1);
    }
    Ok(ConcentrationEstimate {
        t,
        q_hat: best as f64 / n as f64,
        sample_count: n,
    })
}

/// Kesten's anti-concentration bound for Q(sum xi_j, R):
/// C_K R [sum a_j^2 (1 - Q(xi_j, a_j)) Q(xi_j, R)] /
/// [sum a_j^2 (1 - Q(xi_j, a_j))]^{3/2}.
///
/// The universal constant is a caller-supplied parameter; validators report
/// the minimal sufficient value rather than asserting one.
pub fn kesten_bound(
    a: &[f64],
    r: f64,
    q_at_a: &[f64],
    q_at_r: &[f64],
    c_k: f64,
) -> Result<f64> {
    if a.is_empty() || a.len() != q_at_a.len() || a.len() != q_at_r.len() {
        return Err(Error::Parameter("mismatched or empty input lists".into()));
    }
    if !(c_k > 0.0) {
        return Err(Error::Parameter("C_K must be positive".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Parameter("R must be positive".into()));
    }
    for &aj in a {
        if !(aj > 0.0 && aj <= 2.0 * r) {
            return Err(Error::Parameter(format!(
                "coefficients must satisfy 0 < a_j <= 2R, got a_j={aj}, R={r}"
            )));
        }
    }
    for &q in q_at_a.iter().chain(q_at_r.iter()) {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Parameter(format!("concentration value {q} outside [0,1]")));
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..a.len() {
        let w = a[j] * a[j] * (1.0 - q_at_a[j]);
        num += w * q_at_r[j];
        den += w;
    }
    if den == 0.0 {
        return Err(Error::Degenerate(
            "all variables fully concentrated at scale a_j".into(),
        ));
    }
    Ok(c_k * r * num / den.powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hoeffding_examples() {
        assert_relative_eq!(
            hoeffding_bound(&[(0.0, 1.0)], 1.0).unwrap(),
            (-2.0f64).exp(),
            epsilon = 1e-12
        );
        assert!(hoeffding_bound(&[(0.0, 1.0); 4], 0.0).is_err());
        assert!(hoeffding_bound(&[(0.0, 1.0); 4], 1e-9).unwrap() > 0.999);
        assert_relative_eq!(
            hoeffding_bound(&[(-1.0, 1.0); 2], 1.0).unwrap(),
            (-1.0f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hoeffding_degenerate_ranges() {
        assert_eq!(hoeffding_bound(&[(2.0, 2.0), (0.5, 0.5)], 0.1).unwrap(), 0.0);
    }

    #[test]
    fn levy_rademacher() {
        let mut samples = vec![-1.0; 500];
        samples.extend(vec![1.0; 500]);
        assert_relative_eq!(levy_concentration(&samples, 0.5).unwrap().q_hat, 0.5);
        assert_relative_eq!(levy_concentration(&samples, 1.0).unwrap().q_hat, 1.0);
    }

    #[test]
    fn levy_constant_variable() {
        let samples = vec![3.0; 17];
        assert_relative_eq!(levy_concentration(&samples, 0.0).unwrap().q_hat, 1.0);
    }

    #[test]
    fn levy_monotone_in_t_and_saturates() {
        let mut rng = crate::rng::stream(12, &[0]);
        use rand::Rng;
        let samples: Vec<f64> = (0..200).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
        let mut prev = 0.0;
        for i in 0..=20 {
            let t = i as f64 * 0.3;
            let q = levy_concentration(&samples, t).unwrap().q_hat;
            assert!(q >= prev);
            prev = q;
        }
        let spread = samples.iter().cloned().fold(f64::MIN, f64::max)
            - samples.iter().cloned().fold(f64::MAX, f64::min);
        assert_eq!(levy_concentration(&samples, spread).unwrap().q_hat, 1.0);
        // The window around the median is a lower bound for the maximum.
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        let t = 0.7;
        let around_median = samples
            .iter()
            .filter(|&&x| (x - median).abs() <= t)
            .count() as f64
            / samples.len() as f64;
        assert!(levy_concentration(&samples, t).unwrap().q_hat >= around_median);
    }

    #[test]
    fn kesten_examples() {
        assert_relative_eq!(
            kesten_bound(&[1.0], 1.0, &[0.5], &[0.5], 1.0).unwrap(),
            1.0 / 2.0f64.sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            kesten_bound(&[1.0], 1.0, &[0.0], &[1.0], 1.0).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // a_j = 2R sits exactly on the boundary and is accepted.
        assert!(kesten_bound(&[2.0, 2.0], 1.0, &[0.1, 0.1], &[0.9, 0.9], 1.0).is_ok());
        assert!(kesten_bound(&[2.1], 1.0, &[0.1], &[0.9], 1.0).is_err());
    }

    #[test]
    fn kesten_degenerate_all_concentrated() {
        assert!(matches!(
            kesten_bound(&[1.0, 1.0], 1.0, &[1.0, 1.0], &[1.0, 1.0], 1.0),
            Err(Error::Degenerate(_))
        ));
    }
}
