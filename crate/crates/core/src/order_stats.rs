//! The k-max order-statistic operator and closed-form tail bounds applied to
//! order statistics and vector norms.

use crate::error::{Error, Result};

/// A bound value reported both raw and clamped to [0, 1]; the raw value can
/// exceed 1, in which case the bound is vacuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub raw: f64,
    pub clamped: f64,
}

impl Bound {
    pub fn new(raw: f64) -> Self {
        Bound { raw, clamped: raw.clamp(0.0, 1.0) }
    }
}

/// Threshold above which selection beats a full sort of the restriction.
const SELECT_THRESHOLD: usize = 64;

/// k-th largest element of the subsequence (values_i)_{i in J}; 0 when
/// k > |J|. Ties count with multiplicity (sorted multiset semantics).
pub fn kmax(values: &[f64], subset: &[usize], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= values.len()) {
        return Err(Error::Parameter(format!(
            "index {bad} outside the value range 0..{}",
            values.len()
        )));
    }
    if k > subset.len() {
        return Ok(0.0);
    }
    let mut restricted: Vec<f64> = subset.iter().map(|&i| values[i]).collect();
    if restricted.len() > SELECT_THRESHOLD {
        let pos = k - 1;
        let (_, kth, _) =
            restricted.select_nth_unstable_by(pos, |a, b| b.total_cmp(a));
        Ok(*kth)
    } else {
        restricted.sort_by(|a, b| b.total_cmp(a));
        Ok(restricted[k - 1])
    }
}

/// k-th largest over the full sequence.
pub fn kmax_all(values: &[f64], k: usize) -> Result<f64> {
    let all: Vec<usize> = (0..values.len()).collect();
    kmax(values, &all, k)
}

/// (e B r / (tau^h m))^m, the tail bound for the m-th largest of r
/// independent nonnegative variables with h-th moments at most B.
pub fn order_stat_tail_bound(b: f64, h: f64, r: usize, m: usize, tau: f64) -> Result<Bound> {
    if !(h >= 1.0) || !(b >= 1.0) || !(tau > 0.0) || m == 0 || m > r {
        return Err(Error::Parameter(format!(
            "need h >= 1, B >= 1, 1 <= m <= r, tau > 0; got h={h}, B={b}, m={m}, r={r}, tau={tau}"
        )));
    }
    let base = std::f64::consts::E * b * r as f64 / (tau.powf(h) * m as f64);
    Ok(Bound::new(base.powi(m as i32)))
}

/// B n^{p/2} tau^{-p}, the norm tail bound for an isotropic vector with
/// projection moments bounded by B.
pub fn norm_tail_bound(b: f64, p: f64, n: usize, tau: f64) -> Result<Bound> {
    if !(p > 2.0) || !(b >= 1.0) || !(tau > 0.0) || n == 0 {
        return Err(Error::Parameter(format!(
            "need p > 2, B >= 1, n >= 1, tau > 0; got p={p}, B={b}, n={n}, tau={tau}"
        )));
    }
    Ok(Bound::new(b * (n as f64).powf(p / 2.0) * tau.powf(-p)))
}

/// Euclidean norm of a nonnegative sequence after removing its n largest
/// entries.
pub fn tail_l2_norm(values: &[f64], n: usize) -> Result<f64> {
    if let Some(&bad) = values.iter().find(|&&v| v < 0.0) {
        return Err(Error::Contract(format!("negative entry {bad}")));
    }
    if n > values.len() {
        return Err(Error::Parameter(format!(
            "cannot drop {n} entries from a sequence of length {}",
            values.len()
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted[n..].iter().map(|v| v * v).sum::<f64>().sqrt())
}
