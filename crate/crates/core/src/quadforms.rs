//! Exact brute-force oracles for the sparse quadratic forms f(k,C), g(k,C,I)
//! and W_{v,i}, plus constant-free verification of the recursion and
//! net-passing inequalities at desk scale.
//!
//! f(k,C) is the largest squared norm of a k-sparse unit combination of
//! sample vectors supported in C; equivalently, the maximum over size-k
//! supports S of the top eigenvalue of the Gram block G_S. g(k,C,I) is the
//! bilinear analogue over a split I / I^c, i.e. the maximum block singular
//! value. Both are computed by exhaustive support enumeration inside a
//! configurable envelope.

use crate::combi::{binomial, for_each_combination};
use crate::error::{Error, Result};
use crate::matrix::GramMatrix;
use crate::nets::SparseNet;
use crate::order_stats::kmax_all;
use crate::rng::{self, domain};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Enumeration budget: total supports examined per call.
const ENUMERATION_CAP: u128 = 1_000_000;

/// A value that is exact under the enumeration envelope, or a sampled lower
/// bound when the envelope was exceeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    pub exact: bool,
}

/// Bundles the Gram matrix the quadratic forms are evaluated on.
#[derive(Debug, Clone, Copy)]
pub struct QuadFormContext<'a> {
    pub gram: &'a GramMatrix,
}

impl<'a> QuadFormContext<'a> {
    pub fn new(gram: &'a GramMatrix) -> Self {
        QuadFormContext { gram }
    }
}

fn lambda_max_sub(gram: &GramMatrix, support: &[usize]) -> f64 {
    let s = support.len();
    let sub = DMatrix::from_fn(s, s, |a, b| gram.entry(support[a], support[b]));
    sub.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &l| m.max(l))
}

fn sigma_max_block(gram: &GramMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    let (r, c) = (rows.len(), cols.len());
    if r == 0 || c == 0 {
        return 0.0;
    }
    let block = DMatrix::from_fn(r, c, |a, b| gram.entry(rows[a], cols[b]));
    // sigma_max via the top eigenvalue of the smaller Gram product.
    let gramian = if r <= c {
        &block * block.transpose()
    } else {
        block.tr_mul(&block)
    };
    gramian
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &l| m.max(l))
        .max(0.0)
        .sqrt()
}

/// Exact f(k, C): max over size-min(k,|C|) supports S in C of the top
/// eigenvalue of the Gram block (smaller supports are dominated).
pub fn f_value(ctx: &QuadFormContext<'_>, k: usize, c_set: &[usize]) -> Result<BoundValue> {
    if c_set.is_empty() || k == 0 {
        return Ok(BoundValue { value: 0.0, exact: true });
    }
    let s = k.min(c_set.len());
    let mut budget: u128 = 0;
    for j in 0..=s {
        budget += binomial(c_set.len(), j);
    }
    if budget > ENUMERATION_CAP {
        return Ok(f_sampled_lower_bound(ctx, k, c_set));
    }
    let mut best = 0.0f64;
    for_each_combination(c_set.len(), s, |pick| {
        let support: Vec<usize> = pick.iter().map(|&i| c_set[i]).collect();
        best = best.max(lambda_max_sub(ctx.gram, &support));
    });
    Ok(BoundValue { value: best, exact: true })
}

fn f_sampled_lower_bound(ctx: &QuadFormContext<'_>, k: usize, c_set: &[usize]) -> BoundValue {
    let mut rng = rng::stream(0xF5A11, &[domain::SUITE, c_set.len() as u64]);
    let s = k.min(c_set.len());
    let mut best = 0.0f64;
    for _ in 0..2000 {
        let mut pool: Vec<usize> = c_set.to_vec();
        for i in 0..s {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        best = best.max(lambda_max_sub(ctx.gram, &pool[..s]));
    }
    BoundValue { value: best, exact: false }
}

/// Exact g(k, C, I): max over supports S in I∩C and T in I^c∩C (each of the
/// maximal admissible size) of the largest singular value of the Gram block
/// G_{S,T}; zero when either side is empty.
pub fn g_value(
    ctx: &QuadFormContext<'_>,
    k: usize,
    c_set: &[usize],
    i_set: &[usize],
) -> Result<BoundValue> {
    if k == 0 {
        return Ok(BoundValue { value: 0.0, exact: true });
    }
    let n = ctx.gram.len();
    let in_i = membership(n, i_set);
    let side_a: Vec<usize> = c_set.iter().copied().filter(|&v| in_i[v]).collect();
    let side_b: Vec<usize> = c_set.iter().copied().filter(|&v| !in_i[v]).collect();
    if side_a.is_empty() || side_b.is_empty() {
        return Ok(BoundValue { value: 0.0, exact: true });
    }
    let sa = k.min(side_a.len());
    let sb = k.min(side_b.len());
    let budget = binomial(side_a.len(), sa)
        .saturating_mul(binomial(side_b.len(), sb));
    if budget > ENUMERATION_CAP {
        return Err(Error::Parameter(format!(
            "enumeration envelope exceeded: {budget} support pairs"
        )));
    }
    let mut best = 0.0f64;
    for_each_combination(side_a.len(), sa, |pa| {
        let rows: Vec<usize> = pa.iter().map(|&i| side_a[i]).collect();
        for_each_combination(side_b.len(), sb, |pb| {
            let cols: Vec<usize> = pb.iter().map(|&i| side_b[i]).collect();
            best = best.max(sigma_max_block(ctx.gram, &rows, &cols));
        });
    });
    Ok(BoundValue { value: best, exact: true })
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &i in set {
        if i < n {
            mask[i] = true;
        }
    }
    mask
}

/// W_{v,i} = <X_i, sum_j v_j X_j> for every i, i.e. G v.
pub fn w_values(gram: &GramMatrix, v: &[f64]) -> Result<Vec<f64>> {
    let n = gram.len();
    if v.len() != n {
        return Err(Error::Parameter(format!(
            "vector length {} does not match {n} samples",
            v.len()
        )));
    }
    let mut out = vec![0.0f64; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += gram.entry(i, j) * v[j];
        }
        out[i] = acc;
    }
    Ok(out)
}

/// Slack report for one recursion-inequality instance.
#[derive(Debug, Clone, Copy)]
pub struct RecurrentSlack {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// sup over k-sparse unit y supported on `from` of max_{l in to} |W_{y,l}|:
/// exact by row-norm maximization, since the best y aligns with the largest
/// |G_{l, .}| entries over `from`.
fn sup_max_w(gram: &GramMatrix, k: usize, from: &[usize], to: &[usize]) -> f64 {
    if from.is_empty() || to.is_empty() || k == 0 {
        return 0.0;
    }
    let s = k.min(from.len());
    let mut best = 0.0f64;
    for &l in to {
        let mut row: Vec<f64> = from.iter().map(|&j| gram.entry(l, j).abs()).collect();
        row.sort_by(|a, b| b.total_cmp(a));
        let norm_sq: f64 = row[..s].iter().map(|v| v * v).sum();
        best = best.max(norm_sq.sqrt());
    }
    best
}

/// Verifies the m = 1 instance of the recursion
/// g(k,C,I) <= g(1,C,I) + sqrt(k) sup_y max_{l in I^c∩C} |W_{y,l}|
///                      + sqrt(k) sup_z max_{l in I∩C} |W_{z,l}|,
/// with every term computed exactly; returns the slack (rhs - lhs).
pub fn check_raw_recurrent(
    ctx: &QuadFormContext<'_>,
    k: usize,
    c_set: &[usize],
    i_set: &[usize],
) -> Result<RecurrentSlack> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let n = ctx.gram.len();
    let in_i = membership(n, i_set);
    let side_a: Vec<usize> = c_set.iter().copied().filter(|&v| in_i[v]).collect();
    let side_b: Vec<usize> = c_set.iter().copied().filter(|&v| !in_i[v]).collect();
    let lhs = g_value(ctx, k, c_set, i_set)?;
    if !lhs.exact {
        return Err(Error::Parameter("enumeration envelope exceeded".into()));
    }
    let base = g_value(ctx, 1, c_set, i_set)?;
    let sqrt_k = (k as f64).sqrt();
    let term_ab = sup_max_w(ctx.gram, k, &side_a, &side_b);
    let term_ba = sup_max_w(ctx.gram, k, &side_b, &side_a);
    let rhs = base.value + sqrt_k * term_ab + sqrt_k * term_ba;
    Ok(RecurrentSlack { lhs: lhs.value, rhs, slack: rhs - lhs.value })
}

/// Slack report for one net-passing instance.
#[derive(Debug, Clone, Copy)]
pub struct NetPassingSlack {
    /// max over probes of kmax_r(|Tu|).
    pub lhs: f64,
    /// 2 sup_net kmax_{floor(r/2)}(|Tv|) + (4 rho / sqrt(r)) E.
    pub rhs: f64,
    pub slack: f64,
    /// E = exact sup over h-sparse unit u of (sum_{i<=r} kmax_i(|Tu|)^2)^{1/2}.
    pub tail_term: f64,
    pub probes: usize,
}

/// Verifies the net-passing inequality
/// kmax_r(|Tu|) <= 2 sup_{v in net} kmax_{floor(r/2)}(|Tv|)
///                + (4 rho / sqrt(r)) sup_u (sum_{i<=r} kmax_i(|Tu|)^2)^{1/2}
/// over random h-sparse probes plus all net points. The trailing sup is
/// exact: the maximum block singular value over (row subset of size r,
/// support of size h).
pub fn check_net_passing(
    t: &DMatrix<f64>,
    r: usize,
    h: usize,
    rho: f64,
    net: &SparseNet,
    probes: usize,
    seed: u64,
) -> Result<NetPassingSlack> {
    let (p, q) = (t.nrows(), t.ncols());
    if p == 0 || q == 0 || p > 12 || q > 12 {
        return Err(Error::Parameter(format!("envelope is 1..=12 rows/cols, got {p}x{q}")));
    }
    if r < 2 {
        return Err(Error::Parameter(format!("need r >= 2, got {r}")));
    }
    if h == 0 || h > 4 || h > q {
        return Err(Error::Parameter(format!("need 1 <= h <= min(4, q), got {h}")));
    }
    if net.ambient != q || net.sparsity < h {
        return Err(Error::Parameter(
            "net must live on the column space with sparsity >= h".into(),
        ));
    }
    if !(rho > 0.0 && rho <= 1.0) || (net.radius - rho).abs() > 1e-12 {
        return Err(Error::Parameter("rho must match the net radius".into()));
    }

    let image_abs = |u_support: &[usize], u_coeffs: &[f64]| -> Vec<f64> {
        let mut img = vec![0.0f64; p];
        for i in 0..p {
            let mut acc = 0.0;
            for (s, &j) in u_support.iter().enumerate() {
                acc += t[(i, j)] * u_coeffs[s];
            }
            img[i] = acc.abs();
        }
        img
    };

    // E: exact via enumeration of (row subset of size min(r,p), support of
    // size min(h,q)).
    let rr = r.min(p);
    let hh = h.min(q);
    let budget = binomial(p, rr).saturating_mul(binomial(q, hh));
    if budget > ENUMERATION_CAP {
        return Err(Error::Parameter(format!(
            "enumeration envelope exceeded: {budget} block pairs"
        )));
    }
    let mut tail_term = 0.0f64;
    for_each_combination(p, rr, |rows| {
        for_each_combination(q, hh, |cols| {
            let block = DMatrix::from_fn(rows.len(), cols.len(), |a, b| t[(rows[a], cols[b])]);
            let gramian = if rows.len() <= cols.len() {
                &block * block.transpose()
            } else {
                block.tr_mul(&block)
            };
            let top = gramian
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .fold(0.0f64, |m, &l| m.max(l))
                .max(0.0)
                .sqrt();
            tail_term = tail_term.max(top);
        });
    });

    // Net side: sup over net points of kmax_{floor(r/2)}.
    let half = (r / 2).max(1);
    let mut net_sup = 0.0f64;
    net.for_each_point(|support, coeffs| {
        if support.len() <= h {
            let img = image_abs(support, coeffs);
            net_sup = net_sup.max(kmax_all(&img, half).unwrap_or(0.0));
        }
    });

    let rhs = 2.0 * net_sup + 4.0 * rho / (r as f64).sqrt() * tail_term;

    // Probe side: random h-sparse unit vectors plus every net point.
    let mut rng = rng::stream(seed, &[domain::NET, p as u64, q as u64]);
    let mut lhs = 0.0f64;
    let mut count = 0usize;
    let mut coeff = vec![0.0f64; hh];
    for _ in 0..probes {
        let mut support = Vec::with_capacity(hh);
        while support.len() < hh {
            let j = rng.random_range(0..q);
            if !support.contains(&j) {
                support.push(j);
            }
        }
        support.sort_unstable();
        loop {
            let mut norm_sq = 0.0;
            for c in coeff.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut rng);
                *c = g;
                norm_sq += g * g;
            }
            if norm_sq > 0.0 {
                let inv = 1.0 / norm_sq.sqrt();
                for c in coeff.iter_mut() {
                    *c *= inv;
                }
                break;
            }
        }
        let img = image_abs(&support, &coeff);
        lhs = lhs.max(kmax_all(&img, r).unwrap_or(0.0));
        count += 1;
    }
    net.for_each_point(|support, coeffs| {
        if support.len() <= h {
            let img = image_abs(support, coeffs);
            lhs = lhs.max(kmax_all(&img, r).unwrap_or(0.0));
            count += 1;
        }
    });

    Ok(NetPassingSlack { lhs, rhs, slack: rhs - lhs, tail_term, probes: count })
}
