//! Support-preserving nets over sparse unit vectors, and the net bound for
//! quadratic forms on the dense sphere.
//!
//! Sparse nets are built from one canonical net per support size: all
//! supports of the same size are coordinate permutations of each other, so a
//! canonical net on S^{s-1} embedded into each size-s support covers every
//! s-sparse unit vector support-preservingly. Canonical nets are grown by
//! greedy farthest-point insertion over a fine candidate grid on the sphere.

use crate::combi::binomial;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand_distr::Distribution;

/// Stop inserting once the farthest candidate is within this fraction of the
/// target radius; the remainder of the budget absorbs the candidate-grid
/// discretization.
const GREEDY_RADIUS_FRACTION: f64 = 0.75;

/// Desk-scale envelope for sparse nets.
const MAX_AMBIENT: usize = 12;
const MAX_SPARSITY: usize = 4;

/// Support-preserving rho-net on the r-sparse unit vectors of R^N.
#[derive(Debug, Clone)]
pub struct SparseNet {
    pub ambient: usize,
    pub sparsity: usize,
    pub radius: f64,
    /// canonical[s-1] = net points on the unit sphere of R^s.
    canonical: Vec<Vec<Vec<f64>>>,
    /// Total number of points over all supports of size 1..=r.
    pub cardinality: u128,
    /// Constant C with cardinality = (C N / (rho r))^r, recorded with the net.
    pub c_net: f64,
}


/// Candidate cloud on S^{s-1}: the cube-surface lattice of pitch g projected
/// radially. Any unit vector is within g*sqrt(s-1) of a projected candidate.
fn cube_surface_candidates(s: usize, pitch: f64) -> Vec<Vec<f64>> {
    assert!(s >= 2);
    let steps = (2.0 / pitch).ceil() as usize;
    let axis: Vec<f64> = (0..=steps).map(|i| -1.0 + 2.0 * i as f64 / steps as f64).collect();
    let free = s - 1;
    let mut out = Vec::new();
    let mut idx = vec![0usize; free];
    for face_dim in 0..s {
        for face_sign in [-1.0, 1.0] {
            idx.iter_mut().for_each(|v| *v = 0);
            loop {
                let mut p = Vec::with_capacity(s);
                let mut src = 0usize;
                for d in 0..s {
                    if d == face_dim {
                        p.push(face_sign);
                    } else {
                        p.push(axis[idx[src]]);
                        src += 1;
                    }
                }
                let norm: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                for v in p.iter_mut() {
                    *v /= norm;
                }
                out.push(p);
                // odometer over the free coordinates
                let mut d = 0;
                loop {
                    if d == free {
                        break;
                    }
                    idx[d] += 1;
                    if idx[d] <= steps {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == free {
                    break;
                }
            }
        }
    }
    out
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Greedy farthest-point insertion until every candidate is within
/// `GREEDY_RADIUS_FRACTION * rho` of the net.
fn canonical_net(s: usize, rho: f64) -> Vec<Vec<f64>> {
    if s == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    // pitch so that grid mesh + greedy radius stays within rho
    let pitch = ((1.0 - GREEDY_RADIUS_FRACTION) * rho / ((s - 1) as f64).sqrt()).min(0.2);
    let candidates = cube_surface_candidates(s, pitch);
    let target = GREEDY_RADIUS_FRACTION * rho;
    let mut net: Vec<Vec<f64>> = vec![candidates[0].clone()];
    let mut min_dist: Vec<f64> = candidates.iter().map(|c| dist_sq(c, &net[0])).collect();
    loop {
        let (mut far_idx, mut far_d) = (0usize, 0.0f64);
        for (i, &d) in min_dist.iter().enumerate() {
            if d > far_d {
                far_d = d;
                far_idx = i;
            }
        }
        if far_d.sqrt() <= target {
            break;
        }
        let new_point = candidates[far_idx].clone();
        for (i, c) in candidates.iter().enumerate() {
            let d = dist_sq(c, &new_point);
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
        net.push(new_point);
    }
    net
}

impl SparseNet {
    /// Net points for support size `s` (1-indexed by size).
    pub fn canonical_points(&self, s: usize) -> &[Vec<f64>] {
        &self.canonical[s - 1]
    }

    /// Visit every net point as (support, coefficients); supports are all
    /// index sets of size 1..=r in lexicographic order.
    pub fn for_each_point<F: FnMut(&[usize], &[f64])>(&self, mut f: F) {
        for s in 1..=self.sparsity {
            let points = &self.canonical[s - 1];
            crate::combi::for_each_combination(self.ambient, s, |support| {
                for p in points {
                    f(support, p);
                }
            });
        }
    }

    /// Distance from `x` (restricted to its nonzero support) to the nearest
    /// same-support net point. `x` must be a unit vector with support size
    /// <= r.
    pub fn covering_distance(&self, x: &[f64]) -> Result<f64> {
        let support: Vec<usize> = x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        if support.is_empty() || support.len() > self.sparsity {
            return Err(Error::Parameter(format!(
                "support size {} outside 1..={}",
                support.len(),
                self.sparsity
            )));
        }
        let restricted: Vec<f64> = support.iter().map(|&i| x[i]).collect();
        let points = &self.canonical[support.len() - 1];
        let best = points
            .iter()
            .map(|p| dist_sq(&restricted, p))
            .fold(f64::INFINITY, f64::min);
        Ok(best.sqrt())
    }
}

/// Build a support-preserving rho-net on the r-sparse unit vectors of R^N.
pub fn build_sparse_net(ambient: usize, r: usize, rho: f64) -> Result<SparseNet> {
    if ambient == 0 || r == 0 || r > ambient {
        return Err(Error::Parameter(format!(
            "need 1 <= r <= N, got r={r}, N={ambient}"
        )));
    }
    if ambient > MAX_AMBIENT || r > MAX_SPARSITY {
        return Err(Error::Parameter(format!(
            "desk-scale envelope is N <= {MAX_AMBIENT}, r <= {MAX_SPARSITY}; got N={ambient}, r={r}"
        )));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Parameter(format!("rho must lie in (0,1], got {rho}")));
    }
    let mut canonical = Vec::with_capacity(r);
    let mut cardinality: u128 = 0;
    for s in 1..=r {
        let net = canonical_net(s, rho);
        cardinality += binomial(ambient, s) * net.len() as u128;
        canonical.push(net);
    }
    let c_net = (cardinality as f64).powf(1.0 / r as f64) * rho * r as f64 / ambient as f64;
    Ok(SparseNet {
        ambient,
        sparsity: r,
        radius: rho,
        canonical,
        cardinality,
        c_net,
    })
}

/// Outcome of the quadratic-form net check on the dense sphere.
#[derive(Debug, Clone)]
pub struct NetQuadformReport {
    /// sup over probe vectors of |<My, y>|.
    pub probe_sup: f64,
    /// sup over net points of |<Mz, z>|.
    pub net_sup: f64,
    /// (1 - 2 rho)^{-1} * net_sup.
    pub net_bound: f64,
    pub net_points: usize,
    pub probes: usize,
    pub pass: bool,
}

/// Checks sup_y |<My,y>| <= (1-2rho)^{-1} sup_{z in net} |<Mz,z>| with the
/// sup over y estimated by random probes and the net being a certified
/// rho-net: the cube-surface lattice with pitch rho/sqrt(n-1), projected to
/// the sphere.
pub fn net_quadform_check(
    m: &DMatrix<f64>,
    rho: f64,
    probes: usize,
    seed: u64,
) -> Result<NetQuadformReport> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::Parameter("matrix must be square and nonempty".into()));
    }
    if n > 8 {
        return Err(Error::Parameter(format!("dense net envelope is n <= 8, got {n}")));
    }
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Parameter(format!("rho must lie in (0, 1/2), got {rho}")));
    }

    let quad = |z: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += m[(i, j)] * z[j];
            }
            acc += z[i] * row;
        }
        acc.abs()
    };

    let mut net_sup = 0.0f64;
    let mut net_points = 0usize;
    if n == 1 {
        net_sup = m[(0, 0)].abs();
        net_points = 2;
    } else {
        let pitch = rho / ((n - 1) as f64).sqrt();
        let steps = (2.0 / pitch).ceil() as usize;
        let total = 2 * n as u128 * ((steps + 1) as u128).pow((n - 1) as u32);
        if total > 60_000_000 {
            return Err(Error::Parameter(format!(
                "net of {total} points exceeds the evaluation budget; increase rho or reduce n"
            )));
        }
        let axis: Vec<f64> = (0..=steps).map(|i| -1.0 + 2.0 * i as f64 / steps as f64).collect();
        let free = n - 1;
        let mut idx = vec![0usize; free];
        let mut z = vec![0.0f64; n];
        for face_dim in 0..n {
            for face_sign in [-1.0, 1.0] {
                idx.iter_mut().for_each(|v| *v = 0);
                'lattice: loop {
                    let mut src = 0usize;
                    let mut norm_sq = 0.0;
                    for d in 0..n {
                        let v = if d == face_dim { face_sign } else { axis[idx[src]] };
                        if d != face_dim {
                            src += 1;
                        }
                        z[d] = v;
                        norm_sq += v * v;
                    }
                    let inv = 1.0 / norm_sq.sqrt();
                    for v in z.iter_mut() {
                        *v *= inv;
                    }
                    net_sup = net_sup.max(quad(&z));
                    net_points += 1;
                    let mut d = 0;
                    loop {
                        if d == free {
                            break 'lattice;
                        }
                        idx[d] += 1;
                        if idx[d] <= steps {
                            break;
                        }
                        idx[d] = 0;
                        d += 1;
                    }
                }
            }
        }
    }

    let mut rng = crate::rng::stream(seed, &[crate::rng::domain::NET, n as u64]);
    let mut probe_sup = 0.0f64;
    let mut y = vec![0.0f64; n];
    for _ in 0..probes {
        loop {
            let mut norm_sq = 0.0;
            for v in y.iter_mut() {
                let g: f64 = rand_distr::StandardNormal.sample(&mut rng);
                *v = g;
                norm_sq += g * g;
            }
            if norm_sq > 0.0 {
                let inv = 1.0 / norm_sq.sqrt();
                for v in y.iter_mut() {
                    *v *= inv;
                }
                break;
            }
        }
        probe_sup = probe_sup.max(quad(&y));
    }
    let net_bound = net_sup / (1.0 - 2.0 * rho);
    Ok(NetQuadformReport {
        probe_sup,
        net_sup,
        net_bound,
        net_points,
        probes,
        pass: probe_sup <= net_bound + 1e-12,
    })
}
