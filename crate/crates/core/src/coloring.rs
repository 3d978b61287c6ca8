//! Coloring of the sample: the threshold graph on sample indices, the greedy
//! first-fit coloring process, and the chromatic-number tail bound.
//!
//! The graph joins i < j when |<X_i, X_j>| exceeds H times the largest sample
//! norm. The greedy process walks the sample in order and assigns to vertex i
//! the smallest color r such that every earlier vertex j of color r satisfies
//! |<X_i, X_j>| <= H ||X_j|| — note the per-vertex threshold H ||X_j||, which
//! is at most the graph threshold, so the resulting classes are valid color
//! classes of the graph.

use crate::error::{Error, Result};
use crate::matrix::GramMatrix;
use crate::order_stats::Bound;

/// Conflict graph on sample indices at threshold H.
#[derive(Debug, Clone)]
pub struct ThresholdGraph {
    pub n_vertices: usize,
    pub threshold: f64,
    /// max_h ||X_h||.
    pub max_norm: f64,
    /// Unordered pairs (i, j) with i < j.
    pub edges: Vec<(usize, usize)>,
}

impl ThresholdGraph {
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.n_vertices]; self.n_vertices];
        for &(i, j) in &self.edges {
            adj[i][j] = true;
            adj[j][i] = true;
        }
        adj
    }
}

/// Partition of the sample indices into color classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoringPartition {
    /// classes[m] = indices with color m+1; nonempty classes only,
    /// in color order.
    pub classes: Vec<Vec<usize>>,
    pub threshold: f64,
    /// colors[i] = Y(i) >= 1 assigned by the greedy process.
    pub colors: Vec<usize>,
}

impl ColoringPartition {
    pub fn color_count(&self) -> usize {
        self.classes.len()
    }
}

/// Violation of the within-class near-orthogonality condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColoringViolation {
    pub class: usize,
    pub i: usize,
    pub j: usize,
    pub inner_product: f64,
    pub allowed: f64,
}

/// Edge set {(i,j) : |<X_i,X_j>| > H max_h ||X_h||}.
pub fn build_graph(g: &GramMatrix, h: f64) -> Result<ThresholdGraph> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("threshold must be positive, got {h}")));
    }
    let n = g.len();
    let max_norm = g.max_norm();
    let cutoff = h * max_norm;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if g.entry(i, j).abs() > cutoff {
                edges.push((i, j));
            }
        }
    }
    Ok(ThresholdGraph { n_vertices: n, threshold: h, max_norm, edges })
}

/// The greedy first-fit process Y(i) in sample order.
pub fn greedy_color(g: &GramMatrix, h: f64) -> Result<ColoringPartition> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("threshold must be positive, got {h}")));
    }
    let n = g.len();
    let mut colors = vec![0usize; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let mut assigned = None;
        for (c, members) in classes.iter().enumerate() {
            let fits = members
                .iter()
                .all(|&j| g.entry(i, j).abs() <= h * g.norm(j));
            if fits {
                assigned = Some(c);
                break;
            }
        }
        let c = match assigned {
            Some(c) => c,
            None => {
                classes.push(Vec::new());
                classes.len() - 1
            }
        };
        classes[c].push(i);
        colors[i] = c + 1;
    }
    Ok(ColoringPartition { classes, threshold: h, colors })
}

/// Checks that the partition covers the index range disjointly and that every
/// within-class pair satisfies the graph-level condition
/// |<X_i,X_j>| <= H max_h ||X_h||.
pub fn validate_coloring(
    g: &GramMatrix,
    h: f64,
    partition: &ColoringPartition,
) -> (bool, Vec<ColoringViolation>) {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut violations = Vec::new();
    let mut cover_ok = true;
    for class in &partition.classes {
        for &i in class {
            if i >= n || seen[i] {
                cover_ok = false;
            } else {
                seen[i] = true;
            }
        }
    }
    cover_ok &= seen.iter().all(|&s| s);
    let cutoff = h * g.max_norm();
    for (c, class) in partition.classes.iter().enumerate() {
        for (a, &i) in class.iter().enumerate() {
            for &j in &class[(a + 1)..] {
                let ip = g.entry(i, j);
                if ip.abs() > cutoff {
                    violations.push(ColoringViolation {
                        class: c + 1,
                        i,
                        j,
                        inner_product: ip,
                        allowed: cutoff,
                    });
                }
            }
        }
    }
    (cover_ok && violations.is_empty(), violations)
}

/// (B N H^{-p})^m n^{p/2}: the probability bound for {chi(G_H) > m},
/// reported raw and clamped.
pub fn chromatic_tail_bound(
    b: f64,
    big_n: usize,
    h: f64,
    p: f64,
    n: usize,
    m: usize,
) -> Result<Bound> {
    if m < 2 {
        return Err(Error::Parameter(format!("the bound requires integer m > 1, got {m}")));
    }
    if !(h > 0.0) || !(p > 2.0) || !(b >= 1.0) || big_n == 0 || n == 0 {
        return Err(Error::Parameter(format!(
            "need H > 0, p > 2, B >= 1, N >= 1, n >= 1; got H={h}, p={p}, B={b}, N={big_n}, n={n}"
        )));
    }
    let base = b * big_n as f64 * h.powf(-p);
    Ok(Bound::new(base.powi(m as i32) * (n as f64).powf(p / 2.0)))
}

/// The threshold choice (B N)^{1/p} n^{1/2 - 1/p} / ln(n).
pub fn default_threshold(b: f64, big_n: usize, n: usize, p: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2 for a positive log, got {n}")));
    }
    if !(p > 2.0) || !(b >= 1.0) || big_n == 0 {
        return Err(Error::Parameter(format!(
            "need p > 2, B >= 1, N >= 1; got p={p}, B={b}, N={big_n}"
        )));
    }
    Ok((b * big_n as f64).powf(1.0 / p) * (n as f64).powf(0.5 - 1.0 / p) / (n as f64).ln())
}

/// Exact chromatic number by backtracking; cross-check oracle for tiny
/// graphs only.
pub fn exact_chromatic_number(graph: &ThresholdGraph) -> Result<usize> {
    let n = graph.n_vertices;
    if n == 0 {
        return Ok(0);
    }
    if n > 12 {
        return Err(Error::Parameter(format!(
            "exact chromatic number limited to 12 vertices, got {n}"
        )));
    }
    let adj = graph.adjacency();
    fn feasible(adj: &[Vec<bool>], colors: &mut Vec<usize>, v: usize, k: usize) -> bool {
        if v == adj.len() {
            return true;
        }
        for c in 1..=k {
            let ok = (0..v).all(|u| !(adj[v][u] && colors[u] == c));
            if ok {
                colors[v] = c;
                if feasible(adj, colors, v + 1, k) {
                    return true;
                }
                colors[v] = 0;
            }
        }
        false
    }
    for k in 1..=n {
        let mut colors = vec![0usize; n];
        if feasible(&adj, &mut colors, 0, k) {
            return Ok(k);
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample_matrix, DistributionSpec, Family};
    use crate::matrix::gram;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn gram_of(rows: &[&[f64]]) -> GramMatrix {
        let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
        GramMatrix::from_matrix_rows(&m)
    }

    #[test]
    fn graph_edges_follow_threshold() {
        let g = gram_of(&[&[1.0, 0.0], &[1.0, 0.0]]);
        let low = build_graph(&g, 0.5).unwrap();
        assert_eq!(low.max_norm, 1.0);
        assert_eq!(low.edges, vec![(0, 1)]);
        let high = build_graph(&g, 2.0).unwrap();
        assert!(high.edges.is_empty());
    }

    #[test]
    fn orthogonal_sample_has_no_edges() {
        let g = gram_of(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        for h in [0.01, 0.5, 3.0] {
            assert!(build_graph(&g, h).unwrap().edges.is_empty());
        }
    }

    #[test]
    fn greedy_splits_conflicting_pair() {
        let g = gram_of(&[&[1.0, 0.0], &[1.0, 0.0]]);
        let p = greedy_color(&g, 0.5).unwrap();
        assert_eq!(p.colors, vec![1, 2]);
        assert_eq!(p.classes, vec![vec![0], vec![1]]);
        let loose = greedy_color(&g, 2.0).unwrap();
        assert_eq!(loose.colors, vec![1, 1]);
        assert_eq!(loose.classes, vec![vec![0, 1]]);
    }

    #[test]
    fn greedy_reuses_color_after_orthogonal_vertex() {
        let g = gram_of(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]]);
        let p = greedy_color(&g, 0.5).unwrap();
        assert_eq!(p.colors, vec![1, 1, 2]);
    }

    #[test]
    fn used_colors_form_an_interval() {
        let spec = DistributionSpec::new(Family::Gaussian, 4).unwrap();
        for seed in 0..10 {
            let a = sample_matrix(&spec, 4, 20, seed).unwrap();
            let g = gram(&a);
            let p = greedy_color(&g, 0.3).unwrap();
            let max = *p.colors.iter().max().unwrap();
            for c in 1..=max {
                assert!(p.colors.contains(&c), "color {c} skipped");
            }
            assert!(p.classes.iter().all(|cl| !cl.is_empty()));
        }
    }

    #[test]
    fn greedy_output_always_validates() {
        let families = [
            Family::Gaussian,
            Family::IidSymmetricPareto { alpha: 3.0, t0: 1.0 },
            Family::CoordinateDiscrete,
        ];
        for (f_idx, fam) in families.into_iter().enumerate() {
            let spec = DistributionSpec::new(fam, 5).unwrap();
            for seed in 0..20 {
                let a = sample_matrix(&spec, 5, 25, 100 * f_idx as u64 + seed).unwrap();
                let g = gram(&a);
                for h in [0.1, 0.5, 1.0, 4.0] {
                    let p = greedy_color(&g, h).unwrap();
                    let (ok, viol) = validate_coloring(&g, h, &p);
                    assert!(ok, "violations {viol:?}");
                }
            }
        }
    }

    #[test]
    fn validate_rejects_merged_conflict() {
        let g = gram_of(&[&[1.0, 0.0], &[1.0, 0.0]]);
        let bad = ColoringPartition {
            classes: vec![vec![0, 1]],
            threshold: 0.5,
            colors: vec![1, 1],
        };
        let (ok, violations) = validate_coloring(&g, 0.5, &bad);
        assert!(!ok);
        assert_eq!(violations.len(), 1);
        assert_eq!((violations[0].i, violations[0].j), (0, 1));
    }

    #[test]
    fn singleton_partition_is_valid() {
        let g = gram_of(&[&[2.0, 0.0]]);
        let p = ColoringPartition {
            classes: vec![vec![0]],
            threshold: 1.0,
            colors: vec![1],
        };
        assert!(validate_coloring(&g, 1.0, &p).0);
    }

    #[test]
    fn edgeless_graph_uses_one_color() {
        let g = gram_of(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let p = greedy_color(&g, 0.5).unwrap();
        assert_eq!(p.color_count(), 1);
    }

    #[test]
    fn greedy_count_monotone_in_threshold() {
        let spec = DistributionSpec::new(Family::IidStudentT { nu: 4.0 }, 6).unwrap();
        for seed in 0..10 {
            let a = sample_matrix(&spec, 6, 30, seed).unwrap();
            let g = gram(&a);
            let mut prev = usize::MAX;
            for h in [0.05, 0.1, 0.2, 0.4, 0.8, 1.6] {
                let count = greedy_color(&g, h).unwrap().color_count();
                assert!(count <= prev, "count increased when H grew");
                prev = count;
            }
        }
    }

    #[test]
    fn greedy_count_dominates_exact_chromatic_number() {
        let spec = DistributionSpec::new(Family::IidSymmetricPareto { alpha: 2.5, t0: 1.0 }, 3)
            .unwrap();
        for seed in 0..15 {
            let a = sample_matrix(&spec, 3, 10, seed).unwrap();
            let g = gram(&a);
            for h in [0.2, 0.5, 1.0] {
                let graph = build_graph(&g, h).unwrap();
                let chi = exact_chromatic_number(&graph).unwrap();
                let greedy = greedy_color(&g, h).unwrap().color_count();
                assert!(
                    greedy >= chi,
                    "greedy {greedy} below chromatic number {chi}"
                );
            }
        }
    }

    #[test]
    fn tail_bound_examples() {
        let b = chromatic_tail_bound(1.0, 10, 10.0, 4.0, 4, 2).unwrap();
        assert_relative_eq!(b.raw, 1.6e-5, epsilon = 1e-18);
        let unit = chromatic_tail_bound(1.0, 1, 1.0, 4.0, 1, 2).unwrap();
        assert_relative_eq!(unit.raw, 1.0, epsilon = 1e-12);
        let big = chromatic_tail_bound(2.0, 100, 10.0, 3.0, 9, 2).unwrap();
        assert_relative_eq!(big.raw, 1.08, epsilon = 1e-12);
        assert_eq!(big.clamped, 1.0);
        assert!(chromatic_tail_bound(1.0, 10, 10.0, 4.0, 4, 1).is_err());
    }

    #[test]
    fn default_threshold_examples() {
        let h = default_threshold(1.0, 16, 4, 4.0).unwrap();
        assert_relative_eq!(h, 2.0 * 2.0f64.sqrt() / 4.0f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(h, 2.040278893193579, epsilon = 1e-12);

        // Homogeneity: scaling B by 2^p doubles H.
        let base = default_threshold(1.0, 100, 8, 3.0).unwrap();
        let scaled = default_threshold(8.0, 100, 8, 3.0).unwrap();
        assert_relative_eq!(scaled, 2.0 * base, max_relative = 1e-12);

        // 1024^{1/8} * 32^{3/8} / ln 32, frozen from a 40-digit evaluation
        // of 2^{25/8} / (5 ln 2).
        let h3 = default_threshold(1.0, 1024, 32, 8.0).unwrap();
        assert_relative_eq!(h3, 2.5172321567475753, epsilon = 1e-12);

        assert!(default_threshold(1.0, 16, 1, 4.0).is_err());
    }

    #[test]
    fn exact_chromatic_number_on_known_graphs() {
        // Triangle needs 3 colors.
        let g = gram_of(&[&[1.0, 0.9, 0.9], &[0.9, 1.0, 0.9], &[0.9, 0.9, 1.0]]);
        let graph = build_graph(&g, 0.5).unwrap();
        assert_eq!(graph.edges.len(), 3);
        assert_eq!(exact_chromatic_number(&graph).unwrap(), 3);
        // Edgeless graph needs 1.
        let iso = gram_of(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(
            exact_chromatic_number(&build_graph(&iso, 0.5).unwrap()).unwrap(),
            1
        );
    }
}
