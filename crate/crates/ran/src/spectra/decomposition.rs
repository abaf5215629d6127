//! Star-forest decomposition of the edge set.
//!
//! Vertices are split by insertion step at the cutoffs floor(t^(1/8)) and
//! floor(t^(9/16)) into early (S1), middle (S2) and late (S3) sets; S3'
//! holds the late vertices with two or more early neighbors. The edges
//! between S1 and S3 minus S3' form a star forest F whose largest
//! eigenvalue is known exactly (the square root of the largest star), and
//! H = E minus F is the remainder whose top eigenvalue is reported as a
//! diagnostic against t^(1/4).

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Csr, RanGraph};
use crate::spectra::eigen::{eigensolve_csr, top_k_eigenvalues, SpectralReport};

/// Smallest t for which the decomposition is defined (floor(t^(1/8)) >= 2).
pub const DECOMPOSITION_MIN_T: u64 = 256;

/// floor(t^(1/8)) by exact integer search.
fn floor_eighth_root(t: u64) -> u64 {
    let mut r = (t as f64).powf(0.125) as u64;
    while (r + 1).checked_pow(8).map_or(false, |p| p <= t) {
        r += 1;
    }
    while r.checked_pow(8).map_or(true, |p| p > t) {
        r -= 1;
    }
    r
}

/// floor(t^(9/16)): float estimate corrected by a log comparison, which
/// settles exact-power boundary cases.
fn floor_pow_9_16(t: u64) -> u64 {
    let mut r = (t as f64).powf(9.0 / 16.0).floor() as u64;
    let le = |candidate: u64, t: u64| -> bool {
        // candidate <= t^(9/16)  <=>  16 ln candidate <= 9 ln t
        16.0 * (candidate as f64).ln() <= 9.0 * (t as f64).ln() + 1e-9
    };
    while le(r + 1, t) {
        r += 1;
    }
    while r > 1 && !le(r, t) {
        r -= 1;
    }
    r
}

/// Vertex-set split and star-forest edges of one graph.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    /// Early cutoff floor(t^(1/8)).
    pub t1: u64,
    /// Middle cutoff floor(t^(9/16)).
    pub t2: u64,
    /// Largest label in S1 (S1 = labels 1..=s1_end; insertion order equals
    /// label order, so the sets are contiguous label ranges).
    pub s1_end: u32,
    /// Largest label in S2.
    pub s2_end: u32,
    /// Number of vertices.
    pub n: u32,
    /// Late vertices with >= 2 early neighbors, ascending.
    pub s3_prime: Vec<u32>,
    /// Star-forest edges (center in S1, leaf in S3 minus S3').
    pub f_edges: Vec<(u32, u32)>,
}

impl Decomposition {
    pub fn s1(&self) -> std::ops::RangeInclusive<u32> {
        1..=self.s1_end
    }

    pub fn s2(&self) -> std::ops::RangeInclusive<u32> {
        self.s1_end + 1..=self.s2_end
    }

    pub fn s3(&self) -> std::ops::RangeInclusive<u32> {
        self.s2_end + 1..=self.n
    }

    pub fn is_s3_prime(&self, v: u32) -> bool {
        self.s3_prime.binary_search(&v).is_ok()
    }

    /// Leaf count of the largest star in F.
    pub fn largest_star(&self) -> u64 {
        let mut counts = std::collections::BTreeMap::new();
        for &(center, _) in &self.f_edges {
            *counts.entry(center).or_insert(0u64) += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }

    /// Exact largest eigenvalue of the star forest: sqrt(largest star).
    pub fn lambda1_f_exact(&self) -> f64 {
        (self.largest_star() as f64).sqrt()
    }

    /// CSR of F alone (same vertex set as the graph).
    pub fn f_csr(&self) -> Csr {
        let edges: Vec<(u32, u32)> = self.f_edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
        Csr::from_edges(self.n as usize, &edges)
    }

    /// CSR of the remainder H = E minus F.
    pub fn h_csr(&self, graph: &RanGraph) -> Csr {
        let forest: HashSet<(u32, u32)> = self.f_edges.iter().copied().collect();
        let edges: Vec<(u32, u32)> = graph
            .edges_in_creation_order()
            .filter(|e| !forest.contains(e))
            .map(|(u, v)| (u - 1, v - 1))
            .collect();
        Csr::from_edges(self.n as usize, &edges)
    }
}

/// Split the vertices at the spectral-analysis cutoffs and extract the
/// maximal star forest between S1 and S3 minus S3'.
pub fn star_forest_decomposition(graph: &RanGraph) -> Result<Decomposition> {
    let t = graph.t();
    if t < DECOMPOSITION_MIN_T {
        return Err(Error::GraphTooSmall { t, required: DECOMPOSITION_MIN_T });
    }
    let t1 = floor_eighth_root(t);
    let t2 = floor_pow_9_16(t);
    // Insertion step of label v is v - 3 (0 for the initial triangle), so
    // "step <= cutoff" is "label <= cutoff + 3".
    let s1_end = (t1 + 3) as u32;
    let s2_end = (t2 + 3) as u32;
    let n = graph.n() as u32;

    let mut s3_prime = Vec::new();
    let mut f_edges = Vec::new();
    for v in s2_end + 1..=n {
        let mut early = graph.neighbors(v)?.iter().filter(|&&w| w <= s1_end);
        match (early.next(), early.next()) {
            (Some(&center), None) => f_edges.push((center, v)),
            (Some(_), Some(_)) => s3_prime.push(v),
            _ => {}
        }
    }
    Ok(Decomposition { t1, t2, s1_end, s2_end, n, s3_prime, f_edges })
}

/// Eigenvalue-to-degree ratios plus the decomposition remainder diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct EigenRatioReport {
    pub spectral: SpectralReport,
    /// Largest eigenvalue of H = E minus F.
    pub lambda1_h: f64,
    /// lambda1(H) / t^(1/4).
    pub lambda1_h_over_t_quarter: f64,
    /// Exact lambda1 of the star forest, sqrt(largest star).
    pub lambda1_f: f64,
    pub s3_prime_size: usize,
    pub f_edge_count: usize,
}

/// Compute top-k eigenvalue ratios together with the lambda1(H) diagnostic.
pub fn eigen_ratio_report(graph: &RanGraph, k: usize, tol: f64) -> Result<EigenRatioReport> {
    let spectral = top_k_eigenvalues(graph, k, tol)?;
    let decomposition = star_forest_decomposition(graph)?;
    let h = decomposition.h_csr(graph);
    let lambda1_h = eigensolve_csr(&h, 1, tol)[0].value;
    let t_quarter = (graph.t() as f64).powf(0.25);
    Ok(EigenRatioReport {
        spectral,
        lambda1_h,
        lambda1_h_over_t_quarter: lambda1_h / t_quarter,
        lambda1_f: decomposition.lambda1_f_exact(),
        s3_prime_size: decomposition.s3_prime.len(),
        f_edge_count: decomposition.f_edges.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_graph;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn roots_match_exact_integer_search() {
        for t in [256u64, 257, 400, 1000, 6560, 6561, 65536, 1 << 24] {
            let r8 = floor_eighth_root(t);
            assert!(r8.pow(8) <= t && (r8 + 1).pow(8) > t, "t = {t}");
        }
        // 9/16 power against exact u128 arithmetic where it fits.
        for t in (256u64..6000).step_by(37).chain([65536, 10_000, 18_000]) {
            let r = floor_pow_9_16(t);
            let le = |x: u64| (x as u128).pow(16) <= (t as u128).pow(9);
            assert!(le(r) && !le(r + 1), "t = {t}, r = {r}");
        }
    }

    #[test]
    fn rejects_small_t() {
        let graph = generate_graph(255, 0).unwrap();
        assert!(matches!(star_forest_decomposition(&graph), Err(Error::GraphTooSmall { .. })));
    }

    #[test]
    fn s1_size_is_cutoff_plus_three() {
        let graph = generate_graph(300, 5).unwrap();
        let decomposition = star_forest_decomposition(&graph).unwrap();
        assert_eq!(decomposition.t1, 2);
        assert_eq!(decomposition.s1().count() as u64, decomposition.t1 + 3);
    }

    #[test]
    fn forest_eigenvalue_matches_solver() {
        // Two routes to lambda1(F): closed form vs the iterative solver.
        let graph = generate_graph(2000, 11).unwrap();
        let decomposition = star_forest_decomposition(&graph).unwrap();
        assert!(decomposition.largest_star() > 0);
        let f = decomposition.f_csr();
        let solved = eigensolve_csr(&f, 1, 1e-10)[0].value;
        assert!((solved - decomposition.lambda1_f_exact()).abs() <= 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]

        #[test]
        fn partition_and_star_properties(t in 256u64..1500, seed in any::<u64>()) {
            let graph = generate_graph(t, seed).unwrap();
            let d = star_forest_decomposition(&graph).unwrap();

            // S1, S2, S3 partition the labels.
            prop_assert!(d.s1_end < d.s2_end && d.s2_end < d.n);
            let total = d.s1().count() + d.s2().count() + d.s3().count();
            prop_assert_eq!(total, graph.n());

            // F and H partition the edge set.
            let f: BTreeSet<(u32, u32)> = d.f_edges.iter().copied().collect();
            prop_assert_eq!(f.len(), d.f_edges.len());
            let all: BTreeSet<(u32, u32)> = graph.edges_in_creation_order().collect();
            prop_assert!(f.is_subset(&all));
            let h = d.h_csr(&graph);
            prop_assert_eq!(h.edge_count() + f.len(), graph.m());

            // Each F edge joins S1 to S3 minus S3', and each such leaf has
            // at most one forest edge.
            let mut leaves = BTreeSet::new();
            for &(center, leaf) in &d.f_edges {
                prop_assert!(center <= d.s1_end);
                prop_assert!(leaf > d.s2_end);
                prop_assert!(!d.is_s3_prime(leaf));
                prop_assert!(leaves.insert(leaf));
            }

            // S3' members really have >= 2 early neighbors.
            for &v in &d.s3_prime {
                let early = graph.neighbors(v).unwrap().iter().filter(|&&w| w <= d.s1_end).count();
                prop_assert!(early >= 2);
            }
        }
    }
}
