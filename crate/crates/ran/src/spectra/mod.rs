//! Degree statistics and adjacency spectrum.

use std::collections::{BinaryHeap, BTreeMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::RanGraph;

mod decomposition;
mod eigen;
mod powerlaw;

pub use decomposition::{
    eigen_ratio_report, star_forest_decomposition, Decomposition, EigenRatioReport,
    DECOMPOSITION_MIN_T,
};
pub use eigen::{eigensolve_csr, top_k_eigenvalues, EigenPair, SpectralReport};
pub use powerlaw::fit_power_law_exponent;

/// One entry of the top-degree list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TopDegree {
    pub vertex: u32,
    pub degree: u32,
}

/// Degree summary of one graph.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeReport {
    /// k highest degrees, non-increasing; ties broken by smaller label.
    pub top_k: Vec<TopDegree>,
    /// degree -> number of vertices.
    pub histogram: BTreeMap<u32, u64>,
    /// Fitted power-law exponent, when the tail is fittable.
    pub alpha_hat: Option<f64>,
}

#[derive(PartialEq, Eq)]
struct Entry {
    degree: u32,
    vertex: u32,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Higher degree wins; equal degrees prefer the smaller label.
        self.degree.cmp(&other.degree).then(other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The k largest degrees with their vertices, via a size-k min-heap.
pub fn top_k_degrees(graph: &RanGraph, k: usize) -> Result<Vec<TopDegree>> {
    let n = graph.n();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let mut heap: BinaryHeap<std::cmp::Reverse<Entry>> = BinaryHeap::with_capacity(k + 1);
    for (i, &degree) in graph.degrees().iter().enumerate() {
        let entry = Entry { degree, vertex: i as u32 + 1 };
        if heap.len() < k {
            heap.push(std::cmp::Reverse(entry));
        } else if entry > heap.peek().expect("non-empty").0 {
            heap.pop();
            heap.push(std::cmp::Reverse(entry));
        }
    }
    let sorted = heap.into_sorted_vec();
    Ok(sorted
        .into_iter()
        .map(|std::cmp::Reverse(e)| TopDegree { vertex: e.vertex, degree: e.degree })
        .collect())
}

/// Map degree -> vertex count; counts sum to n.
pub fn degree_histogram(graph: &RanGraph) -> BTreeMap<u32, u64> {
    let mut histogram = BTreeMap::new();
    for &d in graph.degrees() {
        *histogram.entry(d).or_insert(0) += 1;
    }
    histogram
}

/// Assemble the full degree report. The power-law fit uses tail threshold
/// `d_min`; an unfittable tail yields `alpha_hat = None`.
pub fn degree_report(graph: &RanGraph, k: usize, d_min: u32) -> Result<DegreeReport> {
    let histogram = degree_histogram(graph);
    let alpha_hat = fit_power_law_exponent(&histogram, d_min).ok();
    Ok(DegreeReport { top_k: top_k_degrees(graph, k)?, histogram, alpha_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_graph;
    use proptest::prelude::*;

    /// Full-sort reference for the heap selection.
    fn top_k_by_sort(graph: &RanGraph, k: usize) -> Vec<TopDegree> {
        let mut all: Vec<TopDegree> = graph
            .degrees()
            .iter()
            .enumerate()
            .map(|(i, &d)| TopDegree { vertex: i as u32 + 1, degree: d })
            .collect();
        all.sort_by(|a, b| b.degree.cmp(&a.degree).then(a.vertex.cmp(&b.vertex)));
        all.truncate(k);
        all
    }

    #[test]
    fn k4_ties_break_by_label() {
        let graph = generate_graph(1, 9).unwrap();
        let top = top_k_degrees(&graph, 4).unwrap();
        assert_eq!(
            top,
            vec![
                TopDegree { vertex: 1, degree: 3 },
                TopDegree { vertex: 2, degree: 3 },
                TopDegree { vertex: 3, degree: 3 },
                TopDegree { vertex: 4, degree: 3 },
            ]
        );
    }

    #[test]
    fn triangle_top_three() {
        let graph = generate_graph(0, 0).unwrap();
        let top = top_k_degrees(&graph, 3).unwrap();
        assert_eq!(top.iter().map(|e| e.degree).collect::<Vec<_>>(), vec![2, 2, 2]);
    }

    #[test]
    fn k_out_of_range() {
        let graph = generate_graph(2, 0).unwrap();
        assert!(matches!(top_k_degrees(&graph, 6), Err(Error::KTooLarge { .. })));
        assert!(matches!(top_k_degrees(&graph, 0), Err(Error::KTooLarge { .. })));
    }

    #[test]
    fn histogram_t1() {
        let graph = generate_graph(1, 4).unwrap();
        let histogram = degree_histogram(&graph);
        assert_eq!(histogram, BTreeMap::from([(3, 4)]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn heap_matches_full_sort(t in 0u64..400, seed in any::<u64>(), k in 1usize..8) {
            let graph = generate_graph(t, seed).unwrap();
            let k = k.min(graph.n());
            prop_assert_eq!(top_k_degrees(&graph, k).unwrap(), top_k_by_sort(&graph, k));
        }

        #[test]
        fn histogram_counts_sum_to_n(t in 0u64..400, seed in any::<u64>()) {
            let graph = generate_graph(t, seed).unwrap();
            let histogram = degree_histogram(&graph);
            let total: u64 = histogram.values().sum();
            prop_assert_eq!(total, graph.n() as u64);
            // From t = 1 on, every vertex has degree at least 3.
            if t >= 1 {
                prop_assert!(*histogram.keys().next().unwrap() >= 3);
            }
        }
    }
}
