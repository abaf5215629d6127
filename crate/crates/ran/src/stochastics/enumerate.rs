//! Exhaustive enumeration of all face-choice sequences for small t.
//!
//! After t steps there are 1 * 3 * 5 * ... * (2t - 1) equiprobable choice
//! sequences. Enumerating them gives exact distributions of degree
//! multisets, face-depth histograms and diameters, which serve as ground
//! truth for the Monte Carlo paths elsewhere in the crate. Diameters here
//! are computed by Floyd-Warshall, deliberately independent of the BFS
//! implementations under test.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::GeneratorState;
use crate::stochastics::rising_factorial;

/// Largest supported t; the outcome count (2t-1)!! is 10395 at t = 6.
pub const ENUMERATION_MAX_T: u64 = 6;

/// Process-law summary of one generated graph, used as the classification
/// key when comparing exact enumeration against Monte Carlo frequencies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OutcomeClass {
    /// Sorted degree sequence.
    pub degree_multiset: Vec<u32>,
    /// (depth, active-face count) pairs, ascending by depth.
    pub depth_histogram: Vec<(u32, u64)>,
    pub diameter: u32,
}

/// Summarize the current state of a generation run.
pub fn classify(state: &GeneratorState) -> OutcomeClass {
    let mut degree_multiset = state.degrees().to_vec();
    degree_multiset.sort_unstable();
    let mut hist: BTreeMap<u32, u64> = BTreeMap::new();
    for face in state.faces().iter() {
        *hist.entry(face.depth).or_insert(0) += 1;
    }
    OutcomeClass {
        degree_multiset,
        depth_histogram: hist.into_iter().collect(),
        diameter: floyd_diameter(state),
    }
}

/// All-pairs shortest paths on a tiny graph.
fn floyd_diameter(state: &GeneratorState) -> u32 {
    let n = state.n();
    const INF: u32 = u32::MAX / 4;
    let mut dist = vec![INF; n * n];
    for v in 0..n {
        dist[v * n + v] = 0;
        for &w in state.neighbors(v as u32 + 1) {
            dist[v * n + (w - 1) as usize] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            for j in 0..n {
                let through = dik + dist[k * n + j];
                if through < dist[i * n + j] {
                    dist[i * n + j] = through;
                }
            }
        }
    }
    dist.into_iter().max().unwrap()
}

/// One enumerated face-choice sequence and its resulting graph summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Face index chosen at each step (index into the active array).
    pub choices: Vec<u32>,
    /// Probability of this sequence: the product of 1/(2j - 1).
    pub probability: Ratio<u64>,
    pub class: OutcomeClass,
    /// Degree of each vertex, indexed by label minus 1 (unsorted).
    pub degrees: Vec<u32>,
}

/// Exhaustive table of all outcomes after t steps.
#[derive(Debug, Clone)]
pub struct EnumerationTable {
    pub t: u64,
    pub outcomes: Vec<Outcome>,
}

fn double_factorial_odd(t: u64) -> u64 {
    (1..=t).map(|j| 2 * j - 1).product::<u64>().max(1)
}

/// Enumerate every face-choice sequence of a t-step run (t <= 6).
pub fn enumerate_small(t: u64) -> Result<EnumerationTable> {
    if t > ENUMERATION_MAX_T {
        return Err(Error::EnumerationTooLarge { t, cap: ENUMERATION_MAX_T });
    }
    let count = double_factorial_odd(t);
    let probability = (1..=t).map(|j| Ratio::new(1, 2 * j - 1)).product::<Ratio<u64>>();

    let mut outcomes = Vec::with_capacity(count as usize);
    for code in 0..count {
        let mut choices = Vec::with_capacity(t as usize);
        let mut rest = code;
        for j in 1..=t {
            let base = 2 * j - 1;
            choices.push((rest % base) as u32);
            rest /= base;
        }
        let mut state = GeneratorState::new(0);
        for &choice in &choices {
            state.subdivide(choice as usize);
        }
        outcomes.push(Outcome {
            choices,
            probability,
            class: classify(&state),
            degrees: state.degrees().to_vec(),
        });
    }
    Ok(EnumerationTable { t, outcomes })
}

impl EnumerationTable {
    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn probability_sum(&self) -> Ratio<u64> {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Exact distribution over full outcome classes.
    pub fn class_distribution(&self) -> BTreeMap<OutcomeClass, Ratio<u64>> {
        let mut map = BTreeMap::new();
        for outcome in &self.outcomes {
            *map.entry(outcome.class.clone()).or_insert_with(|| Ratio::new(0, 1)) += outcome.probability;
        }
        map
    }

    pub fn degree_multiset_distribution(&self) -> BTreeMap<Vec<u32>, Ratio<u64>> {
        let mut map = BTreeMap::new();
        for outcome in &self.outcomes {
            *map.entry(outcome.class.degree_multiset.clone()).or_insert_with(|| Ratio::new(0, 1)) +=
                outcome.probability;
        }
        map
    }

    pub fn depth_histogram_distribution(&self) -> BTreeMap<Vec<(u32, u64)>, Ratio<u64>> {
        let mut map = BTreeMap::new();
        for outcome in &self.outcomes {
            *map.entry(outcome.class.depth_histogram.clone()).or_insert_with(|| Ratio::new(0, 1)) +=
                outcome.probability;
        }
        map
    }

    pub fn diameter_distribution(&self) -> BTreeMap<u32, Ratio<u64>> {
        let mut map = BTreeMap::new();
        for outcome in &self.outcomes {
            *map.entry(outcome.class.diameter).or_insert_with(|| Ratio::new(0, 1)) += outcome.probability;
        }
        map
    }

    /// Exact E[d_t(s)^(k)] for the vertex inserted at step s, as a rational.
    pub fn mean_rising_moment(&self, s: u64, k: u32) -> Ratio<u64> {
        assert!(s >= 1 && s <= self.t, "step out of range");
        let label_index = (s + 2) as usize; // label s + 3, zero-based
        let total: u64 = self
            .outcomes
            .iter()
            .map(|o| rising_factorial(o.degrees[label_index] as u64, k).expect("tiny degrees"))
            .sum();
        Ratio::new(total, self.outcomes.len() as u64)
    }

    /// Exact mean degree of the vertex inserted at step s.
    pub fn mean_degree_of_step_vertex(&self, s: u64) -> Ratio<u64> {
        self.mean_rising_moment(s, 1)
    }

    /// JSON fixture form: outcomes with probabilities and summaries.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": 1,
            "t": self.t,
            "outcome_count": self.outcomes.len(),
            "outcomes": self.outcomes.iter().map(|o| json!({
                "choices": o.choices,
                "probability": { "num": *o.probability.numer(), "den": *o.probability.denom() },
                "degree_multiset": o.class.degree_multiset,
                "depth_histogram": o.class.depth_histogram,
                "diameter": o.class.diameter,
            })).collect::<Vec<_>>(),
        })
    }
}
