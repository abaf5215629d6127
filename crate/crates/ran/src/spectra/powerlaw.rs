//! Discrete power-law exponent fitting.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Maximum-likelihood exponent for a discrete power-law tail.
///
/// Uses the continuous-approximation MLE with the standard half-step
/// offset: alpha = 1 + N / sum over tail vertices of ln(d / (d_min - 1/2)).
/// Requires at least two distinct degrees at or above `d_min`, otherwise
/// the likelihood is degenerate.
pub fn fit_power_law_exponent(histogram: &BTreeMap<u32, u64>, d_min: u32) -> Result<f64> {
    assert!(d_min >= 1, "d_min must be at least 1");
    let tail: Vec<(u32, u64)> = histogram
        .range(d_min..)
        .filter(|&(_, &count)| count > 0)
        .map(|(&d, &count)| (d, count))
        .collect();
    if tail.len() < 2 {
        return Err(Error::DegenerateHistogram { d_min });
    }
    let shift = d_min as f64 - 0.5;
    let mut n = 0u64;
    let mut log_sum = 0.0f64;
    for (degree, count) in tail {
        n += count;
        log_sum += count as f64 * (degree as f64 / shift).ln();
    }
    Ok(1.0 + n as f64 / log_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RanRng;

    /// Draw `n` samples from an exact discrete power law P(d) ~ d^-alpha,
    /// d >= d_min, by inversion on a truncated CDF (tail mass < 1e-10).
    fn sample_power_law(alpha: f64, d_min: u32, n: usize, seed: u64) -> BTreeMap<u32, u64> {
        let mut weights = Vec::new();
        let mut total = 0.0f64;
        let mut d = d_min as f64;
        loop {
            let w = d.powf(-alpha);
            weights.push(w);
            total += w;
            // Integral tail bound for the remaining mass.
            let tail = d.powf(1.0 - alpha) / (alpha - 1.0);
            if tail < 1e-10 * total || weights.len() >= 2_000_000 {
                break;
            }
            d += 1.0;
        }
        let cdf: Vec<f64> = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w / total;
                Some(*acc)
            })
            .collect();

        let mut rng = RanRng::new(seed);
        let mut histogram = BTreeMap::new();
        for _ in 0..n {
            let u = rng.unit_f64();
            let idx = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
            *histogram.entry(d_min + idx as u32).or_insert(0u64) += 1;
        }
        histogram
    }

    #[test]
    fn recovers_synthetic_exponent() {
        let histogram = sample_power_law(2.5, 5, 100_000, 42);
        let alpha = fit_power_law_exponent(&histogram, 5).unwrap();
        assert!((alpha - 2.5).abs() <= 0.05, "alpha_hat = {alpha}");
    }

    #[test]
    fn degenerate_histogram_is_an_error() {
        let histogram = BTreeMap::from([(3u32, 4u64)]);
        assert!(matches!(
            fit_power_law_exponent(&histogram, 3),
            Err(Error::DegenerateHistogram { .. })
        ));
        // Distinct degrees exist but not above the threshold.
        let histogram = BTreeMap::from([(3u32, 4u64), (5, 2)]);
        assert!(fit_power_law_exponent(&histogram, 5).is_err());
        assert!(fit_power_law_exponent(&histogram, 3).is_ok());
    }

    #[test]
    fn ran_exponent_near_three() {
        // The degree tail of a generated graph; the known tail exponent of
        // this growth process is 3.
        let graph = crate::graph::generate_graph(30_000, 7).unwrap();
        let histogram = crate::spectra::degree_histogram(&graph);
        let alpha = fit_power_law_exponent(&histogram, 10).unwrap();
        assert!((alpha - 3.0).abs() <= 0.4, "alpha_hat = {alpha}");
    }
}
