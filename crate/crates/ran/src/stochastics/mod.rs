//! Waiting-time law, degree-moment checks, and the small-t enumeration oracle.

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::GeneratorState;
use crate::rng::{RanRng, TrialPlan};

mod enumerate;

pub use enumerate::{enumerate_small, EnumerationTable, Outcome, ENUMERATION_MAX_T};

/// Exact survival probability P(X > t) = 3 / (2t + 3) for the waiting time
/// X until an insertion lands in one of the two watched faces.
///
/// Time 0 is the five-face configuration right after the second insertion:
/// the three children of the twice-subdivided region plus the two watched
/// faces B and C. At local step j there are 2j + 3 active faces of which
/// 2j + 1 avoid B and C, so P(X > t) telescopes to 3 / (2t + 3).
/// By convention P(X > 0) = 1.
pub fn waiting_survival_exact(t: u64) -> Ratio<u64> {
    if t == 0 {
        Ratio::new(1, 1)
    } else {
        Ratio::new(3, 2 * t + 3)
    }
}

/// Empirical survival data from seeded Monte Carlo trials.
#[derive(Debug, Clone)]
pub struct SurvivalCurve {
    trials: u64,
    cutoff: u64,
    /// survivors[t] = number of trials with X > t, for t in 0..=cutoff.
    survivors: Vec<u64>,
}

impl SurvivalCurve {
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// Number of trials with X > t.
    pub fn survivors_at(&self, t: u64) -> u64 {
        self.survivors[t as usize]
    }

    /// Empirical P(X > t).
    pub fn empirical(&self, t: u64) -> f64 {
        self.survivors[t as usize] as f64 / self.trials as f64
    }

    pub fn exact(&self, t: u64) -> Ratio<u64> {
        waiting_survival_exact(t)
    }

    /// Mean of min(X, cap), exact over the sample. Requires cap <= cutoff.
    ///
    /// Uses the tail identity min(X, cap) = sum over tau < cap of [X > tau].
    pub fn censored_mean(&self, cap: u64) -> f64 {
        assert!(cap <= self.cutoff, "cap exceeds tracked cutoff");
        let total: u128 = self.survivors[..cap as usize].iter().map(|&s| s as u128).sum();
        total as f64 / self.trials as f64
    }
}

/// Simulate one waiting-time trial; returns min(X, cutoff + 1), where
/// cutoff + 1 stands for a censored trial.
fn waiting_trial(rng: &mut RanRng, cutoff: u64) -> u64 {
    for j in 1..=cutoff {
        let total = 2 * j + 3;
        if rng.index(total as usize) < 2 {
            return j;
        }
    }
    cutoff + 1
}

/// Run seeded waiting-time trials, censored at `cutoff`.
///
/// Trials run independently (and in parallel) on derived per-trial seeds;
/// the result is deterministic for a given plan.
pub fn waiting_time_trials(plan: TrialPlan, cutoff: u64) -> SurvivalCurve {
    let size = cutoff as usize + 2;
    let counts = (0..plan.trials)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut acc, i| {
                let mut rng = RanRng::new(plan.trial_seed(i));
                let x = waiting_trial(&mut rng, cutoff);
                acc[x as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    // survivors[t] = #{X > t} via suffix sums of the outcome counts.
    let mut survivors = vec![0u64; cutoff as usize + 1];
    let mut tail = 0u64;
    for t in (0..=cutoff as usize + 1).rev() {
        tail += counts[t];
        if t <= cutoff as usize {
            survivors[t] = tail;
        }
    }
    SurvivalCurve { trials: plan.trials, cutoff, survivors }
}

/// Rising factorial a^(k) = a (a+1) ... (a+k-1); the empty product is 1.
pub fn rising_factorial(a: u64, k: u32) -> Result<u64> {
    let mut product: u64 = 1;
    for i in 0..k as u64 {
        let factor = a.checked_add(i).ok_or(Error::Overflow { a, k })?;
        product = product.checked_mul(factor).ok_or(Error::Overflow { a, k })?;
    }
    Ok(product)
}

/// Moment inequality reference value: ((k+2)!/2) * (2t/s)^(k/2).
pub fn moment_bound(s: u64, t: u64, k: u32) -> f64 {
    let mut factorial = 1.0f64;
    for i in 2..=(k as u64 + 2) {
        factorial *= i as f64;
    }
    factorial / 2.0 * (2.0 * t as f64 / s as f64).powf(k as f64 / 2.0)
}

/// Exact E[d_t(s)^(k)] for the vertex inserted at step s >= 1.
///
/// An inserted vertex sees one face per unit of degree, so conditioning on
/// one step gives E[d^(k)] -> E[d^(k)] (1 + k/(2 tau - 1)); iterating from
/// d_s = 3 yields 3^(k) times the product over tau = s+1..=t.
pub fn expected_rising_moment(s: u64, t: u64, k: u32) -> f64 {
    assert!(s >= 1 && s <= t);
    let mut value = rising_factorial(3, k).expect("small k") as f64;
    for tau in (s + 1)..=t {
        value *= 1.0 + k as f64 / (2.0 * tau as f64 - 1.0);
    }
    value
}

/// Monte Carlo check of the rising-moment bound for one (s, t, k) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub s: u64,
    pub t: u64,
    pub k: u32,
    pub trials: u64,
    /// Monte Carlo mean of d_t(s)^(k).
    pub estimate: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// ((k+2)!/2) (2t/s)^(k/2).
    pub bound: f64,
}

impl MomentCheck {
    /// The gate: estimate minus four standard errors must not exceed the bound.
    pub fn passes(&self) -> bool {
        self.estimate - 4.0 * self.stderr <= self.bound
    }
}

/// Estimate E[d_t(s)^(k)] by simulating the full process `plan.trials`
/// times and compare against [`moment_bound`].
pub fn moment_bound_check(s: u64, t: u64, k: u32, plan: TrialPlan) -> Result<MomentCheck> {
    if s < 1 || s > t {
        return Err(Error::GraphTooSmall { t, required: s.max(1) });
    }
    // Degrees are at most t + 2, so this also proves per-trial safety.
    rising_factorial(t + 2, k)?;

    let label = (s + 3) as u32;
    let (sum, sum_sq) = (0..plan.trials)
        .into_par_iter()
        .fold(
            || (None::<GeneratorState>, 0u128, 0u128),
            |(state, mut sum, mut sum_sq), i| {
                let mut state = match state {
                    Some(mut st) => {
                        st.reset(plan.trial_seed(i));
                        st
                    }
                    None => GeneratorState::new(plan.trial_seed(i)),
                };
                for _ in 0..t {
                    state.step();
                }
                let degree = state.degrees()[(label - 1) as usize] as u64;
                let value = rising_factorial(degree, k).expect("checked above");
                sum += value as u128;
                sum_sq += (value as u128) * (value as u128);
                (Some(state), sum, sum_sq)
            },
        )
        .map(|(_, sum, sum_sq)| (sum, sum_sq))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let n = plan.trials as f64;
    let mean = sum as f64 / n;
    let variance = ((sum_sq as f64) - (sum as f64) * (sum as f64) / n) / (n - 1.0);
    let stderr = (variance.max(0.0) / n).sqrt();
    Ok(MomentCheck { s, t, k, trials: plan.trials, estimate: mean, stderr, bound: moment_bound(s, t, k) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_exact_values() {
        assert_eq!(waiting_survival_exact(0), Ratio::new(1, 1));
        assert_eq!(waiting_survival_exact(1), Ratio::new(3, 5));
        assert_eq!(waiting_survival_exact(10), Ratio::new(3, 23));
    }

    #[test]
    fn survival_recurrence_exact() {
        for t in 1..500u64 {
            let ratio = waiting_survival_exact(t) / waiting_survival_exact(t - 1);
            assert_eq!(ratio, Ratio::new(2 * t + 1, 2 * t + 3), "t = {t}");
        }
    }

    #[test]
    fn survival_strictly_decreasing() {
        let mut prev = waiting_survival_exact(0);
        for t in 1..100 {
            let cur = waiting_survival_exact(t);
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn trials_match_law_within_four_sigma() {
        let plan = TrialPlan::new(77, 100_000);
        let curve = waiting_time_trials(plan, 100);
        for t in 1..=10u64 {
            let p = waiting_survival_exact(t);
            let p = *p.numer() as f64 / *p.denom() as f64;
            let sigma = (p * (1.0 - p) / plan.trials as f64).sqrt();
            let diff = (curve.empirical(t) - p).abs();
            assert!(diff <= 4.0 * sigma, "t={t}: diff {diff:.5} > 4 sigma {:.5}", 4.0 * sigma);
        }
    }

    #[test]
    fn trials_are_deterministic() {
        let a = waiting_time_trials(TrialPlan::new(5, 20_000), 50);
        let b = waiting_time_trials(TrialPlan::new(5, 20_000), 50);
        assert_eq!(a.survivors, b.survivors);
    }

    #[test]
    fn censored_mean_grows_with_cutoff() {
        let curve = waiting_time_trials(TrialPlan::new(3, 200_000), 1000);
        let m1 = curve.censored_mean(100);
        let m2 = curve.censored_mean(1000);
        assert!(m2 > m1, "censored means {m1} vs {m2}");
    }

    #[test]
    fn rising_factorial_values() {
        assert_eq!(rising_factorial(3, 2).unwrap(), 12);
        assert_eq!(rising_factorial(7, 0).unwrap(), 1);
        assert_eq!(rising_factorial(2, 3).unwrap(), 24);
        assert_eq!(rising_factorial(0, 2).unwrap(), 0);
        assert!(matches!(rising_factorial(u64::MAX, 2), Err(Error::Overflow { .. })));
        assert!(rising_factorial(1 << 32, 2).is_err());
    }

    #[test]
    fn moment_bound_values() {
        // k=1: 3 * sqrt(2t/s).
        let b = moment_bound(1, 3, 1);
        assert!((b - 3.0 * 6.0f64.sqrt()).abs() < 1e-12);
        let b = moment_bound(10, 100, 2);
        assert!((b - 12.0 * 20.0).abs() < 1e-9);
    }

    #[test]
    fn moment_estimate_matches_exact_formula() {
        // The closed-form expectation is an independent oracle for the
        // Monte Carlo estimator.
        let plan = TrialPlan::new(11, 20_000);
        for (s, t, k) in [(1u64, 20u64, 1u32), (3, 20, 2), (5, 30, 1)] {
            let check = moment_bound_check(s, t, k, plan).unwrap();
            let exact = expected_rising_moment(s, t, k);
            let diff = (check.estimate - exact).abs();
            assert!(
                diff <= 4.0 * check.stderr,
                "(s={s}, t={t}, k={k}): estimate {} vs exact {exact}, stderr {}",
                check.estimate,
                check.stderr
            );
            assert!(check.passes());
        }
    }

    #[test]
    fn moment_check_at_own_insertion_step() {
        // d_t at the vertex's own insertion step is exactly 3.
        let check = moment_bound_check(12, 12, 1, TrialPlan::new(0, 500)).unwrap();
        assert_eq!(check.estimate, 3.0);
        assert_eq!(check.stderr, 0.0);
        assert!((check.bound - 3.0 * 2.0f64.sqrt()).abs() < 1e-12);
        assert!(check.passes());
    }

    #[test]
    fn moment_check_rejects_bad_s() {
        assert!(moment_bound_check(0, 5, 1, TrialPlan::new(0, 10)).is_err());
        assert!(moment_bound_check(6, 5, 1, TrialPlan::new(0, 10)).is_err());
    }
}
