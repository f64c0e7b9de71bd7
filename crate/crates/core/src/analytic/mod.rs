//! Closed-form rate-distortion functions for the covering distortion.
//!
//! Rates are in bits (base-2 logarithms throughout). The slotted function
//! `rd_slotted` is per slot; dividing by the slot width gives bits per
//! second, which converges to `rd_poisson` as the slot width shrinks.

pub mod blahut;

use crate::error::{Error, Result};

pub use blahut::rd_oracle_blahut;

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!(
            "entropy argument must be in [0, 1], got {q}"
        )));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(q) + term(1.0 - q))
}

/// Covering rate-distortion function of a Poisson process, in bits per
/// second: `-lambda log2 D` for `D` in (0, 1), zero from `D = 1` on.
pub fn rd_poisson(budget: f64, intensity: f64) -> Result<f64> {
    if !(budget > 0.0) {
        return Err(Error::Domain(format!(
            "distortion budget must be positive, got {budget}"
        )));
    }
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(Error::Domain(format!(
            "intensity must be nonnegative, got {intensity}"
        )));
    }
    if budget >= 1.0 {
        return Ok(0.0);
    }
    Ok(-intensity * budget.log2())
}

/// The source one-probability of a slotted Poisson pattern,
/// `1 - exp(-lambda delta)`. Budgets below it are infeasible: even
/// reconstructing only the occupied slots exceeds the measure budget.
pub fn feasibility_threshold(intensity: f64, slot_width: f64) -> f64 {
    -(-intensity * slot_width).exp_m1()
}

fn check_slotted_args(budget: f64, intensity: f64, slot_width: f64) -> Result<()> {
    if !(budget > 0.0) {
        return Err(Error::Domain(format!(
            "distortion budget must be positive, got {budget}"
        )));
    }
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(Error::Domain(format!(
            "intensity must be nonnegative, got {intensity}"
        )));
    }
    if !(slot_width > 0.0) {
        return Err(Error::Domain(format!(
            "slot width must be positive, got {slot_width}"
        )));
    }
    if budget < 1.0 {
        let threshold = feasibility_threshold(intensity, slot_width);
        if budget < threshold {
            return Err(Error::InfeasibleBudget {
                budget,
                threshold,
                lambda_delta: intensity * slot_width,
            });
        }
    }
    Ok(())
}

/// Rate-distortion function of the slotted source under the per-slot
/// covering distortion, in bits per slot:
/// `Hb(D) - exp(-lambda delta) * Hb(D e^{lambda delta} - e^{lambda delta} + 1)`
/// for feasible `D` in (0, 1), zero from `D = 1` on.
pub fn rd_slotted(budget: f64, intensity: f64, slot_width: f64) -> Result<f64> {
    check_slotted_args(budget, intensity, slot_width)?;
    if budget >= 1.0 {
        return Ok(0.0);
    }
    let x = intensity * slot_width;
    // D e^x - e^x + 1 computed as D - (1-D) expm1(x) to avoid cancellation.
    let q = (budget - (1.0 - budget) * x.exp_m1()).max(0.0);
    let rate = binary_entropy(budget)? - (-x).exp() * binary_entropy(q)?;
    Ok(rate.max(0.0))
}

/// The conditional law of the reconstruction slot given the source slot that
/// attains `rd_slotted`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestChannel {
    /// Probability of reconstructing 1 over an empty slot.
    pub p_one_given_zero: f64,
    /// Probability of reconstructing 1 over an occupied slot (always 1:
    /// misses carry infinite cost).
    pub p_one_given_one: f64,
}

impl TestChannel {
    /// Expected per-slot distortion induced against a source of the given
    /// one-probability; equals the budget by construction.
    pub fn expected_distortion(&self, source_p_one: f64) -> f64 {
        source_p_one * self.p_one_given_one + (1.0 - source_p_one) * self.p_one_given_zero
    }
}

/// Optimal test channel for `rd_slotted` at a feasible budget in (0, 1).
pub fn optimal_test_channel(budget: f64, intensity: f64, slot_width: f64) -> Result<TestChannel> {
    check_slotted_args(budget, intensity, slot_width)?;
    if budget >= 1.0 {
        return Err(Error::Domain(format!(
            "test channel is defined for budgets in (0, 1), got {budget}"
        )));
    }
    let x = intensity * slot_width;
    let q = (budget - (1.0 - budget) * x.exp_m1()).max(0.0);
    Ok(TestChannel {
        p_one_given_zero: q,
        p_one_given_one: 1.0,
    })
}

/// Side-information rate-distortion function in bits per second: knowing a
/// fraction `p_known` of the points at the reconstructor reduces the Poisson
/// problem to intensity `(1 - p_known) lambda`.
pub fn rd_wyner_ziv(budget: f64, intensity: f64, p_known: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_known) {
        return Err(Error::Domain(format!(
            "side-information probability must be in [0, 1], got {p_known}"
        )));
    }
    rd_poisson(budget, (1.0 - p_known) * intensity)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_fixed_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // Hb(0.11) sits just under one half.
        let h = binary_entropy(0.11).unwrap();
        assert!((h - 0.4999).abs() < 1e-3, "Hb(0.11) = {h}");
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn poisson_rate_fixed_values() {
        assert_eq!(rd_poisson(0.5, 1.0).unwrap(), 1.0);
        assert_eq!(rd_poisson(0.25, 2.0).unwrap(), 4.0);
        assert_eq!(rd_poisson(1.5, 7.0).unwrap(), 0.0);
        assert!(rd_poisson(0.0, 1.0).is_err());
        assert!(rd_poisson(-0.5, 1.0).is_err());
    }

    #[test]
    fn poisson_rate_shape() {
        // Strictly decreasing in the budget on (0, 1).
        let mut prev = f64::INFINITY;
        for k in 1..20 {
            let d = k as f64 / 20.0;
            let r = rd_poisson(d, 1.0).unwrap();
            assert!(r < prev);
            prev = r;
        }
        // Linear in the intensity.
        let r1 = rd_poisson(0.3, 1.0).unwrap();
        let r5 = rd_poisson(0.3, 5.0).unwrap();
        assert!((r5 - 5.0 * r1).abs() < 1e-12);
        // Continuous at D = 1 from below.
        assert!(rd_poisson(1.0 - 1e-12, 3.0).unwrap() < 1e-11);
    }

    #[test]
    fn slotted_rate_zero_branch_and_infeasible_branch() {
        assert_eq!(rd_slotted(2.0, 1.0, 0.1).unwrap(), 0.0);
        assert_eq!(rd_slotted(1.0, 1.0, 0.1).unwrap(), 0.0);
        let err = rd_slotted(0.05, 1.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::InfeasibleBudget { .. }));
        assert!(rd_slotted(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn slotted_rate_at_the_feasibility_boundary_is_the_source_entropy() {
        let threshold = feasibility_threshold(1.0, 0.1);
        let r = rd_slotted(threshold, 1.0, 0.1).unwrap();
        assert!((r - binary_entropy(threshold).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn per_second_rate_approaches_the_poisson_rate() {
        // Ratio envelopes over shrinking slot widths, for each budget on the
        // interior grid: 5% at 1e-2, 0.5% at 1e-3, 0.05% at 1e-4.
        let envelopes = [(1e-2, 0.05), (1e-3, 0.005), (1e-4, 0.0005)];
        for k in 1..10 {
            let d = k as f64 / 10.0;
            let poisson = rd_poisson(d, 1.0).unwrap();
            for (delta, tol) in envelopes {
                let per_second = rd_slotted(d, 1.0, delta).unwrap() / delta;
                let rel = (per_second / poisson - 1.0).abs();
                assert!(
                    rel < tol,
                    "D={d} delta={delta}: ratio error {rel} over {tol}"
                );
            }
        }
    }

    #[test]
    fn test_channel_matches_the_slotted_rate() {
        let (d, lambda, delta) = (0.5, 1.0, 0.1);
        let ch = optimal_test_channel(d, lambda, delta).unwrap();
        assert_eq!(ch.p_one_given_one, 1.0);
        // Frozen from the closed form; the oracle test below cross-checks.
        assert!((ch.p_one_given_zero - 0.44741743).abs() < 1e-7);
        // Induced mutual information equals the rate function.
        let p1 = feasibility_threshold(lambda, delta);
        let out = p1 + (1.0 - p1) * ch.p_one_given_zero;
        let information = binary_entropy(out).unwrap()
            - (1.0 - p1) * binary_entropy(ch.p_one_given_zero).unwrap();
        let rate = rd_slotted(d, lambda, delta).unwrap();
        assert!((information - rate).abs() < 1e-12);
    }

    #[test]
    fn test_channel_induces_exactly_the_budget() {
        for (d, lambda, delta) in [(0.5, 1.0, 0.1), (0.2, 3.0, 0.01), (0.9, 0.5, 0.4)] {
            let ch = optimal_test_channel(d, lambda, delta).unwrap();
            let p1 = feasibility_threshold(lambda, delta);
            assert!(
                (ch.expected_distortion(p1) - d).abs() < 1e-12,
                "budget {d} induced {}",
                ch.expected_distortion(p1)
            );
        }
    }

    #[test]
    fn test_channel_tends_to_the_budget_for_small_slots() {
        let ch = optimal_test_channel(0.37, 1.0, 1e-6).unwrap();
        assert!((ch.p_one_given_zero - 0.37).abs() < 1e-5);
    }

    #[test]
    fn wyner_ziv_rate_fixed_values() {
        assert_eq!(rd_wyner_ziv(0.5, 2.0, 0.5).unwrap(), 1.0);
        assert_eq!(rd_wyner_ziv(0.5, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(rd_wyner_ziv(0.5, 2.0, 0.0).unwrap(), 2.0);
        assert!(rd_wyner_ziv(0.5, 2.0, 1.5).is_err());
    }
}
