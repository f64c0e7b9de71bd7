//! Independent numerical oracle for the slotted rate-distortion function.
//!
//! Alternating minimization over the 2x2 test channel with the uncovered
//! transition (source 1, reconstruction 0) structurally forbidden: its
//! exponential weight is pinned to zero rather than approximated by a large
//! finite penalty. An outer bisection on the Lagrange slope drives the
//! expected distortion to the budget. This shares no code with the closed
//! form in the parent module.

use crate::analytic::binary_entropy;
use crate::error::{Error, Result};

/// Fixed point of the alternating minimization at slope `s` (natural-log
/// units, `s < 0`): returns (rate in bits, expected distortion).
fn fixed_point(source_p_one: f64, slope: f64) -> (f64, f64) {
    let es = slope.exp();
    let p1 = source_p_one;
    // Output marginal q = P[reconstruction = 1].
    let mut q = 0.5f64;
    for _ in 0..100_000 {
        // Channel update: reconstruction weights for source 0 are
        // (1-q) * e^{s*0} and q * e^{s*1}; for source 1 the weight of
        // reconstruction 0 is zero (forbidden transition), so the channel
        // row is deterministic.
        let beta = q * es / ((1.0 - q) + q * es);
        let next = p1 + (1.0 - p1) * beta;
        if (next - q).abs() < 1e-15 {
            q = next;
            break;
        }
        q = next;
    }
    let beta = q * es / ((1.0 - q) + q * es);
    let rate = binary_entropy(q).unwrap_or(0.0)
        - (1.0 - p1) * binary_entropy(beta.clamp(0.0, 1.0)).unwrap_or(0.0);
    (rate.max(0.0), q)
}

/// Minimum mutual information over test channels meeting the distortion
/// budget, for a binary source with one-probability `source_p_one` under the
/// covering distortion table. Converges to well below 1e-9 bits.
pub fn rd_oracle_blahut(source_p_one: f64, budget: f64) -> Result<f64> {
    if !(source_p_one > 0.0 && source_p_one < 1.0) {
        return Err(Error::Domain(format!(
            "source one-probability must be in (0, 1), got {source_p_one}"
        )));
    }
    if !(budget > 0.0) {
        return Err(Error::Domain(format!(
            "distortion budget must be positive, got {budget}"
        )));
    }
    if budget >= 1.0 {
        // Reconstructing everything is free and feasible.
        return Ok(0.0);
    }
    if budget < source_p_one {
        return Err(Error::InfeasibleBudget {
            budget,
            threshold: source_p_one,
            lambda_delta: f64::NAN,
        });
    }
    // Expected distortion is increasing in the slope; bisect to the budget.
    let mut lo = -120.0f64;
    let mut hi = -1e-9f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (_, dist) = fixed_point(source_p_one, mid);
        if dist > budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (rate, _) = fixed_point(source_p_one, 0.5 * (lo + hi));
    Ok(rate)
}
