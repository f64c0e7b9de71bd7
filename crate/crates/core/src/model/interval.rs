//! Finite unions of half-open intervals `(a, b]` on a horizon `(0, T]`.
//!
//! Endpoints are exact rationals, so measures, set algebra and subset tests
//! are exact: only intervals that touch exactly merge, and
//! `measure(A difference B) + measure(B difference A)` equals the measure of
//! the symmetric difference with no tolerance anywhere.

use num::Zero;

use crate::error::{Error, Result};
use crate::exact::{exact_from_f64, exact_to_f64, format_exact, Exact};

/// Sorted, pairwise-disjoint, non-touching half-open intervals `(a, b]`
/// within `(0, horizon]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    horizon: Exact,
    intervals: Vec<(Exact, Exact)>,
}

impl IntervalSet {
    /// Empty set on the given horizon.
    pub fn empty(horizon: Exact) -> Self {
        Self {
            horizon,
            intervals: Vec::new(),
        }
    }

    /// The whole horizon `(0, T]`.
    pub fn full(horizon: Exact) -> Self {
        let intervals = vec![(Exact::zero(), horizon.clone())];
        Self { horizon, intervals }
    }

    /// Builds a set from arbitrary `(a, b]` pairs, normalizing by sorting and
    /// merging overlapping or exactly touching intervals.
    pub fn new(horizon: Exact, mut pairs: Vec<(Exact, Exact)>) -> Result<Self> {
        if horizon <= Exact::zero() {
            return Err(Error::Domain(format!(
                "horizon must be positive, got {}",
                format_exact(&horizon)
            )));
        }
        for (a, b) in &pairs {
            if a < &Exact::zero() || b > &horizon || a >= b {
                return Err(Error::Domain(format!(
                    "interval ({}, {}] is not inside (0, {}]",
                    format_exact(a),
                    format_exact(b),
                    format_exact(&horizon)
                )));
            }
        }
        pairs.sort();
        let mut intervals: Vec<(Exact, Exact)> = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            match intervals.last_mut() {
                Some((_, prev_b)) if a <= *prev_b => {
                    if b > *prev_b {
                        *prev_b = b;
                    }
                }
                _ => intervals.push((a, b)),
            }
        }
        Ok(Self { horizon, intervals })
    }

    /// Convenience constructor from `f64` endpoints (converted exactly).
    pub fn from_f64_pairs(horizon: f64, pairs: &[(f64, f64)]) -> Result<Self> {
        let horizon = exact_from_f64(horizon)?;
        let pairs = pairs
            .iter()
            .map(|(a, b)| Ok((exact_from_f64(*a)?, exact_from_f64(*b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(horizon, pairs)
    }

    pub fn horizon(&self) -> &Exact {
        &self.horizon
    }

    pub fn intervals(&self) -> &[(Exact, Exact)] {
        &self.intervals
    }

    pub fn interval_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Exact {
        self.intervals
            .iter()
            .fold(Exact::zero(), |acc, (a, b)| acc + (b - a))
    }

    pub fn measure_f64(&self) -> f64 {
        exact_to_f64(&self.measure())
    }

    /// Whether `t` lies in the set (right endpoints included).
    pub fn contains(&self, t: &Exact) -> bool {
        let idx = self.intervals.partition_point(|(_, b)| b < t);
        match self.intervals.get(idx) {
            Some((a, b)) => a < t && t <= b,
            None => false,
        }
    }

    pub fn contains_f64(&self, t: f64) -> Result<bool> {
        Ok(self.contains(&exact_from_f64(t)?))
    }

    fn check_horizon(&self, other: &Self) -> Result<()> {
        if self.horizon != other.horizon {
            return Err(Error::HorizonMismatch {
                left: format_exact(&self.horizon),
                right: format_exact(&other.horizon),
            });
        }
        Ok(())
    }

    /// Boundary sweep shared by the set operations: both interval lists are
    /// cut at every endpoint of either set, and `keep` decides per piece from
    /// the membership pair.
    fn combine(&self, other: &Self, keep: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.check_horizon(other)?;
        let mut cuts: Vec<&Exact> = Vec::with_capacity(2 * (self.intervals.len() + other.intervals.len()));
        for (a, b) in self.intervals.iter().chain(other.intervals.iter()) {
            cuts.push(a);
            cuts.push(b);
        }
        cuts.sort();
        cuts.dedup();
        let mut pieces: Vec<(Exact, Exact)> = Vec::new();
        for window in cuts.windows(2) {
            let (lo, hi) = (window[0], window[1]);
            // Membership is constant on (lo, hi]; the right endpoint is in it.
            if keep(self.contains(hi), other.contains(hi)) {
                match pieces.last_mut() {
                    Some((_, prev_hi)) if prev_hi == lo => *prev_hi = hi.clone(),
                    _ => pieces.push((lo.clone(), hi.clone())),
                }
            }
        }
        Ok(Self {
            horizon: self.horizon.clone(),
            intervals: pieces,
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a != b)
    }

    /// Exact subset test.
    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }
}
