//! Slotted binary masks and the discretization between patterns, masks and
//! interval sets.
//!
//! Slot `i` (1-based) is the half-open interval `((i-1)*delta, i*delta]`.
//! When the horizon is not a multiple of the slot width it is padded up to
//! `n * delta` with `n = ceil(T / delta)`; interval sets derived from masks
//! live on the padded horizon so that measures are exactly
//! `delta * popcount`.

use num::Zero;

use crate::error::{Error, Result};
use crate::exact::{ceil_to_u64, exact_from_f64, format_exact, Exact};
use crate::model::interval::IntervalSet;
use crate::model::pattern::PointPattern;

/// Hard cap on slot counts; guards against nonsensical slot widths.
pub const MAX_SLOTS: u64 = 1 << 28;

/// A fixed-length bit sequence over slots of a common width, packed into
/// 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    slot_width: Exact,
    len: usize,
    words: Vec<u64>,
}

impl BinaryMask {
    pub fn zeros(slot_width: Exact, len: usize) -> Self {
        Self {
            slot_width,
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(slot_width: Exact, len: usize) -> Self {
        let mut mask = Self::zeros(slot_width, len);
        for word in &mut mask.words {
            *word = u64::MAX;
        }
        mask.clear_tail();
        mask
    }

    pub fn from_bits(slot_width: Exact, bits: &[bool]) -> Self {
        let mut mask = Self::zeros(slot_width, bits.len());
        for (j, bit) in bits.iter().enumerate() {
            if *bit {
                mask.set(j);
            }
        }
        mask
    }

    /// Builds a mask directly from packed words; extra tail bits are cleared.
    pub fn from_words(slot_width: Exact, len: usize, words: Vec<u64>) -> Self {
        assert_eq!(words.len(), len.div_ceil(64));
        let mut mask = Self {
            slot_width,
            len,
            words,
        };
        mask.clear_tail();
        mask
    }

    fn clear_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn slot_width(&self) -> &Exact {
        &self.slot_width
    }

    /// Padded horizon `n * delta` covered by the mask.
    pub fn padded_horizon(&self) -> Exact {
        &self.slot_width * Exact::from_integer(self.len.into())
    }

    pub fn bit(&self, j: usize) -> bool {
        assert!(j < self.len);
        self.words[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, j: usize) {
        assert!(j < self.len);
        self.words[j / 64] |= 1 << (j % 64);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits in increasing order.
    pub fn one_positions(&self) -> Vec<u32> {
        let mut ones = Vec::with_capacity(self.popcount());
        for (w, word) in self.words.iter().enumerate() {
            let mut bits = *word;
            while bits != 0 {
                ones.push((w * 64) as u32 + bits.trailing_zeros());
                bits &= bits - 1;
            }
        }
        ones
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.len == other.len && self.slot_width == other.slot_width
    }

    /// Word-wise covering test with early exit: true iff every set bit of
    /// `z` is also set in `self`.
    pub fn covers(&self, z: &Self) -> bool {
        assert!(self.same_geometry(z), "covering test requires equal geometry");
        self.words
            .iter()
            .zip(z.words.iter())
            .all(|(c, z)| z & !c == 0)
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |j| self.bit(j))
    }
}

/// Slot index (1-based) of a time: the `i` with `(i-1)*delta < t <= i*delta`,
/// computed exactly as `ceil(t / delta)`.
pub fn slot_of(t: f64, slot_width: &Exact) -> Result<u64> {
    let t = exact_from_f64(t)?;
    if t <= Exact::zero() {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    ceil_to_u64(&(t / slot_width))
}

/// Number of slots covering a horizon, with padding: `ceil(T / delta)`.
pub fn slot_count(horizon: &Exact, slot_width: &Exact) -> Result<usize> {
    if *slot_width <= Exact::zero() {
        return Err(Error::Domain(format!(
            "slot width must be positive, got {}",
            format_exact(slot_width)
        )));
    }
    let n = ceil_to_u64(&(horizon / slot_width))?;
    if n == 0 || n > MAX_SLOTS {
        return Err(Error::Config(format!(
            "horizon {} over slot width {} needs {n} slots (limit {MAX_SLOTS})",
            format_exact(horizon),
            format_exact(slot_width)
        )));
    }
    Ok(n as usize)
}

/// Maps a pattern to its slot-occupancy mask: bit `i` is set iff the pattern
/// has at least one point in `((i-1)*delta, i*delta]`.
pub fn discretize(pattern: &PointPattern, slot_width: &Exact) -> Result<BinaryMask> {
    let n = slot_count(pattern.horizon(), slot_width)?;
    let mut mask = BinaryMask::zeros(slot_width.clone(), n);
    for &t in pattern.times() {
        let slot = slot_of(t, slot_width)? as usize;
        debug_assert!(slot >= 1 && slot <= n);
        mask.set(slot - 1);
    }
    Ok(mask)
}

/// Expands a mask back to the union of its set slots, with maximal runs
/// merged. The resulting set lives on the padded horizon `n * delta` and has
/// measure exactly `delta * popcount`.
pub fn mask_to_interval_set(mask: &BinaryMask) -> IntervalSet {
    let delta = mask.slot_width();
    let horizon = mask.padded_horizon();
    let mut pairs: Vec<(Exact, Exact)> = Vec::new();
    let mut run_start: Option<usize> = None;
    for j in 0..=mask.len() {
        let bit = j < mask.len() && mask.bit(j);
        match (run_start, bit) {
            (None, true) => run_start = Some(j),
            (Some(start), false) => {
                let lo = delta * Exact::from_integer(start.into());
                let hi = delta * Exact::from_integer(j.into());
                pairs.push((lo, hi));
                run_start = None;
            }
            _ => {}
        }
    }
    IntervalSet::new(horizon, pairs).expect("slot runs are valid intervals")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_decimal;

    fn quarter() -> Exact {
        parse_decimal("0.25").unwrap()
    }

    fn pattern(times: &[f64]) -> PointPattern {
        PointPattern::new(parse_decimal("1").unwrap(), times.to_vec()).unwrap()
    }

    #[test]
    fn discretize_marks_occupied_slots() {
        let mask = discretize(&pattern(&[0.1, 0.3, 0.31, 0.9]), &quarter()).unwrap();
        let bits: Vec<bool> = mask.bits().collect();
        assert_eq!(bits, vec![true, true, false, true]);
        assert!(mask.popcount() <= 4);
    }

    #[test]
    fn discretize_empty_pattern_is_all_zero() {
        let mask = discretize(
            &PointPattern::empty(parse_decimal("1").unwrap()),
            &quarter(),
        )
        .unwrap();
        assert_eq!(mask.popcount(), 0);
        assert_eq!(mask.len(), 4);
    }

    #[test]
    fn slot_right_endpoint_belongs_to_the_slot() {
        let mask = discretize(&pattern(&[0.25]), &quarter()).unwrap();
        let bits: Vec<bool> = mask.bits().collect();
        assert_eq!(bits, vec![true, false, false, false]);
    }

    #[test]
    fn mask_expansion_merges_runs() {
        let mask = BinaryMask::from_bits(quarter(), &[true, true, false, true]);
        let set = mask_to_interval_set(&mask);
        assert_eq!(
            set,
            IntervalSet::from_f64_pairs(1.0, &[(0.0, 0.5), (0.75, 1.0)]).unwrap()
        );
        assert_eq!(set.measure(), parse_decimal("0.75").unwrap());
    }

    #[test]
    fn all_zero_and_all_one_masks_expand_to_extremes() {
        let zero = BinaryMask::zeros(quarter(), 4);
        assert!(mask_to_interval_set(&zero).is_empty());
        let one = BinaryMask::ones(quarter(), 4);
        let set = mask_to_interval_set(&one);
        assert_eq!(set.interval_count(), 1);
        assert_eq!(set.measure(), parse_decimal("1").unwrap());
    }

    #[test]
    fn measure_is_exactly_width_times_popcount() {
        // A slot width that f64 cannot represent: from a decimal string.
        let delta = parse_decimal("0.01").unwrap();
        let mask = BinaryMask::from_bits(
            delta.clone(),
            &(0..17).map(|j| j % 3 == 0).collect::<Vec<_>>(),
        );
        let set = mask_to_interval_set(&mask);
        let want = delta * Exact::from_integer(mask.popcount().into());
        assert_eq!(set.measure(), want);
    }

    #[test]
    fn padding_rounds_the_horizon_up() {
        // T = 1, delta = 0.3 (exact 3/10): three slots, padded horizon 0.9 -> 1.2.
        let delta = parse_decimal("0.3").unwrap();
        let p = pattern(&[0.95]);
        let mask = discretize(&p, &delta).unwrap();
        assert_eq!(mask.len(), 4);
        assert_eq!(mask.padded_horizon(), parse_decimal("1.2").unwrap());
        let bits: Vec<bool> = mask.bits().collect();
        assert_eq!(bits, vec![false, false, false, true]);
    }

    #[test]
    fn covering_test_is_bitwise_domination() {
        let z = BinaryMask::from_bits(quarter(), &[true, false, false, false]);
        let c = BinaryMask::from_bits(quarter(), &[true, false, true, false]);
        assert!(c.covers(&z));
        assert!(!z.covers(&c));
        let ones = BinaryMask::ones(quarter(), 4);
        assert!(ones.covers(&c));
    }

    #[test]
    fn one_positions_match_bits() {
        let mask = BinaryMask::from_bits(quarter(), &[false, true, false, true]);
        assert_eq!(mask.one_positions(), vec![1, 3]);
    }

    #[test]
    fn rejects_nonpositive_slot_width() {
        let p = pattern(&[0.5]);
        assert!(discretize(&p, &parse_decimal("0").unwrap()).is_err());
        assert!(discretize(&p, &parse_decimal("-0.1").unwrap()).is_err());
    }
}
