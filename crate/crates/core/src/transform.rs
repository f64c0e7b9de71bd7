//! Converting an arbitrary interval-set code into a slotted code.
//!
//! Each codeword (a finite interval union, optionally replaced by a
//! validated approximation) is snapped outward to the slots it touches; one
//! all-one codeword is appended, and patterns hitting the exception set —
//! the union of what the approximations dropped — are routed to it. Snapping
//! inflates each codeword's measure by at most two slot widths per interval,
//! and the exception set's measure is at most the configured epsilon; both
//! bounds are exact rational statements, checked as such.

use num::Zero;

use crate::error::{Error, Result};
use crate::exact::{format_exact, Exact};
use crate::model::{slot_count, BinaryMask, IntervalSet, PointPattern};

/// An interval-set code: codewords sharing one horizon.
#[derive(Debug, Clone)]
pub struct ContinuousCode {
    horizon: Exact,
    codewords: Vec<IntervalSet>,
}

impl ContinuousCode {
    pub fn new(horizon: Exact, codewords: Vec<IntervalSet>) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::Config("a code needs at least one codeword".into()));
        }
        for c in &codewords {
            if c.horizon() != &horizon {
                return Err(Error::HorizonMismatch {
                    left: format_exact(&horizon),
                    right: format_exact(c.horizon()),
                });
            }
        }
        Ok(Self { horizon, codewords })
    }

    pub fn horizon(&self) -> &Exact {
        &self.horizon
    }

    pub fn codewords(&self) -> &[IntervalSet] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Largest interval count over the codewords.
    pub fn max_interval_count(&self) -> usize {
        self.codewords
            .iter()
            .map(|c| c.interval_count())
            .max()
            .unwrap_or(0)
    }
}

/// The slotted code produced by [`transform_code`]: one grid codeword per
/// original codeword plus an implicit all-one codeword at index `len + 1`.
#[derive(Debug, Clone)]
pub struct TransformedCode {
    slot_width: Exact,
    grid_codewords: Vec<BinaryMask>,
    exception_set: IntervalSet,
}

impl TransformedCode {
    pub fn slot_width(&self) -> &Exact {
        &self.slot_width
    }

    pub fn grid_codewords(&self) -> &[BinaryMask] {
        &self.grid_codewords
    }

    /// Union of the approximation residuals; patterns touching it are routed
    /// to the all-one codeword.
    pub fn exception_set(&self) -> &IntervalSet {
        &self.exception_set
    }

    /// Total codewords including the all-one at the last index.
    pub fn codeword_count(&self) -> usize {
        self.grid_codewords.len() + 1
    }

    /// Codeword by 1-based index; the last index is the all-one word.
    pub fn codeword(&self, m: usize) -> Result<BinaryMask> {
        if m == 0 || m > self.codeword_count() {
            return Err(Error::IndexOutOfRange {
                index: m as u64,
                count: self.codeword_count() as u64,
            });
        }
        if m == self.codeword_count() {
            let template = &self.grid_codewords[0];
            return Ok(BinaryMask::ones(self.slot_width.clone(), template.len()));
        }
        Ok(self.grid_codewords[m - 1].clone())
    }
}

/// Snaps an interval set outward to the slots it intersects. The result
/// always contains the input, and its measure exceeds the input's by at most
/// two slot widths per interval.
pub fn snap_to_grid(set: &IntervalSet, slot_width: &Exact) -> Result<BinaryMask> {
    let n = slot_count(set.horizon(), slot_width)?;
    let mut mask = BinaryMask::zeros(slot_width.clone(), n);
    for (a, b) in set.intervals() {
        // First slot whose right edge lies beyond a, last slot whose left
        // edge lies before b.
        let first: num::BigInt = (a / slot_width).floor().to_integer() + 1;
        let last: num::BigInt = (b / slot_width).ceil().to_integer();
        let first = usize::try_from(&first)
            .map_err(|_| Error::Domain(format!("slot index {first} out of range")))?;
        let last = usize::try_from(&last)
            .map_err(|_| Error::Domain(format!("slot index {last} out of range")))?;
        debug_assert!(first >= 1 && last <= n && first <= last);
        for slot in first..=last {
            mask.set(slot - 1);
        }
    }
    Ok(mask)
}

/// Builds the slotted code. When `approximations` is given it must have one
/// entry per codeword, each within the per-codeword symmetric-difference
/// budget `epsilon / len` of its codeword; otherwise codewords stand in for
/// themselves and the exception set is empty.
pub fn transform_code(
    code: &ContinuousCode,
    approximations: Option<&[IntervalSet]>,
    slot_width: &Exact,
    epsilon: &Exact,
) -> Result<TransformedCode> {
    if epsilon < &Exact::zero() {
        return Err(Error::Domain(format!(
            "epsilon must be nonnegative, got {}",
            format_exact(epsilon)
        )));
    }
    let per_codeword_budget = epsilon / Exact::from_integer(code.len().into());
    let approx: Vec<&IntervalSet> = match approximations {
        Some(list) => {
            if list.len() != code.len() {
                return Err(Error::Config(format!(
                    "{} approximations for {} codewords",
                    list.len(),
                    code.len()
                )));
            }
            for (i, (codeword, a)) in code.codewords().iter().zip(list).enumerate() {
                let gap = codeword.symmetric_difference(a)?.measure();
                if gap > per_codeword_budget {
                    return Err(Error::BadApproximation {
                        index: i + 1,
                        measure: format_exact(&gap),
                        bound: format_exact(&per_codeword_budget),
                    });
                }
            }
            list.iter().collect()
        }
        None => code.codewords().iter().collect(),
    };
    let mut grid_codewords = Vec::with_capacity(code.len());
    for a in &approx {
        grid_codewords.push(snap_to_grid(a, slot_width)?);
    }
    let mut exception_set = IntervalSet::empty(code.horizon().clone());
    for (codeword, a) in code.codewords().iter().zip(&approx) {
        exception_set = exception_set.union(&codeword.difference(a)?)?;
    }
    debug_assert!(exception_set.measure() <= *epsilon);
    Ok(TransformedCode {
        slot_width: slot_width.clone(),
        grid_codewords,
        exception_set,
    })
}

/// Encoder of the transformed code: keeps the original assignment for
/// patterns that avoid the exception set and routes the rest to the all-one
/// codeword at the last index.
pub fn transformed_encode(
    transformed: &TransformedCode,
    original_index: usize,
    pattern: &PointPattern,
) -> Result<usize> {
    let count = transformed.codeword_count();
    if original_index == 0 || original_index >= count {
        return Err(Error::IndexOutOfRange {
            index: original_index as u64,
            count: (count - 1) as u64,
        });
    }
    for &t in pattern.times() {
        if transformed.exception_set().contains_f64(t)? {
            return Ok(count);
        }
    }
    Ok(original_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_decimal;
    use crate::model::mask_to_interval_set;

    fn dec(s: &str) -> Exact {
        parse_decimal(s).unwrap()
    }

    fn iset(horizon: &str, pairs: &[(&str, &str)]) -> IntervalSet {
        IntervalSet::new(
            dec(horizon),
            pairs.iter().map(|(a, b)| (dec(a), dec(b))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn snap_example_with_inflation_bound() {
        let a = iset("1", &[("0.1", "0.3"), ("0.55", "0.6")]);
        let mask = snap_to_grid(&a, &dec("0.25")).unwrap();
        let bits: Vec<bool> = mask.bits().collect();
        assert_eq!(bits, vec![true, true, true, false]);
        let grid = mask_to_interval_set(&mask);
        assert_eq!(grid.measure(), dec("0.75"));
        // Inflation 0.5 within two slot widths per interval.
        let inflation = grid.measure() - a.measure();
        assert_eq!(inflation, dec("0.5"));
        assert!(inflation <= dec("2") * dec("2") * dec("0.25"));
        assert!(a.is_subset_of(&grid).unwrap());
    }

    #[test]
    fn snapping_a_slot_union_is_a_fixed_point() {
        let a = iset("1", &[("0.25", "0.75")]);
        let mask = snap_to_grid(&a, &dec("0.25")).unwrap();
        let grid = mask_to_interval_set(&mask);
        assert_eq!(grid.measure(), a.measure());
        assert_eq!(grid.intervals(), a.intervals());
    }

    #[test]
    fn snapping_the_empty_set_gives_all_zero() {
        let empty = IntervalSet::empty(dec("1"));
        let mask = snap_to_grid(&empty, &dec("0.25")).unwrap();
        assert_eq!(mask.popcount(), 0);
    }

    #[test]
    fn identity_transform_has_empty_exception_set() {
        let code = ContinuousCode::new(
            dec("1"),
            vec![
                iset("1", &[("0", "0.5")]),
                iset("1", &[("0.25", "0.375"), ("0.5", "1")]),
            ],
        )
        .unwrap();
        let tc = transform_code(&code, None, &dec("0.125"), &dec("0.01")).unwrap();
        assert!(tc.exception_set().is_empty());
        assert_eq!(tc.codeword_count(), 3);
        // Last codeword is all-one.
        let last = tc.codeword(3).unwrap();
        assert_eq!(last.popcount(), last.len());
        assert!(tc.codeword(0).is_err());
        assert!(tc.codeword(4).is_err());
    }

    #[test]
    fn shrink_approximations_produce_sliver_exception_sets() {
        // One codeword of two intervals, shrunk by delta on each side:
        // the exception set is four slivers of total measure 4 * delta.
        let horizon = dec("1");
        let codeword = iset("1", &[("0.125", "0.375"), ("0.5", "0.875")]);
        let code = ContinuousCode::new(horizon, vec![codeword]).unwrap();
        let shrink = dec("0.015625"); // 1/64
        let approx = vec![iset(
            "1",
            &[
                ("0.140625", "0.359375"),
                ("0.515625", "0.859375"),
            ],
        )];
        let epsilon = dec("0.0625"); // budget 4*delta exactly
        let tc = transform_code(&code, Some(&approx), &dec("0.125"), &epsilon).unwrap();
        let want = dec("4") * shrink;
        assert_eq!(tc.exception_set().measure(), want);
        assert!(tc.exception_set().measure() <= epsilon);

        // Tighter epsilon: validation refuses the approximation.
        let tight = dec("0.03");
        let err = transform_code(&code, Some(&approx), &dec("0.125"), &tight).unwrap_err();
        assert!(matches!(err, Error::BadApproximation { .. }));
    }

    #[test]
    fn encoder_routes_exception_hits_to_the_all_one_codeword() {
        let code = ContinuousCode::new(dec("1"), vec![iset("1", &[("0.25", "0.75")])]).unwrap();
        let approx = vec![iset("1", &[("0.3125", "0.75")])];
        let tc = transform_code(&code, Some(&approx), &dec("0.25"), &dec("0.0625")).unwrap();
        // Exception set is (0.25, 0.3125].
        let inside = PointPattern::new(dec("1"), vec![0.5]).unwrap();
        assert_eq!(transformed_encode(&tc, 1, &inside).unwrap(), 1);
        let hit = PointPattern::new(dec("1"), vec![0.3]).unwrap();
        assert_eq!(transformed_encode(&tc, 1, &hit).unwrap(), 2);
        let empty = PointPattern::empty(dec("1"));
        assert_eq!(transformed_encode(&tc, 1, &empty).unwrap(), 1);
        assert!(transformed_encode(&tc, 3, &empty).is_err());
    }

    #[test]
    fn domination_and_inflation_hold_for_every_codeword() {
        let code = ContinuousCode::new(
            dec("2"),
            vec![
                iset("2", &[("0.0625", "0.5"), ("1.25", "1.3125")]),
                iset("2", &[("0", "2")]),
                iset("2", &[("0.875", "1.125")]),
            ],
        )
        .unwrap();
        let delta = dec("0.125");
        let tc = transform_code(&code, None, &delta, &dec("0")).unwrap();
        for (codeword, grid) in code.codewords().iter().zip(tc.grid_codewords()) {
            let snapped = mask_to_interval_set(grid);
            assert!(codeword.is_subset_of(&snapped).unwrap());
            let bound = dec("2") * Exact::from_integer(codeword.interval_count().into()) * &delta;
            assert!(snapped.measure() - codeword.measure() <= bound);
        }
    }
}
