//! The covering distortion on both sides of the discretization.
//!
//! Continuous side: normalized measure of the reconstruction set, infinite
//! (a miss) if any point is uncovered. Discrete side: the per-slot table
//! d(0,0)=0, d(0,1)=d(1,1)=1, d(1,0)=miss, averaged over slots. The two
//! agree exactly for mask-derived reconstructions.

use crate::error::{Error, Result};
use crate::exact::{exact_to_f64, format_exact, Exact};
use crate::model::interval::IntervalSet;
use crate::model::mask::BinaryMask;
use crate::model::pattern::PointPattern;

/// Distortion outcome. A miss (uncovered point) is a distinct variant, not a
/// floating-point infinity, so aggregation can never average infinities by
/// accident.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistortionValue {
    Finite(Exact),
    Miss,
}

impl DistortionValue {
    pub fn is_miss(&self) -> bool {
        matches!(self, DistortionValue::Miss)
    }

    pub fn finite(&self) -> Option<&Exact> {
        match self {
            DistortionValue::Finite(v) => Some(v),
            DistortionValue::Miss => None,
        }
    }

    pub fn finite_f64(&self) -> Option<f64> {
        self.finite().map(exact_to_f64)
    }
}

/// Continuous covering distortion between a pattern and a reconstruction
/// set: `measure(s) / horizon(s)` if every point lies in `s`, else a miss.
///
/// The set may live on the pattern's horizon or on its padded extension
/// (`mask_to_interval_set` output); the set's horizon is the denominator.
pub fn continuous_distortion(pattern: &PointPattern, s: &IntervalSet) -> Result<DistortionValue> {
    if s.horizon() < pattern.horizon() {
        return Err(Error::HorizonMismatch {
            left: format_exact(pattern.horizon()),
            right: format_exact(s.horizon()),
        });
    }
    for &t in pattern.times() {
        if !s.contains_f64(t)? {
            return Ok(DistortionValue::Miss);
        }
    }
    Ok(DistortionValue::Finite(s.measure() / s.horizon()))
}

/// Discrete covering distortion between a source mask and a reconstruction
/// mask: a miss if some source slot is unreconstructed, otherwise the
/// fraction of slots switched on in the reconstruction.
pub fn discrete_distortion(z: &BinaryMask, zhat: &BinaryMask) -> Result<DistortionValue> {
    if !z.same_geometry(zhat) {
        return Err(Error::MaskMismatch(format!(
            "source has {} slots of width {}, reconstruction {} of width {}",
            z.len(),
            format_exact(z.slot_width()),
            zhat.len(),
            format_exact(zhat.slot_width())
        )));
    }
    if !zhat.covers(z) {
        return Ok(DistortionValue::Miss);
    }
    let value = Exact::from_integer(zhat.popcount().into())
        / Exact::from_integer(zhat.len().into());
    Ok(DistortionValue::Finite(value))
}
