//! Shared vocabulary: point patterns, interval sets, slotted masks and the
//! covering distortion on both sides of the discretization.

mod distortion;
mod interval;
mod mask;
mod pattern;

pub use distortion::{continuous_distortion, discrete_distortion, DistortionValue};
pub use interval::IntervalSet;
pub use mask::{
    discretize, mask_to_interval_set, slot_count, slot_of, BinaryMask, MAX_SLOTS,
};
pub use pattern::PointPattern;
