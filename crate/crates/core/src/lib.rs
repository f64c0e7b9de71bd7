//! Simulation toolkit for covering point patterns with bits.
//!
//! An encoder observes a finite point pattern on a horizon `(0, T]` and
//! describes it to a reconstructor, which must output a subset of the
//! horizon containing every point while keeping its measure small. This
//! crate provides the pieces needed to study that trade-off numerically:
//!
//! * [`model`] — point patterns, interval sets with exact rational
//!   endpoints, slotted binary masks and the covering distortion on both
//!   sides of the discretization;
//! * [`sources`] — Poisson, renewal, grid, cluster and fixed-count pattern
//!   generators plus side-information splitting;
//! * [`analytic`] — closed-form rate-distortion functions, the optimal test
//!   channel and an independent alternating-minimization oracle;
//! * [`covering`] — virtual Bernoulli covering codebooks with an all-one
//!   fallback, the first-cover encoder and Monte Carlo trial runner;
//! * [`wyner_ziv`] — the binned two-index variant whose decoder
//!   disambiguates with side information;
//! * [`transform`] — the grid transform that turns an arbitrary
//!   interval-set code into a slotted code with controlled inflation.
//!
//! Everything is deterministic given a [`rng::SeedSpec`]: codebooks are
//! regenerated from counter-mode streams rather than stored, and trials can
//! run on any number of threads without changing a single output bit.

pub mod analytic;
pub mod covering;
pub mod error;
pub mod exact;
pub mod model;
pub mod rng;
pub mod sources;
pub mod transform;
pub mod wyner_ziv;

pub use error::{Error, Result};
pub use exact::Exact;
pub use model::{
    continuous_distortion, discrete_distortion, discretize, mask_to_interval_set, BinaryMask,
    DistortionValue, IntervalSet, PointPattern,
};
pub use rng::SeedSpec;
