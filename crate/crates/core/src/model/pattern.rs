//! Point patterns: finitely many event times on a horizon `(0, T]`.

use crate::error::{Error, Result};
use crate::exact::{exact_from_f64, format_exact, Exact};

/// A finite point pattern: strictly increasing times, each in `(0, T]`.
///
/// Times are `f64` (they are samples); the horizon is exact so that range
/// checks against decimal-configured horizons never round.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    horizon: Exact,
    times: Vec<f64>,
}

impl PointPattern {
    /// Validates and sorts the given times. Duplicate times are rejected;
    /// generators break ties before constructing.
    pub fn new(horizon: Exact, mut times: Vec<f64>) -> Result<Self> {
        if horizon <= Exact::from_integer(0.into()) {
            return Err(Error::Domain(format!(
                "horizon must be positive, got {}",
                format_exact(&horizon)
            )));
        }
        times.sort_by(|a, b| a.partial_cmp(b).expect("times must not be NaN"));
        for pair in times.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::Domain(format!(
                    "duplicate time {} in point pattern",
                    pair[0]
                )));
            }
        }
        if let (Some(first), Some(last)) = (times.first(), times.last()) {
            if *first <= 0.0 {
                return Err(Error::Domain(format!("time {first} is not positive")));
            }
            if exact_from_f64(*last)? > horizon {
                return Err(Error::Domain(format!(
                    "time {last} exceeds the horizon {}",
                    format_exact(&horizon)
                )));
            }
        }
        Ok(Self { horizon, times })
    }

    pub fn empty(horizon: Exact) -> Self {
        Self {
            horizon,
            times: Vec::new(),
        }
    }

    pub fn horizon(&self) -> &Exact {
        &self.horizon
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of points with time `<= t`, for `t` in `[0, T]`.
    pub fn counting(&self, t: f64) -> Result<usize> {
        if t < 0.0 || exact_from_f64(t)? > self.horizon {
            return Err(Error::Domain(format!(
                "counting argument {t} outside [0, {}]",
                format_exact(&self.horizon)
            )));
        }
        Ok(self.times.partition_point(|x| *x <= t))
    }
}
