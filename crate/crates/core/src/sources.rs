//! Point-pattern generators and side-information splitting.
//!
//! The Poisson generator draws the count first and places that many uniform
//! points, so counts are exactly Poisson on the truncated horizon. The other
//! kinds are fixed families with a configured long-run density: renewal
//! (gamma inter-arrivals), grid (deterministic spacing), cluster (bursts at
//! Poisson epochs) and max-count (exactly `floor(lambda T)` uniform points,
//! which always satisfies the adversary point budget).

use num::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::error::{Error, Result};
use crate::exact::{exact_from_f64, exact_to_f64, floor_to_u64, format_exact, parse_decimal, Exact};
use crate::model::PointPattern;

/// Pattern family.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    /// Homogeneous Poisson process of the configured intensity.
    Poisson,
    /// Renewal process with gamma inter-arrivals of mean `1/lambda`;
    /// `shape > 0` controls regularity (shape 1 is Poisson).
    Renewal { shape: f64 },
    /// Deterministic points at spacing `1/lambda`.
    Grid,
    /// Bursts of `burst` near-simultaneous points at Poisson epochs of rate
    /// `lambda / burst`.
    Cluster { burst: usize },
    /// Exactly `floor(lambda T)` uniform points.
    MaxCount,
}

impl SourceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SourceKind::Poisson => "poisson",
            SourceKind::Renewal { .. } => "renewal",
            SourceKind::Grid => "grid",
            SourceKind::Cluster { .. } => "cluster",
            SourceKind::MaxCount => "max-count",
        }
    }
}

/// A pattern source: intensity in points per second, horizon, family.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    pub intensity: f64,
    pub horizon: Exact,
    pub kind: SourceKind,
}

impl SourceConfig {
    pub fn new(intensity: f64, horizon: Exact, kind: SourceKind) -> Result<Self> {
        let config = Self {
            intensity,
            horizon,
            kind,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.intensity.is_finite() || self.intensity < 0.0 {
            return Err(Error::Config(format!(
                "intensity must be a nonnegative finite number, got {}",
                self.intensity
            )));
        }
        if self.horizon <= Exact::zero() {
            return Err(Error::Config(format!(
                "horizon must be positive, got {}",
                format_exact(&self.horizon)
            )));
        }
        match self.kind {
            SourceKind::Renewal { shape } if !(shape > 0.0 && shape.is_finite()) => Err(
                Error::Config(format!("renewal shape must be positive, got {shape}")),
            ),
            SourceKind::Cluster { burst } if burst == 0 => {
                Err(Error::Config("cluster burst size must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Largest sampling value that stays within the exact horizon.
fn horizon_f64(horizon: &Exact) -> f64 {
    let mut t = exact_to_f64(horizon);
    // to_f64 rounds to nearest; step down if it rounded up.
    while exact_from_f64(t).map(|x| x > *horizon).unwrap_or(true) {
        t = f64::from_bits(t.to_bits() - 1);
    }
    t
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

fn next_down(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

/// Breaks exact ties (probability-zero events) by nudging later points up by
/// one representable step, pulling back under the horizon if needed.
fn sort_and_separate(mut times: Vec<f64>, max_t: f64) -> Vec<f64> {
    times.sort_by(|a, b| a.partial_cmp(b).expect("times must not be NaN"));
    for i in 1..times.len() {
        if times[i] <= times[i - 1] {
            times[i] = next_up(times[i - 1]);
        }
    }
    if times.last().is_some_and(|t| *t > max_t) {
        let last = times.len() - 1;
        times[last] = max_t;
        for i in (0..last).rev() {
            if times[i] >= times[i + 1] {
                times[i] = next_down(times[i + 1]);
            }
        }
    }
    times
}

fn uniform_times(count: u64, max_t: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..count)
        .map(|_| {
            // u in [0, 1) maps to (0, max_t].
            let u: f64 = rng.random();
            max_t * (1.0 - u)
        })
        .collect()
}

fn poisson_count(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    dist.sample(rng) as u64
}

/// Samples a homogeneous Poisson pattern: the count is Poisson(lambda T),
/// and given the count the points are IID uniform.
pub fn sample_poisson(intensity: f64, horizon: &Exact, rng: &mut ChaCha8Rng) -> Result<PointPattern> {
    let config = SourceConfig::new(intensity, horizon.clone(), SourceKind::Poisson)?;
    sample(&config, rng)
}

/// Samples one pattern from the configured family.
pub fn sample(config: &SourceConfig, rng: &mut ChaCha8Rng) -> Result<PointPattern> {
    config.validate()?;
    let horizon = config.horizon.clone();
    let max_t = horizon_f64(&horizon);
    let lambda = config.intensity;
    let times = match &config.kind {
        SourceKind::Poisson => {
            let mean = lambda * exact_to_f64(&horizon);
            let count = poisson_count(mean, rng);
            sort_and_separate(uniform_times(count, max_t, rng), max_t)
        }
        SourceKind::Renewal { shape } => {
            if lambda == 0.0 {
                Vec::new()
            } else {
                let gamma = Gamma::new(*shape, 1.0 / (shape * lambda))
                    .map_err(|e| Error::Config(format!("bad renewal parameters: {e}")))?;
                let mut times = Vec::new();
                let mut t = 0.0f64;
                loop {
                    t += gamma.sample(rng);
                    if !(t <= max_t) {
                        break;
                    }
                    times.push(t);
                }
                sort_and_separate(times, max_t)
            }
        }
        SourceKind::Grid => {
            let count = floor_to_u64(&(exact_from_f64(lambda)? * &horizon))?;
            let times = (1..=count)
                .map(|j| (j as f64 / lambda).min(max_t))
                .collect();
            sort_and_separate(times, max_t)
        }
        SourceKind::Cluster { burst } => {
            let k = *burst as f64;
            let mean = lambda * exact_to_f64(&horizon) / k;
            let epochs = uniform_times(poisson_count(mean, rng), max_t, rng);
            let times: Vec<f64> = epochs
                .into_iter()
                .flat_map(|t| std::iter::repeat(t).take(*burst))
                .collect();
            sort_and_separate(times, max_t)
        }
        SourceKind::MaxCount => {
            let count = floor_to_u64(&(exact_from_f64(lambda)? * &horizon))?;
            sort_and_separate(uniform_times(count, max_t, rng), max_t)
        }
    };
    PointPattern::new(horizon, times)
}

/// Adversary point budget: true iff the pattern has at most `lambda T`
/// points, compared exactly (equality allowed).
pub fn check_adversary_constraint(pattern: &PointPattern, intensity: f64) -> bool {
    match exact_from_f64(intensity) {
        Ok(lambda) => {
            Exact::from_integer(pattern.len().into()) <= lambda * pattern.horizon()
        }
        Err(_) => false,
    }
}

/// Splits a pattern into (known, unknown) parts, assigning each point to
/// `known` independently with probability `prob_known`.
pub fn split_side_info(
    pattern: &PointPattern,
    prob_known: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(PointPattern, PointPattern)> {
    if !(0.0..=1.0).contains(&prob_known) {
        return Err(Error::Domain(format!(
            "side-information probability must be in [0, 1], got {prob_known}"
        )));
    }
    let mut known = Vec::new();
    let mut unknown = Vec::new();
    for &t in pattern.times() {
        if rng.random::<f64>() < prob_known {
            known.push(t);
        } else {
            unknown.push(t);
        }
    }
    Ok((
        PointPattern::new(pattern.horizon().clone(), known)?,
        PointPattern::new(pattern.horizon().clone(), unknown)?,
    ))
}

/// Writes a pattern file: a `T=<decimal>` header, then one time per line.
pub fn format_pattern_file(pattern: &PointPattern) -> String {
    let mut out = format!("T={}\n", format_exact(pattern.horizon()));
    for t in pattern.times() {
        out.push_str(&format!("{t}\n"));
    }
    out
}

/// Parses a pattern file written by [`format_pattern_file`].
pub fn parse_pattern_file(text: &str) -> Result<PointPattern> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty pattern file".into(),
        })?;
    let horizon = header
        .trim()
        .strip_prefix("T=")
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("expected `T=<value>` header, got {header:?}"),
        })
        .and_then(parse_decimal)?;
    let mut times = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t: f64 = line.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("bad time {line:?}"),
        })?;
        times.push(t);
    }
    PointPattern::new(horizon, times)
}
