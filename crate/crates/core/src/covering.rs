//! Random covering codes with a virtual Bernoulli codebook.
//!
//! The codebook holds `M = max(2, ceil(2^{T R}))` codewords of `n` slots:
//! index 1 is the all-one fallback, indices 2..=M are IID Bernoulli(D) bits
//! regenerated on demand from counter-mode streams — nothing is stored. The
//! encoder scans for the first codeword that covers the source mask and
//! sends its index, or 1 if none covers; the decoder regenerates the indexed
//! codeword. Since the all-one word covers everything, reconstructions never
//! miss a point.
//!
//! The hot loop tests codeword bits only at the source's one-positions, in
//! increasing order with early exit; regeneration is positionally stable, so
//! a later decode reproduces the full mask bit-identically.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{exact_to_f64, format_exact, Exact};
use crate::model::{
    continuous_distortion, discretize, mask_to_interval_set, slot_count, BinaryMask, PointPattern,
};
use crate::rng::{domains, BitStream, SeedSpec};
use crate::sources::{sample, SourceConfig, SourceKind};

/// Default cap on the number of codewords a single encode may scan.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 25;

/// A virtual covering codebook: geometry, rate, Bernoulli parameter, seed.
#[derive(Debug, Clone)]
pub struct CodebookSpec {
    rate: f64,
    horizon: Exact,
    slot_width: Exact,
    budget: f64,
    seed: SeedSpec,
    book_label: u64,
    slots: usize,
    codewords: u64,
}

/// Encoder output: a codeword index, with index 1 flagged as the fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeResult {
    pub index: u64,
    pub fallback: bool,
}

impl CodebookSpec {
    /// Validates parameters and sizes the codebook. `search_budget` caps the
    /// codeword count; runs that would exceed it are refused up front.
    pub fn new(
        rate: f64,
        horizon: Exact,
        slot_width: Exact,
        budget: f64,
        seed: SeedSpec,
        search_budget: u64,
    ) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::Domain(format!(
                "rate must be nonnegative, got {rate}"
            )));
        }
        if !(budget > 0.0 && budget < 1.0) {
            return Err(Error::Domain(format!(
                "distortion budget must be in (0, 1), got {budget}"
            )));
        }
        let slots = slot_count(&horizon, &slot_width)?;
        let exponent = exact_to_f64(&horizon) * rate;
        let codewords = if exponent >= 63.0 {
            u64::MAX
        } else {
            (exponent.exp2().ceil() as u64).max(2)
        };
        if codewords > search_budget {
            return Err(Error::BudgetExceeded {
                requested: codewords,
                budget: search_budget,
            });
        }
        Ok(Self {
            rate,
            horizon,
            slot_width,
            budget,
            seed,
            book_label: 0,
            slots,
            codewords,
        })
    }

    /// Same geometry and seed, different codebook draw.
    pub fn with_book_label(&self, label: u64) -> Self {
        let mut spec = self.clone();
        spec.book_label = label;
        spec
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn horizon(&self) -> &Exact {
        &self.horizon
    }

    pub fn slot_width(&self) -> &Exact {
        &self.slot_width
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn codeword_count(&self) -> u64 {
        self.codewords
    }

    fn bits(&self) -> BitStream {
        BitStream::new(
            self.seed,
            domains::COVER_CODEBOOK,
            self.book_label,
            self.budget,
        )
    }

    /// Regenerates codeword `m` (1-based). Index 1 is the all-one fallback;
    /// repeated calls are bit-identical.
    pub fn codeword(&self, m: u64) -> Result<BinaryMask> {
        if m == 0 || m > self.codewords {
            return Err(Error::IndexOutOfRange {
                index: m,
                count: self.codewords,
            });
        }
        if m == 1 {
            return Ok(BinaryMask::ones(self.slot_width.clone(), self.slots));
        }
        let words = self.bits().open(m).packed_bits(self.slots);
        Ok(BinaryMask::from_words(
            self.slot_width.clone(),
            self.slots,
            words,
        ))
    }

    fn check_geometry(&self, z: &BinaryMask) -> Result<()> {
        if z.len() != self.slots || z.slot_width() != &self.slot_width {
            return Err(Error::MaskMismatch(format!(
                "source mask has {} slots of width {}, codebook expects {} of width {}",
                z.len(),
                format_exact(z.slot_width()),
                self.slots,
                format_exact(&self.slot_width)
            )));
        }
        Ok(())
    }

    /// First-cover encoder: the smallest `m` in 2..=M whose codeword covers
    /// `z`, or 1 when no random codeword does.
    pub fn encode(&self, z: &BinaryMask) -> Result<EncodeResult> {
        self.check_geometry(z)?;
        let ones: Vec<u64> = z.one_positions().iter().map(|&j| j as u64).collect();
        let bits = self.bits();
        for m in 2..=self.codewords {
            let mut stream = bits.open(m);
            if ones.iter().all(|&j| stream.bit_at(j)) {
                return Ok(EncodeResult {
                    index: m,
                    fallback: false,
                });
            }
        }
        Ok(EncodeResult {
            index: 1,
            fallback: true,
        })
    }

    /// Decoder: regenerates the indexed codeword.
    pub fn decode(&self, result: &EncodeResult) -> Result<BinaryMask> {
        self.codeword(result.index)
    }
}

/// First-cover rule over an explicit codeword list whose entry 0 is the
/// fallback at index 1. Mirrors [`CodebookSpec::encode`] for small books.
pub fn encode_with_book(codewords: &[BinaryMask], z: &BinaryMask) -> EncodeResult {
    for (i, c) in codewords.iter().enumerate().skip(1) {
        if c.covers(z) {
            return EncodeResult {
                index: i as u64 + 1,
                fallback: false,
            };
        }
    }
    EncodeResult {
        index: 1,
        fallback: true,
    }
}

/// Probability that one Bernoulli(D) codeword covers a mask with `one_count`
/// set slots: `D^k`.
pub fn cover_probability(one_count: u32, budget: f64) -> f64 {
    budget.powi(one_count as i32)
}

/// Expected distortion of a covering codeword for a source of `mu` occupied
/// slots per second: `D + (1 - D) mu delta`. Requires `mu * slot_width <= 1`.
pub fn expected_covered_distortion(mu: f64, slot_width: f64, budget: f64) -> f64 {
    budget + (1.0 - budget) * mu * slot_width
}

/// Exact fallback probability for a fixed mask with `one_count` set slots:
/// `(1 - D^k)^(M-1)`.
pub fn fallback_probability(one_count: u32, budget: f64, codewords: u64) -> f64 {
    let p_cover = cover_probability(one_count, budget);
    ((codewords - 1) as f64 * (-p_cover).ln_1p()).exp()
}

/// Distribution of the number of occupied bins after dropping `balls`
/// uniform balls into `bins` bins (index = occupied count).
pub fn occupancy_distribution(balls: u64, bins: usize) -> Vec<f64> {
    let mut dist = vec![0.0f64; balls as usize + 1];
    dist[0] = 1.0;
    let n = bins as f64;
    for _ in 0..balls {
        let mut next = vec![0.0f64; dist.len()];
        for (j, p) in dist.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            let stay = j as f64 / n;
            next[j] += p * stay;
            if j + 1 < next.len() {
                next[j + 1] += p * (1.0 - stay);
            }
        }
        dist = next;
    }
    dist
}

/// Poisson probabilities `P[N = k]` for `k` in `0..=max`.
pub fn poisson_pmf(mean: f64, max: usize) -> Vec<f64> {
    let mut pmf = vec![0.0f64; max + 1];
    pmf[0] = (-mean).exp();
    for k in 1..=max {
        pmf[k] = pmf[k - 1] * mean / k as f64;
    }
    pmf
}

/// Exact fallback prediction for the configured source, when its slot-count
/// distribution has a closed form: Poisson mixes the occupancy distribution
/// over a Poisson point count; grid and max-count have deterministic counts.
/// Renewal and cluster sources return `None`.
pub fn predicted_fallback(spec: &CodebookSpec, source: &SourceConfig) -> Option<f64> {
    let n = spec.slots();
    let mean = source.intensity * exact_to_f64(&source.horizon);
    match source.kind {
        SourceKind::Poisson => {
            let max = (mean + 12.0 * mean.sqrt()).ceil() as usize + 2;
            let pmf = poisson_pmf(mean, max);
            let mut total = 0.0;
            for (balls, p_balls) in pmf.iter().enumerate() {
                if *p_balls < 1e-16 {
                    continue;
                }
                let occ = occupancy_distribution(balls as u64, n);
                let inner: f64 = occ
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        p * fallback_probability(k as u32, spec.budget(), spec.codeword_count())
                    })
                    .sum();
                total += p_balls * inner;
            }
            Some(total)
        }
        SourceKind::MaxCount => {
            let balls = mean.floor() as u64;
            let occ = occupancy_distribution(balls, n);
            Some(
                occ.iter()
                    .enumerate()
                    .map(|(k, p)| {
                        p * fallback_probability(k as u32, spec.budget(), spec.codeword_count())
                    })
                    .sum(),
            )
        }
        SourceKind::Grid => None,
        SourceKind::Renewal { .. } | SourceKind::Cluster { .. } => None,
    }
}

/// One Monte Carlo outcome of the covering pipeline.
#[derive(Debug, Clone)]
pub struct CoverTrialRecord {
    pub trial: u64,
    pub one_count: u32,
    pub index: u64,
    pub fallback: bool,
    pub distortion: f64,
}

/// Aggregate over a covering run. Every statistic here is a pure fold over
/// the trial records plus side-channel-free predictions.
#[derive(Debug, Clone)]
pub struct CoverSummary {
    pub trials: u64,
    pub mean_one_count: f64,
    pub fallback_count: u64,
    pub fallback_rate: f64,
    pub mean_distortion: f64,
    pub distortion_ci95: f64,
    pub predicted_covered_distortion: f64,
    pub predicted_fallback_rate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CoverRun {
    pub records: Vec<CoverTrialRecord>,
    pub summary: CoverSummary,
}

/// What the per-trial pattern is drawn from.
#[derive(Debug, Clone)]
pub enum TrialSource {
    /// Sample a fresh pattern each trial.
    Sampled(SourceConfig),
    /// One fixed pattern for every trial; the codebook is redrawn per trial
    /// instead, which realizes the random-coding expectation.
    Fixed(PointPattern),
}

#[derive(Debug, Clone, Default)]
pub struct CoverRunOptions {
    /// Redraw the codebook per trial even for sampled sources.
    pub reseed_codebook_per_trial: bool,
}

fn mean_and_ci95(values: impl Iterator<Item = f64> + Clone, count: u64) -> (f64, f64) {
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let n = count as f64;
    let mean = values.clone().sum::<f64>() / n;
    if count < 2 {
        return (mean, f64::NAN);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

fn summarize(
    spec: &CodebookSpec,
    records: &[CoverTrialRecord],
    predicted_fallback_rate: Option<f64>,
) -> CoverSummary {
    let trials = records.len() as u64;
    let fallback_count = records.iter().filter(|r| r.fallback).count() as u64;
    let (mean_distortion, distortion_ci95) =
        mean_and_ci95(records.iter().map(|r| r.distortion), trials);
    let mean_one_count =
        records.iter().map(|r| r.one_count as f64).sum::<f64>() / (trials.max(1)) as f64;
    CoverSummary {
        trials,
        mean_one_count,
        fallback_count,
        fallback_rate: fallback_count as f64 / (trials.max(1)) as f64,
        mean_distortion,
        distortion_ci95,
        predicted_covered_distortion: spec.budget()
            + (1.0 - spec.budget()) * mean_one_count / spec.slots() as f64,
        predicted_fallback_rate,
    }
}

/// Runs the full pipeline per trial — sample, discretize, encode, decode,
/// measure continuous distortion against the original pattern — in parallel
/// over trials. Results are independent of the worker count.
pub fn run_covering_trials(
    spec: &CodebookSpec,
    source: &TrialSource,
    trials: u64,
    seed: SeedSpec,
    options: &CoverRunOptions,
) -> Result<CoverRun> {
    let reseed = options.reseed_codebook_per_trial || matches!(source, TrialSource::Fixed(_));
    if let TrialSource::Sampled(config) = source {
        config.validate()?;
        if &config.horizon != spec.horizon() {
            return Err(Error::HorizonMismatch {
                left: format_exact(&config.horizon),
                right: format_exact(spec.horizon()),
            });
        }
    }
    if let TrialSource::Fixed(pattern) = source {
        if pattern.horizon() != spec.horizon() {
            return Err(Error::HorizonMismatch {
                left: format_exact(pattern.horizon()),
                right: format_exact(spec.horizon()),
            });
        }
    }
    let records: Vec<CoverTrialRecord> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<CoverTrialRecord> {
            let pattern = match source {
                TrialSource::Sampled(config) => {
                    let mut rng = seed.stream(domains::TRIAL_SOURCE, 0, trial);
                    sample(config, &mut rng)?
                }
                TrialSource::Fixed(pattern) => pattern.clone(),
            };
            let z = discretize(&pattern, spec.slot_width())?;
            let book = if reseed {
                spec.with_book_label(trial)
            } else {
                spec.clone()
            };
            let encoded = book.encode(&z)?;
            let reconstruction = book.decode(&encoded)?;
            let set = mask_to_interval_set(&reconstruction);
            let distortion = continuous_distortion(&pattern, &set)?
                .finite_f64()
                .expect("reconstruction always covers the pattern");
            Ok(CoverTrialRecord {
                trial,
                one_count: z.popcount() as u32,
                index: encoded.index,
                fallback: encoded.fallback,
                distortion,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let predicted = match source {
        TrialSource::Sampled(config) => predicted_fallback(spec, config),
        TrialSource::Fixed(pattern) => {
            let z = discretize(pattern, spec.slot_width())?;
            Some(fallback_probability(
                z.popcount() as u32,
                spec.budget(),
                spec.codeword_count(),
            ))
        }
    };
    let summary = summarize(spec, &records, predicted);
    Ok(CoverRun { records, summary })
}
