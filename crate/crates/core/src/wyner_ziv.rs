//! Binned covering codes with decoder side information.
//!
//! The codebook is a virtual `M x L` array of IID Bernoulli(D) codewords.
//! The encoder scans bins lexicographically for the first codeword covering
//! the source mask and sends only the bin index `m` (plus the occupied-slot
//! count, whose rate vanishes with the horizon); if nothing covers, it sends
//! a distinguished all-one signal. The decoder searches bin `m` for
//! codewords covering its side-information mask: a unique match must be the
//! encoder's choice, more than one match degrades to the all-one output, so
//! the reconstruction never misses a point.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{exact_to_f64, floor_to_u64, format_exact, Exact};
use crate::model::{
    continuous_distortion, discretize, mask_to_interval_set, slot_count, BinaryMask,
};
use crate::rng::{domains, BitStream, SeedSpec};
use crate::sources::{sample_poisson, split_side_info};

pub use crate::covering::DEFAULT_SEARCH_BUDGET;

/// A virtual two-index codebook: `bins` bins of `per_bin` codewords.
#[derive(Debug, Clone)]
pub struct WzSpec {
    rate: f64,
    bin_rate: f64,
    horizon: Exact,
    slot_width: Exact,
    budget: f64,
    unknown_rate: f64,
    seed: SeedSpec,
    book_label: u64,
    slots: usize,
    bins: u64,
    per_bin: u64,
}

/// Encoder message: either the all-one signal or a bin index together with
/// the occupied-slot count of the source mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WzMessage {
    AllOne,
    Index { bin: u64, occupied_count: u32 },
}

/// How the decoder resolved a bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WzDecodeOutcome {
    /// Exactly one codeword in the bin covered the side mask.
    Unique { offset: u64 },
    /// More than one covered it; the decoder output the all-one mask.
    Ambiguous,
    /// The message was the all-one signal.
    AllOneSignal,
    /// No codeword covered the side mask (impossible for honest messages);
    /// handled with the all-one output.
    NoMatch,
}

impl WzSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rate: f64,
        bin_rate: f64,
        horizon: Exact,
        slot_width: Exact,
        budget: f64,
        unknown_rate: f64,
        seed: SeedSpec,
        search_budget: u64,
    ) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) || !(bin_rate >= 0.0 && bin_rate.is_finite()) {
            return Err(Error::Domain(format!(
                "rates must be nonnegative, got {rate} and {bin_rate}"
            )));
        }
        if !(budget > 0.0 && budget < 1.0) {
            return Err(Error::Domain(format!(
                "distortion budget must be in (0, 1), got {budget}"
            )));
        }
        if !(unknown_rate >= 0.0 && unknown_rate.is_finite()) {
            return Err(Error::Domain(format!(
                "unknown-point rate must be nonnegative, got {unknown_rate}"
            )));
        }
        let slots = slot_count(&horizon, &slot_width)?;
        let t = exact_to_f64(&horizon);
        let size = |exponent: f64| -> u64 {
            if exponent >= 63.0 {
                u64::MAX
            } else {
                (exponent.exp2().ceil() as u64).max(1)
            }
        };
        let bins = size(t * rate);
        let per_bin = size(t * bin_rate);
        let total = bins.checked_mul(per_bin).unwrap_or(u64::MAX);
        if total > search_budget {
            return Err(Error::BudgetExceeded {
                requested: total,
                budget: search_budget,
            });
        }
        Ok(Self {
            rate,
            bin_rate,
            horizon,
            slot_width,
            budget,
            unknown_rate,
            seed,
            book_label: 0,
            slots,
            bins,
            per_bin,
        })
    }

    pub fn with_book_label(&self, label: u64) -> Self {
        let mut spec = self.clone();
        spec.book_label = label;
        spec
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn bin_rate(&self) -> f64 {
        self.bin_rate
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

    pub fn unknown_rate(&self) -> f64 {
        self.unknown_rate
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    pub fn per_bin(&self) -> u64 {
        self.per_bin
    }

    fn bits(&self) -> BitStream {
        BitStream::new(self.seed, domains::WZ_CODEBOOK, self.book_label, self.budget)
    }

    fn flat_index(&self, bin: u64, offset: u64) -> u64 {
        (bin - 1) * self.per_bin + (offset - 1)
    }

    /// Regenerates codeword `(bin, offset)`, both 1-based.
    pub fn codeword(&self, bin: u64, offset: u64) -> Result<BinaryMask> {
        if bin == 0 || bin > self.bins {
            return Err(Error::IndexOutOfRange {
                index: bin,
                count: self.bins,
            });
        }
        if offset == 0 || offset > self.per_bin {
            return Err(Error::IndexOutOfRange {
                index: offset,
                count: self.per_bin,
            });
        }
        let words = self
            .bits()
            .open(self.flat_index(bin, offset))
            .packed_bits(self.slots);
        Ok(BinaryMask::from_words(
            self.slot_width.clone(),
            self.slots,
            words,
        ))
    }

    fn check_geometry(&self, mask: &BinaryMask) -> Result<()> {
        if mask.len() != self.slots || mask.slot_width() != &self.slot_width {
            return Err(Error::MaskMismatch(format!(
                "mask has {} slots of width {}, codebook expects {} of width {}",
                mask.len(),
                format_exact(mask.slot_width()),
                self.slots,
                format_exact(&self.slot_width)
            )));
        }
        Ok(())
    }

    /// Scans `(bin, offset)` lexicographically for the first codeword
    /// covering `z`; sends its bin index and the occupied count, or the
    /// all-one signal when nothing covers.
    pub fn encode(&self, z: &BinaryMask) -> Result<WzMessage> {
        self.check_geometry(z)?;
        let ones: Vec<u64> = z.one_positions().iter().map(|&j| j as u64).collect();
        let bits = self.bits();
        let total = self.bins * self.per_bin;
        for flat in 0..total {
            let mut stream = bits.open(flat);
            if ones.iter().all(|&j| stream.bit_at(j)) {
                return Ok(WzMessage::Index {
                    bin: flat / self.per_bin + 1,
                    occupied_count: z.popcount() as u32,
                });
            }
        }
        Ok(WzMessage::AllOne)
    }

    /// Resolves a message against the side-information mask and reports how.
    pub fn decode_classified(
        &self,
        message: &WzMessage,
        side: &BinaryMask,
    ) -> Result<(BinaryMask, WzDecodeOutcome)> {
        self.check_geometry(side)?;
        let all_one = BinaryMask::ones(self.slot_width.clone(), self.slots);
        let bin = match message {
            WzMessage::AllOne => return Ok((all_one, WzDecodeOutcome::AllOneSignal)),
            WzMessage::Index { bin, .. } => *bin,
        };
        if bin == 0 || bin > self.bins {
            return Err(Error::IndexOutOfRange {
                index: bin,
                count: self.bins,
            });
        }
        let ones: Vec<u64> = side.one_positions().iter().map(|&j| j as u64).collect();
        let bits = self.bits();
        let mut unique: Option<u64> = None;
        for offset in 1..=self.per_bin {
            let mut stream = bits.open(self.flat_index(bin, offset));
            if ones.iter().all(|&j| stream.bit_at(j)) {
                if unique.is_some() {
                    return Ok((all_one, WzDecodeOutcome::Ambiguous));
                }
                unique = Some(offset);
            }
        }
        match unique {
            Some(offset) => Ok((
                self.codeword(bin, offset)?,
                WzDecodeOutcome::Unique { offset },
            )),
            None => Ok((all_one, WzDecodeOutcome::NoMatch)),
        }
    }

    /// Decoder output only; see [`WzSpec::decode_classified`].
    pub fn decode(&self, message: &WzMessage, side: &BinaryMask) -> Result<BinaryMask> {
        Ok(self.decode_classified(message, side)?.0)
    }
}

/// First-cover rule over an explicit `bins x per_bin` book, for small-case
/// tests. Rows are bins; returns the paired message.
pub fn encode_with_book(book: &[Vec<BinaryMask>], z: &BinaryMask) -> WzMessage {
    for (b, row) in book.iter().enumerate() {
        for c in row {
            if c.covers(z) {
                return WzMessage::Index {
                    bin: b as u64 + 1,
                    occupied_count: z.popcount() as u32,
                };
            }
        }
    }
    WzMessage::AllOne
}

/// Decode rule over an explicit book.
pub fn decode_with_book(
    book: &[Vec<BinaryMask>],
    message: &WzMessage,
    side: &BinaryMask,
) -> (BinaryMask, WzDecodeOutcome) {
    let all_one = BinaryMask::ones(side.slot_width().clone(), side.len());
    let bin = match message {
        WzMessage::AllOne => return (all_one, WzDecodeOutcome::AllOneSignal),
        WzMessage::Index { bin, .. } => *bin as usize,
    };
    let mut unique: Option<u64> = None;
    for (i, c) in book[bin - 1].iter().enumerate() {
        if c.covers(side) {
            if unique.is_some() {
                return (all_one, WzDecodeOutcome::Ambiguous);
            }
            unique = Some(i as u64 + 1);
        }
    }
    match unique {
        Some(offset) => (
            book[bin - 1][(offset - 1) as usize].clone(),
            WzDecodeOutcome::Unique { offset },
        ),
        None => (all_one, WzDecodeOutcome::NoMatch),
    }
}

/// Admissibility bounds in total bits over the horizon, from the occupied
/// count, the unknown-point budget and the Bernoulli parameter: the sum rate
/// `T(R + R~)` must exceed the first value and the bin rate `T R~` must stay
/// below the second.
pub fn wz_rate_bounds(
    occupied_count: u64,
    unknown_rate: f64,
    horizon: f64,
    budget: f64,
) -> (f64, f64) {
    let log_d = budget.log2();
    let min_sum_bits = -(occupied_count as f64) * log_d;
    let hidden = (occupied_count as f64 - unknown_rate * horizon).max(0.0);
    let max_bin_bits = -hidden * log_d;
    (min_sum_bits, max_bin_bits)
}

/// Trial outcome classes as reported in run records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WzOutcome {
    Ok,
    Ambiguous,
    EncFail,
}

impl WzOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            WzOutcome::Ok => "ok",
            WzOutcome::Ambiguous => "ambiguous",
            WzOutcome::EncFail => "enc_fail",
        }
    }
}

/// One Monte Carlo outcome of the side-information pipeline.
#[derive(Debug, Clone)]
pub struct WzTrialRecord {
    pub trial: u64,
    /// Occupied slots of the full source mask.
    pub occupied_count: u32,
    /// Occupied slots of the side-information mask.
    pub known_count: u32,
    pub outcome: WzOutcome,
    pub distortion: f64,
    /// Message bits charged to this trial: the bin alphabet (including the
    /// all-one signal) plus the occupied-count side message.
    pub charged_bits: f64,
}

#[derive(Debug, Clone)]
pub struct WzSummary {
    pub trials: u64,
    pub ok_count: u64,
    pub ambiguous_count: u64,
    pub enc_fail_count: u64,
    pub ambiguity_rate: f64,
    pub enc_fail_rate: f64,
    pub mean_distortion: f64,
    pub distortion_ci95: f64,
    pub mean_occupied: f64,
    pub mean_known: f64,
    /// Mean charged bits divided by the horizon: the rate actually spent,
    /// overhead included.
    pub charged_rate_bits_per_sec: f64,
    /// Ambiguity prediction from the side-count mixture (collisions in
    /// side-information slots ignored).
    pub predicted_ambiguity_rate: f64,
    /// Encoder-failure prediction from the occupied-count mixture.
    pub predicted_enc_fail_rate: f64,
}

#[derive(Debug, Clone)]
pub struct WzRun {
    pub records: Vec<WzTrialRecord>,
    pub summary: WzSummary,
}

/// Probability that some other codeword in a bin of `per_bin` covers a side
/// mask with `known_count` ones: `1 - (1 - D^s)^(L-1)`.
pub fn ambiguity_probability(known_count: u32, budget: f64, per_bin: u64) -> f64 {
    if per_bin <= 1 {
        return 0.0;
    }
    let p_cover = budget.powi(known_count as i32);
    -((per_bin - 1) as f64 * (-p_cover).ln_1p()).exp_m1()
}

/// Exact encoder-failure probability for a fixed occupied count over the
/// whole `M x L` book.
pub fn enc_fail_probability(occupied_count: u32, budget: f64, total_codewords: u64) -> f64 {
    let p_cover = budget.powi(occupied_count as i32);
    (total_codewords as f64 * (-p_cover).ln_1p()).exp()
}

fn poisson_mixture(mean: f64, mut term: impl FnMut(u32) -> f64) -> f64 {
    let max = (mean + 12.0 * mean.sqrt()).ceil() as usize + 2;
    let pmf = crate::covering::poisson_pmf(mean, max);
    pmf.iter()
        .enumerate()
        .map(|(k, p)| p * term(k as u32))
        .sum()
}

/// Runs the side-information pipeline: sample a Poisson pattern, reveal each
/// point independently with probability `p_known`, encode the full mask,
/// decode with the side mask only, and measure continuous distortion against
/// the full pattern.
pub fn run_wz_trials(
    spec: &WzSpec,
    intensity: f64,
    p_known: f64,
    trials: u64,
    seed: SeedSpec,
) -> Result<WzRun> {
    if !(0.0..=1.0).contains(&p_known) {
        return Err(Error::Domain(format!(
            "side-information probability must be in [0, 1], got {p_known}"
        )));
    }
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(Error::Domain(format!(
            "intensity must be nonnegative, got {intensity}"
        )));
    }
    let t = exact_to_f64(spec.horizon());
    let max_count_alphabet = floor_to_u64(
        &(crate::exact::exact_from_f64(intensity)? * spec.horizon()),
    )? + 1;
    let records: Vec<WzTrialRecord> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<WzTrialRecord> {
            let mut source_rng = seed.stream(domains::TRIAL_SOURCE, 0, trial);
            let pattern = sample_poisson(intensity, spec.horizon(), &mut source_rng)?;
            let mut split_rng = seed.stream(domains::TRIAL_SPLIT, 0, trial);
            let (known, unknown) = split_side_info(&pattern, p_known, &mut split_rng)?;
            let z = discretize(&pattern, spec.slot_width())?;
            let side = discretize(&known, spec.slot_width())?;
            // Side mask is dominated by the source mask, and slot collisions
            // only help the side count.
            debug_assert!(z.covers(&side));
            assert!(
                side.popcount() + unknown.len() >= z.popcount(),
                "side-count bookkeeping violated"
            );
            let message = spec.encode(&z)?;
            let (reconstruction, decode_outcome) = spec.decode_classified(&message, &side)?;
            let outcome = match decode_outcome {
                WzDecodeOutcome::AllOneSignal => WzOutcome::EncFail,
                WzDecodeOutcome::Unique { .. } => WzOutcome::Ok,
                WzDecodeOutcome::Ambiguous | WzDecodeOutcome::NoMatch => WzOutcome::Ambiguous,
            };
            if outcome == WzOutcome::Ok {
                debug_assert!(reconstruction.covers(&z));
            }
            let set = mask_to_interval_set(&reconstruction);
            let distortion = continuous_distortion(&pattern, &set)?
                .finite_f64()
                .expect("all-one degradation keeps distortion finite");
            // The occupied count rides along as a side message; its alphabet
            // is 0..=floor(lambda T) (extended when a Poisson draw exceeds
            // the nominal maximum).
            let count_alphabet = max_count_alphabet.max(z.popcount() as u64 + 1);
            let charged_bits =
                ((spec.bins() + 1) as f64).log2() + (count_alphabet as f64).log2();
            Ok(WzTrialRecord {
                trial,
                occupied_count: z.popcount() as u32,
                known_count: side.popcount() as u32,
                outcome,
                distortion,
                charged_bits,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let trials_f = records.len().max(1) as f64;
    let ok_count = records.iter().filter(|r| r.outcome == WzOutcome::Ok).count() as u64;
    let ambiguous_count = records
        .iter()
        .filter(|r| r.outcome == WzOutcome::Ambiguous)
        .count() as u64;
    let enc_fail_count = records
        .iter()
        .filter(|r| r.outcome == WzOutcome::EncFail)
        .count() as u64;
    let mean_distortion = records.iter().map(|r| r.distortion).sum::<f64>() / trials_f;
    let var = records
        .iter()
        .map(|r| (r.distortion - mean_distortion).powi(2))
        .sum::<f64>()
        / (trials_f - 1.0).max(1.0);
    let mean_occupied = records.iter().map(|r| r.occupied_count as f64).sum::<f64>() / trials_f;
    let mean_known = records.iter().map(|r| r.known_count as f64).sum::<f64>() / trials_f;
    let total = spec.bins() * spec.per_bin();
    let predicted_enc_fail_rate = poisson_mixture(intensity * t, |k| {
        enc_fail_probability(k, spec.budget(), total)
    });
    let predicted_ambiguity_rate = (1.0 - predicted_enc_fail_rate)
        * poisson_mixture(p_known * intensity * t, |s| {
            ambiguity_probability(s, spec.budget(), spec.per_bin())
        });
    let summary = WzSummary {
        trials: records.len() as u64,
        ok_count,
        ambiguous_count,
        enc_fail_count,
        ambiguity_rate: ambiguous_count as f64 / trials_f,
        enc_fail_rate: enc_fail_count as f64 / trials_f,
        mean_distortion,
        distortion_ci95: 1.96 * (var / trials_f).sqrt(),
        mean_occupied,
        mean_known,
        charged_rate_bits_per_sec: records.iter().map(|r| r.charged_bits).sum::<f64>()
            / (trials_f * t),
        predicted_ambiguity_rate,
        predicted_enc_fail_rate,
    };
    Ok(WzRun { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_decimal;

    fn mask(bits: &[bool]) -> BinaryMask {
        BinaryMask::from_bits(parse_decimal("1").unwrap(), bits)
    }

    fn spec(rate: f64, bin_rate: f64, horizon: &str, delta: &str, master: u64) -> WzSpec {
        WzSpec::new(
            rate,
            bin_rate,
            parse_decimal(horizon).unwrap(),
            parse_decimal(delta).unwrap(),
            0.5,
            1.0,
            SeedSpec::new(master),
            DEFAULT_SEARCH_BUDGET,
        )
        .unwrap()
    }

    #[test]
    fn all_zero_source_lands_in_the_first_bin() {
        let s = spec(0.5, 0.25, "8", "0.5", 1);
        let z = BinaryMask::zeros(parse_decimal("0.5").unwrap(), s.slots());
        match s.encode(&z).unwrap() {
            WzMessage::Index {
                bin,
                occupied_count,
            } => {
                assert_eq!(bin, 1);
                assert_eq!(occupied_count, 0);
            }
            WzMessage::AllOne => panic!("vacuous cover must succeed"),
        }
    }

    #[test]
    fn explicit_two_bin_example() {
        let book = vec![
            vec![mask(&[false, true])],
            vec![mask(&[true, true])],
        ];
        let z = mask(&[true, false]);
        match encode_with_book(&book, &z) {
            WzMessage::Index { bin, .. } => assert_eq!(bin, 2),
            WzMessage::AllOne => panic!("bin 2 covers"),
        }
    }

    #[test]
    fn decoder_unique_match_returns_the_codeword() {
        let book = vec![vec![
            mask(&[true, true, false]),
            mask(&[true, false, true]),
        ]];
        let side = mask(&[false, false, true]);
        let msg = WzMessage::Index {
            bin: 1,
            occupied_count: 2,
        };
        let (out, outcome) = decode_with_book(&book, &msg, &side);
        assert_eq!(out, mask(&[true, false, true]));
        assert_eq!(outcome, WzDecodeOutcome::Unique { offset: 2 });
    }

    #[test]
    fn decoder_ambiguity_degrades_to_all_one() {
        let book = vec![vec![
            mask(&[true, true, false]),
            mask(&[true, false, true]),
        ]];
        let side = mask(&[false, false, false]);
        let msg = WzMessage::Index {
            bin: 1,
            occupied_count: 0,
        };
        let (out, outcome) = decode_with_book(&book, &msg, &side);
        assert_eq!(out, mask(&[true, true, true]));
        assert_eq!(outcome, WzDecodeOutcome::Ambiguous);
    }

    #[test]
    fn all_one_signal_overrides_side_information() {
        let s = spec(0.5, 0.25, "4", "0.5", 2);
        let side = BinaryMask::zeros(parse_decimal("0.5").unwrap(), s.slots());
        let (out, outcome) = s.decode_classified(&WzMessage::AllOne, &side).unwrap();
        assert_eq!(out.popcount(), out.len());
        assert_eq!(outcome, WzDecodeOutcome::AllOneSignal);
    }

    #[test]
    fn all_one_rate_matches_independence_on_a_small_book() {
        // 16 slots, 8 ones, M*L = 8 codewords at D = 0.5: the no-cover
        // probability per trial is (1 - 2^-8)^8.
        let mut bits = [false; 16];
        for j in [0usize, 2, 4, 6, 8, 10, 12, 14] {
            bits[j] = true;
        }
        let z = BinaryMask::from_bits(parse_decimal("1").unwrap(), &bits);
        let expected = enc_fail_probability(8, 0.5, 8);
        let trials = 3000u64;
        let mut all_one = 0u64;
        for label in 0..trials {
            let s = WzSpec::new(
                2.0 / 16.0,
                1.0 / 16.0,
                parse_decimal("16").unwrap(),
                parse_decimal("1").unwrap(),
                0.5,
                1.0,
                SeedSpec::new(master_for(label)),
                DEFAULT_SEARCH_BUDGET,
            )
            .unwrap();
            assert_eq!(s.bins() * s.per_bin(), 8);
            if matches!(s.encode(&z).unwrap(), WzMessage::AllOne) {
                all_one += 1;
            }
        }
        let freq = all_one as f64 / trials as f64;
        let band = 4.0 * (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!(
            (freq - expected).abs() <= band,
            "all-one frequency {freq} vs {expected} +- {band}"
        );
    }

    fn master_for(label: u64) -> u64 {
        // Distinct masters per trial for the small-book frequency test.
        0x5EED_0000 + label
    }

    #[test]
    fn rate_bounds_fixed_values() {
        let (min_sum, max_bin) = wz_rate_bounds(16, 1.0, 8.0, 0.5);
        assert_eq!(min_sum, 16.0);
        assert_eq!(max_bin, 8.0);
        // Everything revealed: degenerate bins.
        let (min_sum, max_bin) = wz_rate_bounds(8, 2.0, 8.0, 0.5);
        assert_eq!(min_sum, 8.0);
        assert_eq!(max_bin, 0.0);
        // No side information: the bounds collapse to the single-index case.
        let (min_sum, max_bin) = wz_rate_bounds(16, 0.0, 8.0, 0.5);
        assert_eq!(min_sum, 16.0);
        assert_eq!(max_bin, 16.0);
    }

    #[test]
    fn side_mask_is_dominated_and_unique_match_covers() {
        let s = spec(1.0, 0.5, "8", "0.25", 5);
        let mut ok_seen = false;
        for trial in 0..40u64 {
            let mut rng = SeedSpec::new(60).stream(domains::TRIAL_SOURCE, 0, trial);
            let pattern = sample_poisson(1.0, s.horizon(), &mut rng).unwrap();
            let mut split_rng = SeedSpec::new(60).stream(domains::TRIAL_SPLIT, 0, trial);
            let (known, _) = split_side_info(&pattern, 0.6, &mut split_rng).unwrap();
            let z = discretize(&pattern, s.slot_width()).unwrap();
            let side = discretize(&known, s.slot_width()).unwrap();
            assert!(z.covers(&side));
            let msg = s.encode(&z).unwrap();
            let (out, outcome) = s.decode_classified(&msg, &side).unwrap();
            if matches!(outcome, WzDecodeOutcome::Unique { .. }) {
                assert!(out.covers(&z), "unique match must equal the encoder pick");
                ok_seen = true;
            }
            // Whatever happens, the reconstruction covers the source mask.
            assert!(out.covers(&z) || out.popcount() == out.len());
        }
        assert!(ok_seen);
    }

    #[test]
    fn run_records_classify_every_trial() {
        let s = spec(1.0, 0.5, "8", "0.25", 8);
        let run = run_wz_trials(&s, 1.0, 0.5, 48, SeedSpec::new(70)).unwrap();
        assert_eq!(run.records.len(), 48);
        for r in &run.records {
            assert!((0.0..=1.0).contains(&r.distortion));
            assert!(r.known_count <= r.occupied_count);
            assert!(r.charged_bits > 0.0);
        }
        let s2 = run.summary.clone();
        assert_eq!(
            s2.ok_count + s2.ambiguous_count + s2.enc_fail_count,
            s2.trials
        );
        // Determinism.
        let again = run_wz_trials(&s, 1.0, 0.5, 48, SeedSpec::new(70)).unwrap();
        for (a, b) in run.records.iter().zip(&again.records) {
            assert_eq!(a.outcome, b.outcome);
            assert_eq!(a.distortion, b.distortion);
        }
    }

    #[test]
    fn fully_informed_decoder_needs_almost_no_bin_rate() {
        // Everything revealed: the decoder sees the full source mask, so a
        // modest codebook with generous margins resolves bins uniquely and
        // the distortion sits near the budget.
        let s = WzSpec::new(
            0.9,
            1.6,
            parse_decimal("8").unwrap(),
            parse_decimal("0.01").unwrap(),
            0.5,
            0.0,
            SeedSpec::new(9),
            DEFAULT_SEARCH_BUDGET,
        )
        .unwrap();
        let run = run_wz_trials(&s, 2.0, 1.0, 60, SeedSpec::new(71)).unwrap();
        let ok_rate = run.summary.ok_count as f64 / run.summary.trials as f64;
        assert!(ok_rate > 0.6, "ok rate {ok_rate}");
        let covered: Vec<f64> = run
            .records
            .iter()
            .filter(|r| r.outcome == WzOutcome::Ok)
            .map(|r| r.distortion)
            .collect();
        let mean = covered.iter().sum::<f64>() / covered.len() as f64;
        assert!((mean - 0.505).abs() < 0.05, "covered mean {mean}");
    }

    #[test]
    fn budget_refusal_for_oversized_books() {
        let err = WzSpec::new(
            2.0,
            2.0,
            parse_decimal("16").unwrap(),
            parse_decimal("0.01").unwrap(),
            0.5,
            1.0,
            SeedSpec::new(1),
            DEFAULT_SEARCH_BUDGET,
        )
        .unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}
