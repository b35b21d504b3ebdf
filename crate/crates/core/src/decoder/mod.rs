//! Reader-side uplink decoding.

mod baselines;
mod correlate;
mod preamble;
mod recovery;
mod swmsmf;
mod templates;

pub use baselines::{decode_baseline_average, decode_baseline_edge, decode_baseline_single_symbol};
pub use preamble::{detect_preamble, PreambleDetection};
pub use recovery::{packet_error_trace, recovery_error_trace, TimeRecoveryState, CLOCK_RATIO_RANGE};
pub use swmsmf::{decode_swmsmf, nominal_bit_center_us};
pub use templates::TemplateBank;

use crate::signal::{split_coded_bits, BasebandWaveform, BitStream, ChipTrain, DEFAULT_CHIP_PERIOD_US, PREAMBLE_CHIPS};

/// Decoding at fewer samples per chip is refused.
pub const MIN_DECODE_SAMPLES_PER_CHIP: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("no preamble (best correlation {quality:.3})")]
    PreambleMissing { quality: f64 },
    #[error("waveform ends before coded bit {bit}")]
    FrameTruncated { bit: usize },
    #[error("waveform shorter than the preamble template")]
    WaveformTooShort,
    #[error("{samples_per_chip:.2} samples per chip, need at least 16")]
    SampleRateTooLow { samples_per_chip: f64 },
}

/// Decoder settings. The clock hint is `chip_period_us` with `clock_ratio_prior`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub chip_period_us: f64,
    pub clock_ratio_prior: f64,
    /// Frames carry fixed-length payloads; the reader knows the length.
    pub payload_bytes: usize,
    pub preamble_threshold: f64,
    /// Windows whose best correlation falls below this do not update the clock.
    pub min_regression_quality: f64,
    /// Alignment search half-width, in chips.
    pub search_chips: f64,
    /// Full least-squares regression over all windows instead of the two-point line.
    pub least_squares: bool,
    /// Half-width of the averaging baseline's running-mean window, in bits.
    pub averaging_window_bits: usize,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            chip_period_us: DEFAULT_CHIP_PERIOD_US,
            clock_ratio_prior: 1.0,
            payload_bytes: 4,
            preamble_threshold: 0.6,
            min_regression_quality: 0.3,
            search_chips: 0.3,
            least_squares: false,
            averaging_window_bits: 32,
        }
    }
}

impl DecoderConfig {
    pub fn for_payload_bytes(payload_bytes: usize) -> Self {
        Self { payload_bytes, ..Self::default() }
    }

    /// Payload plus CRC.
    pub fn coded_bits(&self) -> usize {
        8 * self.payload_bytes + 8
    }

    pub fn chip_samples(&self, sample_rate_hz: f64) -> f64 {
        self.chip_period_us * sample_rate_hz / 1e6
    }

    fn check_rate(&self, sample_rate_hz: f64) -> Result<(), DecodeError> {
        let samples_per_chip = self.chip_samples(sample_rate_hz);
        if samples_per_chip < MIN_DECODE_SAMPLES_PER_CHIP {
            Err(DecodeError::SampleRateTooLow { samples_per_chip })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub payload: BitStream,
    pub crc_ok: bool,
    /// Payload followed by the received CRC bits.
    pub coded: BitStream,
    /// Reader-clock estimate of each coded bit's centre, made before that bit was examined.
    pub bit_center_estimates_us: Vec<f64>,
    /// Filled by [`DecodeResult::attach_truth`].
    pub per_bit_timing_error_us: Vec<f64>,
    pub iterations: usize,
    /// Mean best-match correlation; NaN for decoders without one.
    pub mean_quality: f64,
}

impl DecodeResult {
    fn from_coded(bits: Vec<u8>, estimates: Vec<f64>, iterations: usize, mean_quality: f64) -> Self {
        let coded = BitStream::new(bits).expect("decoders emit binary symbols");
        let (payload, crc_ok) = split_coded_bits(coded.as_slice()).unwrap_or((BitStream::empty(), false));
        Self {
            payload,
            crc_ok,
            coded,
            bit_center_estimates_us: estimates,
            per_bit_timing_error_us: Vec::new(),
            iterations,
            mean_quality,
        }
    }

    /// Records `estimate - truth` per coded bit.
    pub fn attach_truth(&mut self, true_centers_us: &[f64]) {
        self.per_bit_timing_error_us =
            self.bit_center_estimates_us.iter().zip(true_centers_us).map(|(e, t)| e - t).collect();
    }

    pub fn mean_abs_timing_error_us(&self) -> Option<f64> {
        if self.per_bit_timing_error_us.is_empty() {
            return None;
        }
        Some(
            self.per_bit_timing_error_us.iter().map(|e| e.abs()).sum::<f64>()
                / self.per_bit_timing_error_us.len() as f64,
        )
    }

    /// Differences against the transmitted payload ∥ crc bits.
    pub fn bit_errors(&self, truth: &BitStream) -> usize {
        let decoded = self.coded.as_slice();
        let truth = truth.as_slice();
        let common = decoded.len().min(truth.len());
        decoded[..common].iter().zip(&truth[..common]).filter(|(a, b)| a != b).count()
            + decoded.len().abs_diff(truth.len())
    }
}

/// Reader-clock centres of the coded bits in a (possibly retimed) chip train
/// that starts with the preamble: the mid-bit boundary of each bit.
pub fn true_bit_centers_us(train: &ChipTrain, coded_bits: usize) -> Vec<f64> {
    (0..coded_bits).map(|i| train.boundaries_us[PREAMBLE_CHIPS.len() + 2 * i + 1]).collect()
}

/// Decoders compared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecoderKind {
    SlidingWindow,
    Averaging,
    Edge,
    SingleSymbol,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 4] = [Self::SlidingWindow, Self::Averaging, Self::Edge, Self::SingleSymbol];

    pub fn name(self) -> &'static str {
        match self {
            Self::SlidingWindow => "swmsmf",
            Self::Averaging => "average",
            Self::Edge => "edge",
            Self::SingleSymbol => "single_symbol",
        }
    }

    pub fn decode(self, wave: &BasebandWaveform, cfg: &DecoderConfig) -> Result<DecodeResult, DecodeError> {
        match self {
            Self::SlidingWindow => {
                let bank = TemplateBank::new(cfg.chip_samples(wave.sample_rate_hz()).round() as usize);
                decode_swmsmf(wave, &bank, cfg)
            }
            Self::Averaging => decode_baseline_average(wave, cfg),
            Self::Edge => decode_baseline_edge(wave, cfg),
            Self::SingleSymbol => decode_baseline_single_symbol(wave, cfg),
        }
    }
}
