//! Distortion corpus for comparing decoders.
//!
//! Six cases: an undistorted frame, the four AGC/ambient distortions of the
//! reader's baseband (top/bottom truncation, average drift) plus heavy LCD
//! memory, and a tag clock running 1% slow. Every case carries 4-byte
//! payloads at 16 samples per chip with additive noise at a chosen SNR.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{apply_channel, retime_chip_train, ChannelConfig, ChannelError, GeometryConfig};
use crate::decoder::{detect_preamble, true_bit_centers_us, DecoderConfig};
use crate::signal::{
    build_frame, render_chip_train, uplink_chip_train, BasebandWaveform, BitStream, LcdShapingParams, SignalError,
    DEFAULT_CHIP_PERIOD_US, LEAD_IDLE_CHIPS, TAIL_IDLE_CHIPS,
};

pub const FIXTURE_SAMPLE_RATE_HZ: f64 = 16_000.0;
pub const FIXTURE_PAYLOAD_BYTES: usize = 4;
/// SNR and seed of the corpus written to disk.
pub const CORPUS_SNR_DB: f64 = 20.0;
pub const CORPUS_SEED: u64 = 20_150_907;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixtureCase {
    Normal,
    TopTruncated,
    BottomTruncated,
    AvgDrifted,
    LcdSawtooth,
    ClockDrift1Pct,
}

impl FixtureCase {
    pub const ALL: [FixtureCase; 6] = [
        Self::Normal,
        Self::TopTruncated,
        Self::BottomTruncated,
        Self::AvgDrifted,
        Self::LcdSawtooth,
        Self::ClockDrift1Pct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Normal => "normal",
            Self::TopTruncated => "top_truncated",
            Self::BottomTruncated => "bottom_truncated",
            Self::AvgDrifted => "avg_drifted",
            Self::LcdSawtooth => "lcd_sawtooth",
            Self::ClockDrift1Pct => "clock_drift_1pct",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn shaping(self) -> LcdShapingParams {
        match self {
            Self::LcdSawtooth => LcdShapingParams::with_tau(0.5 * DEFAULT_CHIP_PERIOD_US),
            _ => LcdShapingParams::default(),
        }
    }

    /// Channel settings apart from noise, which is set from the SNR.
    pub fn channel(self) -> ChannelConfig {
        let base = ChannelConfig::ideal();
        match self {
            Self::Normal | Self::LcdSawtooth => base,
            Self::TopTruncated => ChannelConfig { clip_high: Some(0.3), ..base },
            Self::BottomTruncated => ChannelConfig { clip_low: Some(0.7), ..base },
            Self::AvgDrifted => ChannelConfig { drift_amplitude: 0.8, drift_freq_hz: 8.0, ..base },
            Self::ClockDrift1Pct => ChannelConfig { clock_ratio_k: 1.01, ..base },
        }
    }

    /// `0110` repeated for the LCD-memory case, random bytes otherwise.
    pub fn payload(self, rng: &mut impl Rng) -> BitStream {
        match self {
            Self::LcdSawtooth => BitStream::from_bytes(&[0x66; FIXTURE_PAYLOAD_BYTES]),
            _ => {
                let bytes: Vec<u8> = (0..FIXTURE_PAYLOAD_BYTES).map(|_| rng.random()).collect();
                BitStream::from_bytes(&bytes)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FixtureError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureWave {
    pub case: FixtureCase,
    pub wave: BasebandWaveform,
    /// Transmitted payload ∥ crc.
    pub coded_bits: BitStream,
    /// Reader-clock centres of the coded bits as keyed by the tag.
    pub true_centers_us: Vec<f64>,
    /// Delay of the received waveform behind the keyed chips: where the
    /// noiseless shaped preamble best matches its rectangular template.
    pub latency_us: f64,
}

impl FixtureWave {
    /// What the reader knows about the frame: chip period, nominal clock and length.
    pub fn decoder_config(&self) -> DecoderConfig {
        DecoderConfig::for_payload_bytes(FIXTURE_PAYLOAD_BYTES)
    }

    /// Bit centres as they appear in the received waveform.
    pub fn received_centers_us(&self) -> Vec<f64> {
        self.true_centers_us.iter().map(|t| t + self.latency_us).collect()
    }
}

/// One seeded instance of `case` at `snr_db` (noise sigma against the clean waveform's spread).
pub fn fixture_wave(case: FixtureCase, seed: u64, snr_db: f64) -> Result<FixtureWave, FixtureError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let payload = case.payload(&mut rng);
    let frame = build_frame(&payload, DEFAULT_CHIP_PERIOD_US)?;
    let chip = DEFAULT_CHIP_PERIOD_US;
    let mut channel = case.channel();
    let train = retime_chip_train(&uplink_chip_train(&frame, LEAD_IDLE_CHIPS as f64 * chip), &channel)?;
    let clean = render_chip_train(
        &train,
        &case.shaping(),
        FIXTURE_SAMPLE_RATE_HZ,
        train.end_us() + TAIL_IDLE_CHIPS as f64 * chip,
    )?;

    let preamble = detect_preamble(&clean, &DecoderConfig::for_payload_bytes(FIXTURE_PAYLOAD_BYTES))
        .expect("noiseless preamble is always found");
    let latency_us = preamble.position * clean.sample_period_us() - train.start_us();

    channel.awgn_sigma = crate::channel::awgn_sigma_for_snr(clean.std_dev(), snr_db);
    channel.seed = rng.random();
    let wave = apply_channel(&clean, &channel, &GeometryConfig::default())?;
    let coded_bits = frame.coded_bits();
    let true_centers_us = true_bit_centers_us(&train, coded_bits.len());
    Ok(FixtureWave { case, wave, coded_bits, true_centers_us, latency_us })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::DecoderKind;

    #[test]
    fn names_round_trip() {
        for c in FixtureCase::ALL {
            assert_eq!(FixtureCase::from_name(c.name()), Some(c));
        }
        assert_eq!(FixtureCase::from_name("nope"), None);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = fixture_wave(FixtureCase::AvgDrifted, 7, 15.0).unwrap();
        let b = fixture_wave(FixtureCase::AvgDrifted, 7, 15.0).unwrap();
        let c = fixture_wave(FixtureCase::AvgDrifted, 8, 15.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.wave, c.wave);
    }

    #[test]
    fn truncation_flattens() {
        let top = fixture_wave(FixtureCase::TopTruncated, 1, 20.0).unwrap();
        assert!(top.wave.samples().iter().all(|&s| s <= 0.3));
        let bottom = fixture_wave(FixtureCase::BottomTruncated, 1, 20.0).unwrap();
        assert!(bottom.wave.samples().iter().all(|&s| s >= 0.7));
    }

    #[test]
    fn corpus_decodes_exactly_at_20db() {
        for case in FixtureCase::ALL {
            let f = fixture_wave(case, CORPUS_SEED, CORPUS_SNR_DB).unwrap();
            let r = DecoderKind::SlidingWindow.decode(&f.wave, &f.decoder_config()).unwrap();
            assert_eq!(r.coded, f.coded_bits, "{}", case.name());
            assert!(r.crc_ok);
        }
    }
}
