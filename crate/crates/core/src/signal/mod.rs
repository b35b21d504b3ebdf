//! Logical-layer codecs and framing shared by both link directions.

mod bits;
pub mod clock_period;
mod crc;
mod frame;
mod waveform;

pub use bits::{manchester_decode, manchester_encode, BitStream, ChipSequence};
pub use clock_period::{clock_period_decode, clock_period_encode};
pub use crc::{crc8, crc8_check, CRC8_POLY};
pub use frame::{build_frame, split_coded_bits, Frame, DEFAULT_CHIP_PERIOD_US, FLUSH_BIT, IDLE_LEVEL, PREAMBLE_CHIPS};
pub use waveform::{
    render_chip_train, synthesize_uplink_waveform, uplink_chip_train, BasebandWaveform, ChipTrain, LcdShapingParams,
    LEAD_IDLE_CHIPS, MIN_SAMPLES_PER_CHIP, TAIL_IDLE_CHIPS,
};

pub(crate) use bits::manchester_pair;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("element {index} is {value}, expected 0 or 1")]
    InvalidBit { index: usize, value: u8 },
    #[error("invalid Manchester chip pair at chip {0}")]
    InvalidChipPair(usize),
    #[error("odd chip count {0}")]
    OddLength(usize),
    #[error("odd bit count {0} for clock-period coding")]
    OddBitCount(usize),
    #[error("period {value} us at index {index} matches no symbol")]
    UnclassifiablePeriod { index: usize, value: f64 },
    #[error("tolerance {0} us must be in [0, 5)")]
    InvalidTolerance(f64),
    #[error("payload of {0} bits is not byte aligned")]
    PayloadNotByteAligned(usize),
    #[error("chip period {0} us must be positive")]
    InvalidChipPeriod(f64),
    #[error("sample rate {0} Hz must be positive")]
    InvalidSampleRate(f64),
    #[error("sample rate {sample_rate_hz} Hz is below 10x the chip rate {chip_rate_hz} Hz")]
    SampleRateTooLow { sample_rate_hz: f64, chip_rate_hz: f64 },
    #[error("non-finite sample at {0}")]
    NonFiniteSample(usize),
    #[error("LCD shaping needs non-negative time constants and v_high > v_low")]
    InvalidShaping,
    #[error("chip boundaries must be non-negative, strictly increasing and one longer than the levels")]
    InvalidChipTrain,
}
