//! Downlink clock-period coding: the interval between successive comparator
//! edges carries two bits.

use super::{BitStream, SignalError};

/// Nominal periods for the symbols 00, 01, 10, 11.
pub const SYMBOL_PERIODS_US: [f64; 4] = [185.0, 195.0, 205.0, 215.0];

/// Spacing between adjacent nominal periods.
pub const PERIOD_SPACING_US: f64 = 10.0;

pub const DEFAULT_TOLERANCE_US: f64 = 4.0;

pub fn clock_period_encode(bits: &BitStream) -> Result<Vec<f64>, SignalError> {
    let raw = bits.as_slice();
    if raw.len() % 2 != 0 {
        return Err(SignalError::OddBitCount(raw.len()));
    }
    Ok(raw.chunks_exact(2).map(|pair| SYMBOL_PERIODS_US[(pair[0] * 2 + pair[1]) as usize]).collect())
}

/// Nearest-bin decode. `tolerance_us` must be below half the bin spacing.
pub fn clock_period_decode(periods_us: &[f64], tolerance_us: f64) -> Result<BitStream, SignalError> {
    if !(tolerance_us >= 0.0 && tolerance_us < PERIOD_SPACING_US / 2.0) {
        return Err(SignalError::InvalidTolerance(tolerance_us));
    }
    let mut bits = Vec::with_capacity(periods_us.len() * 2);
    for (index, &value) in periods_us.iter().enumerate() {
        let symbol = SYMBOL_PERIODS_US
            .iter()
            .position(|&nominal| (value - nominal).abs() <= tolerance_us)
            .ok_or(SignalError::UnclassifiablePeriod { index, value })?;
        bits.push((symbol >> 1) as u8);
        bits.push((symbol & 1) as u8);
    }
    Ok(BitStream::from_trusted(bits))
}
