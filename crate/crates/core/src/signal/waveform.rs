//! Baseband waveforms and LCD-shaped uplink synthesis.
//!
//! The LCD behaves like an RC load: during a high chip the reflected level
//! approaches `v_high` with `tau_charge_us`, during a low chip it decays
//! toward `v_low` with `tau_discharge_us`. State carries across chips, so two
//! consecutive equal chips differ in level. Samples are area averages over
//! their interval `[n/fs, (n+1)/fs)`, computed in closed form.

use super::frame::{Frame, IDLE_LEVEL};
use super::SignalError;

/// Uniformly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandWaveform {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl BasebandWaveform {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self, SignalError> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(SignalError::InvalidSampleRate(sample_rate_hz));
        }
        if let Some(index) = samples.iter().position(|s| !s.is_finite()) {
            return Err(SignalError::NonFiniteSample(index));
        }
        Ok(Self { samples, sample_rate_hz })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_us(&self) -> f64 {
        self.samples.len() as f64 * self.sample_period_us()
    }

    pub fn sample_period_us(&self) -> f64 {
        1e6 / self.sample_rate_hz
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Replaces the samples, keeping the rate. Non-finite values are rejected.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self, SignalError> {
        Self::new(samples, self.sample_rate_hz)
    }

    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn std_dev(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let m = self.mean();
        (self.samples.iter().map(|s| (s - m).powi(2)).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    /// Prepends `count` copies of the first sample (or `fill` when empty).
    pub fn delayed(&self, count: usize, fill: f64) -> Self {
        let lead = self.samples.first().copied().unwrap_or(fill);
        let mut samples = vec![lead; count];
        samples.extend_from_slice(&self.samples);
        Self { samples, sample_rate_hz: self.sample_rate_hz }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcdShapingParams {
    pub tau_charge_us: f64,
    pub tau_discharge_us: f64,
    pub v_high: f64,
    pub v_low: f64,
}

impl Default for LcdShapingParams {
    fn default() -> Self {
        Self { tau_charge_us: 150.0, tau_discharge_us: 250.0, v_high: 1.0, v_low: 0.0 }
    }
}

impl LcdShapingParams {
    /// Ideal rectangular chips (both time constants zero).
    pub fn rectangular() -> Self {
        Self { tau_charge_us: 0.0, tau_discharge_us: 0.0, ..Self::default() }
    }

    pub fn with_tau(tau_us: f64) -> Self {
        Self { tau_charge_us: tau_us, tau_discharge_us: tau_us, ..Self::default() }
    }

    /// Zero time constants are accepted and mean an instantaneous transition.
    pub fn validate(&self) -> Result<(), SignalError> {
        let ok = self.tau_charge_us >= 0.0
            && self.tau_discharge_us >= 0.0
            && self.tau_charge_us.is_finite()
            && self.tau_discharge_us.is_finite()
            && self.v_high.is_finite()
            && self.v_low.is_finite()
            && self.v_high > self.v_low;
        if ok {
            Ok(())
        } else {
            Err(SignalError::InvalidShaping)
        }
    }

    fn rail(&self, level: u8) -> f64 {
        if level == 1 {
            self.v_high
        } else {
            self.v_low
        }
    }

    fn tau(&self, level: u8) -> f64 {
        if level == 1 {
            self.tau_charge_us
        } else {
            self.tau_discharge_us
        }
    }
}

/// Chip levels pinned to explicit boundary times on the reader clock.
///
/// `boundaries_us[i]..boundaries_us[i + 1]` is chip `i`; outside the train the
/// line sits at the idle level.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipTrain {
    pub levels: Vec<u8>,
    pub boundaries_us: Vec<f64>,
}

impl ChipTrain {
    pub fn uniform(levels: Vec<u8>, start_us: f64, chip_period_us: f64) -> Self {
        let boundaries_us = (0..=levels.len()).map(|i| start_us + i as f64 * chip_period_us).collect();
        Self { levels, boundaries_us }
    }

    pub fn start_us(&self) -> f64 {
        self.boundaries_us.first().copied().unwrap_or(0.0)
    }

    pub fn end_us(&self) -> f64 {
        self.boundaries_us.last().copied().unwrap_or(0.0)
    }

    fn validate(&self) -> Result<(), SignalError> {
        let ordered = self.boundaries_us.windows(2).all(|w| w[1] > w[0]);
        if self.boundaries_us.len() != self.levels.len() + 1 || !ordered || self.start_us() < 0.0 {
            return Err(SignalError::InvalidChipTrain);
        }
        Ok(())
    }
}

/// Idle chips before the preamble and after the flush bit.
pub const LEAD_IDLE_CHIPS: usize = 2;
pub const TAIL_IDLE_CHIPS: usize = 2;

/// Minimum ratio of sample rate to chip rate.
pub const MIN_SAMPLES_PER_CHIP: f64 = 10.0;

/// Nominal timing of a frame's line chips, starting after `lead_us` of idle.
pub fn uplink_chip_train(frame: &Frame, lead_us: f64) -> ChipTrain {
    ChipTrain::uniform(frame.line_chips(), lead_us, frame.chip_period_us())
}

pub fn synthesize_uplink_waveform(
    frame: &Frame,
    shaping: &LcdShapingParams,
    sample_rate_hz: f64,
) -> Result<BasebandWaveform, SignalError> {
    let chip = frame.chip_period_us();
    check_sample_rate(sample_rate_hz, chip)?;
    let train = uplink_chip_train(frame, LEAD_IDLE_CHIPS as f64 * chip);
    let duration = train.end_us() + TAIL_IDLE_CHIPS as f64 * chip;
    render_chip_train(&train, shaping, sample_rate_hz, duration)
}

fn check_sample_rate(sample_rate_hz: f64, chip_period_us: f64) -> Result<(), SignalError> {
    let chip_rate = 1e6 / chip_period_us;
    if !(sample_rate_hz >= MIN_SAMPLES_PER_CHIP * chip_rate) {
        return Err(SignalError::SampleRateTooLow { sample_rate_hz, chip_rate_hz: chip_rate });
    }
    Ok(())
}

/// Renders `train` to `duration_us` of samples, starting from the idle rail at t = 0.
pub fn render_chip_train(
    train: &ChipTrain,
    shaping: &LcdShapingParams,
    sample_rate_hz: f64,
    duration_us: f64,
) -> Result<BasebandWaveform, SignalError> {
    shaping.validate()?;
    train.validate()?;
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(SignalError::InvalidSampleRate(sample_rate_hz));
    }

    // Segments of constant target level: idle, each chip, idle.
    let mut segments: Vec<(f64, f64, u8)> = Vec::with_capacity(train.levels.len() + 2);
    segments.push((0.0, train.start_us(), IDLE_LEVEL));
    for (i, &level) in train.levels.iter().enumerate() {
        segments.push((train.boundaries_us[i], train.boundaries_us[i + 1], level));
    }
    segments.push((train.end_us(), f64::INFINITY, IDLE_LEVEL));

    let dt = 1e6 / sample_rate_hz;
    let n = (duration_us / dt).round().max(0.0) as usize;
    let mut samples = Vec::with_capacity(n);
    let mut seg = 0usize;
    let mut seg_start_value = shaping.rail(IDLE_LEVEL);

    for k in 0..n {
        let a = k as f64 * dt;
        let b = a + dt;
        let mut acc = 0.0;
        let mut p = a;
        while p < b {
            let (s0, s1, level) = segments[seg];
            let q = b.min(s1);
            if q > p {
                acc += segment_integral(shaping, level, s0, seg_start_value, p, q);
            }
            if s1 <= b {
                seg_start_value = segment_value(shaping, level, s0, seg_start_value, s1);
                seg += 1;
                p = s1;
            } else {
                break;
            }
        }
        samples.push(acc / dt);
    }
    BasebandWaveform::new(samples, sample_rate_hz)
}

fn segment_value(shaping: &LcdShapingParams, level: u8, s0: f64, x0: f64, t: f64) -> f64 {
    let rail = shaping.rail(level);
    let tau = shaping.tau(level);
    if tau == 0.0 {
        return rail;
    }
    rail + (x0 - rail) * (-(t - s0) / tau).exp()
}

fn segment_integral(shaping: &LcdShapingParams, level: u8, s0: f64, x0: f64, p: f64, q: f64) -> f64 {
    let rail = shaping.rail(level);
    let tau = shaping.tau(level);
    if tau == 0.0 {
        return rail * (q - p);
    }
    rail * (q - p) + (x0 - rail) * tau * ((-(p - s0) / tau).exp() - (-(q - s0) / tau).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{build_frame, BitStream};
    use proptest::prelude::*;

    const CHIP: f64 = 1000.0;
    const FS: f64 = 16_000.0;

    fn chip_means(w: &BasebandWaveform, train: &ChipTrain) -> Vec<f64> {
        let dt = w.sample_period_us();
        train
            .boundaries_us
            .windows(2)
            .map(|b| {
                let lo = (b[0] / dt).round() as usize;
                let hi = (b[1] / dt).round() as usize;
                w.samples()[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
            })
            .collect()
    }

    fn render(levels: &[u8], shaping: LcdShapingParams) -> (BasebandWaveform, ChipTrain) {
        let train = ChipTrain::uniform(levels.to_vec(), 2.0 * CHIP, CHIP);
        let w = render_chip_train(&train, &shaping, FS, train.end_us() + CHIP).unwrap();
        (w, train)
    }

    #[test]
    fn second_low_chip_is_lower() {
        let (w, train) = render(&[1, 0, 0], LcdShapingParams::with_tau(CHIP));
        let m = chip_means(&w, &train);
        assert!(m[2] < m[1], "{m:?}");
    }

    #[test]
    fn second_high_chip_is_higher() {
        let (w, train) = render(&[0, 1, 1], LcdShapingParams::with_tau(CHIP));
        let m = chip_means(&w, &train);
        assert!(m[2] > m[1], "{m:?}");
    }

    #[test]
    fn zero_tau_is_rectangular() {
        let levels = [1, 0, 0, 1, 1, 0, 1];
        let (w, _) = render(&levels, LcdShapingParams::rectangular());
        let spc = (CHIP * FS / 1e6) as usize;
        let mut expected = vec![0.0; 2 * spc];
        for &l in &levels {
            expected.extend(std::iter::repeat(l as f64).take(spc));
        }
        expected.extend(std::iter::repeat(0.0).take(spc));
        assert_eq!(w.samples(), expected.as_slice());
    }

    #[test]
    fn tiny_tau_approaches_rectangular() {
        let levels = [1, 0, 1, 1, 0];
        let (rect, _) = render(&levels, LcdShapingParams::rectangular());
        let (near, _) = render(&levels, LcdShapingParams::with_tau(1e-3));
        let worst = rect.samples().iter().zip(near.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn fractional_boundaries_area_sample() {
        let train = ChipTrain { levels: vec![1], boundaries_us: vec![10.0 + 62.5 * 0.25, 10.0 + 62.5 * 10.75] };
        let w = render_chip_train(&train, &LcdShapingParams::rectangular(), FS, 62.5 * 12.0).unwrap();
        // boundary lands a quarter of the way into a sample
        let k = ((10.0 + 62.5 * 0.25) / 62.5) as usize;
        let frac = 1.0 - ((10.0 + 62.5 * 0.25) / 62.5 - k as f64);
        assert!((w.samples()[k] - frac).abs() < 1e-12);
    }

    #[test]
    fn rejects_low_sample_rate() {
        let f = build_frame(&BitStream::from_bytes(&[1]), CHIP).unwrap();
        let err = synthesize_uplink_waveform(&f, &LcdShapingParams::default(), 9_000.0).unwrap_err();
        assert!(matches!(err, SignalError::SampleRateTooLow { .. }));
        assert!(synthesize_uplink_waveform(&f, &LcdShapingParams::default(), 10_000.0).is_ok());
    }

    #[test]
    fn uplink_waveform_length() {
        let f = build_frame(&BitStream::from_bytes(&[1, 2, 3, 4]), CHIP).unwrap();
        let w = synthesize_uplink_waveform(&f, &LcdShapingParams::default(), FS).unwrap();
        let chips = LEAD_IDLE_CHIPS + f.line_chips().len() + TAIL_IDLE_CHIPS;
        assert_eq!(w.len(), chips * 16);
        assert!(w.samples().iter().all(|s| (0.0..=1.0).contains(s)));
    }

    proptest! {
        #[test]
        fn runs_of_equal_chips_move_toward_rail(
            bytes in proptest::collection::vec(any::<u8>(), 1..6),
            tau_frac in 0.1f64..2.0,
        ) {
            let f = build_frame(&BitStream::from_bytes(&bytes), CHIP).unwrap();
            let shaping = LcdShapingParams::with_tau(tau_frac * CHIP);
            let train = uplink_chip_train(&f, 2.0 * CHIP);
            let w = render_chip_train(&train, &shaping, FS, train.end_us() + CHIP).unwrap();
            let m = chip_means(&w, &train);
            for i in 1..train.levels.len() {
                if train.levels[i] == train.levels[i - 1] {
                    if train.levels[i] == 1 {
                        prop_assert!(m[i] > m[i - 1]);
                    } else {
                        prop_assert!(m[i] < m[i - 1]);
                    }
                }
            }
        }
    }
}
