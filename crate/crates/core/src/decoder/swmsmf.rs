//! Sliding-window multi-symbol matched filter.
//!
//! After the preamble, every coded bit is decoded from a three-bit window
//! centred on it:
//!
//! 1. *Template matching*: the window is correlated against all eight ±1
//!    templates over a small range of alignments; the best (template,
//!    alignment) pair yields the middle bit and the measured window centre.
//! 2. *Local time recovery*: the measured centre updates the clock ratio via
//!    the line through the preamble anchor, which predicts the next centre.
//!    The window then slides one bit forward.

use super::correlate::{chip_segment_sums, Integrator, Template, WindowStats};
use super::preamble::detect_with;
use super::recovery::TimeRecoveryState;
use super::templates::head_levels;
use super::{DecodeError, DecodeResult, DecoderConfig, TemplateBank};
use crate::signal::{BasebandWaveform, PREAMBLE_CHIPS};

/// Coarse and fine alignment steps, in samples.
const COARSE_STEP: f64 = 0.5;
const FINE_STEP: f64 = 1.0 / 16.0;

struct Candidate {
    bit: u8,
    template: Template,
}

/// Tag-clock time of coded bit `i`'s centre, measured from the preamble start.
pub fn nominal_bit_center_us(i: usize, chip_period_us: f64) -> f64 {
    (PREAMBLE_CHIPS.len() + 2 * i + 1) as f64 * chip_period_us
}

pub fn decode_swmsmf(
    wave: &BasebandWaveform,
    bank: &TemplateBank,
    cfg: &DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    cfg.check_rate(wave.sample_rate_hz())?;
    let integ = Integrator::new(wave.samples());
    let fs = wave.sample_rate_hz();
    let to_samples = fs / 1e6;
    let preamble = detect_with(&integ, fs, cfg)?;

    let mut state = TimeRecoveryState::new(preamble.position / to_samples, cfg.clock_ratio_prior);
    if cfg.least_squares {
        state = state.with_least_squares();
    }

    let regular: Vec<Candidate> =
        (0..8).map(|v| Candidate { bit: bank.patterns()[v][1], template: Template::new(bank.levels(v)) }).collect();
    let head: Vec<Candidate> = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .iter()
        .map(|&(m, r)| Candidate { bit: m, template: Template::new(&head_levels(m, r)) })
        .collect();

    let n_bits = cfg.coded_bits();
    let mut bits = Vec::with_capacity(n_bits);
    let mut estimates = Vec::with_capacity(n_bits);
    let mut quality_sum = 0.0;
    let mut sums = Vec::with_capacity(6);
    let mut last_center = f64::NEG_INFINITY;

    for i in 0..n_bits {
        let tag_center = nominal_bit_center_us(i, cfg.chip_period_us);
        let predicted_us = state.predict(tag_center);
        estimates.push(predicted_us);

        let chip_len = state.clock_ratio * cfg.chip_period_us * to_samples;
        let center = predicted_us * to_samples;
        let reach = cfg.search_chips * chip_len;
        if center + 3.0 * chip_len + reach > integ.len() as f64 {
            return Err(DecodeError::FrameTruncated { bit: i });
        }
        let candidates = if i == 0 { &head } else { &regular };

        // Coarse joint search over template and alignment.
        let mut best = (f64::NEG_INFINITY, 0usize, 0.0f64);
        let steps = (reach / COARSE_STEP).floor() as i64;
        for step in -steps..=steps {
            let delta = step as f64 * COARSE_STEP;
            let start = center + delta - 3.0 * chip_len;
            chip_segment_sums(&integ, start, chip_len, 6, &mut sums);
            let stats = WindowStats::new(&integ, start, chip_len, &sums);
            for (c, cand) in candidates.iter().enumerate() {
                let r = stats.pearson(&cand.template, &sums);
                if r > best.0 {
                    best = (r, c, delta);
                }
            }
        }

        // Fine alignment for the winning template.
        let winner = &candidates[best.1];
        let (mut quality, mut delta) = (best.0, best.2);
        let fine_steps = (0.5 * COARSE_STEP / FINE_STEP) as i64;
        for step in -fine_steps..=fine_steps {
            let d = best.2 + step as f64 * FINE_STEP;
            if d.abs() > reach {
                continue;
            }
            let start = center + d - 3.0 * chip_len;
            chip_segment_sums(&integ, start, chip_len, 6, &mut sums);
            let r = WindowStats::new(&integ, start, chip_len, &sums).pearson(&winner.template, &sums);
            if r > quality {
                quality = r;
                delta = d;
            }
        }

        bits.push(winner.bit);
        quality_sum += quality;
        let observed_us = (center + delta) / to_samples;
        debug_assert!(observed_us > last_center);
        last_center = observed_us;
        if quality >= cfg.min_regression_quality {
            state.observe(tag_center, observed_us);
        }
    }

    Ok(DecodeResult::from_coded(bits, estimates, n_bits, quality_sum / n_bits.max(1) as f64))
}
