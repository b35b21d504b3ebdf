//! Conventional decoders that the sliding-window filter is compared against.
//!
//! All three share preamble detection with the main decoder and then run on
//! a fixed nominal clock (`clock_ratio_prior`) unless they track timing
//! themselves.

use super::correlate::{chip_segment_sums, Integrator, Template, WindowStats};
use super::preamble::detect_with;
use super::swmsmf::nominal_bit_center_us;
use super::{DecodeError, DecodeResult, DecoderConfig};
use crate::signal::BasebandWaveform;

struct Prepared {
    integ: Integrator,
    to_samples: f64,
    origin_us: f64,
}

fn prepare(wave: &BasebandWaveform, cfg: &DecoderConfig) -> Result<Prepared, DecodeError> {
    cfg.check_rate(wave.sample_rate_hz())?;
    let integ = Integrator::new(wave.samples());
    let to_samples = wave.sample_rate_hz() / 1e6;
    let preamble = detect_with(&integ, wave.sample_rate_hz(), cfg)?;
    Ok(Prepared { integ, to_samples, origin_us: preamble.position / to_samples })
}

fn nominal_center_us(p: &Prepared, i: usize, cfg: &DecoderConfig) -> f64 {
    p.origin_us + cfg.clock_ratio_prior * nominal_bit_center_us(i, cfg.chip_period_us)
}

fn check_fits(p: &Prepared, end_us: f64, bit: usize) -> Result<(), DecodeError> {
    if end_us * p.to_samples > p.integ.len() as f64 {
        Err(DecodeError::FrameTruncated { bit })
    } else {
        Ok(())
    }
}

/// Chip slicing against a running-mean threshold, then Manchester decoding.
///
/// Each chip's value is the mean over its middle half; the threshold is the
/// sample mean over `averaging_window_bits` centred on the chip. A pair that
/// is not a Manchester symbol is resolved by its second chip.
pub fn decode_baseline_average(wave: &BasebandWaveform, cfg: &DecoderConfig) -> Result<DecodeResult, DecodeError> {
    let p = prepare(wave, cfg)?;
    let chip_us = cfg.clock_ratio_prior * cfg.chip_period_us;
    let half_window_us = cfg.averaging_window_bits as f64 * chip_us;
    let n = p.integ.len() as f64;
    let n_bits = cfg.coded_bits();
    let mut bits = Vec::with_capacity(n_bits);
    let mut estimates = Vec::with_capacity(n_bits);

    let slice = |center_us: f64| -> u8 {
        let c = center_us * p.to_samples;
        let half = 0.25 * chip_us * p.to_samples;
        let value = p.integ.integral(c - half, c + half) / (2.0 * half);
        let lo = (c - half_window_us * p.to_samples).max(0.0);
        let hi = (c + half_window_us * p.to_samples).min(n);
        let threshold = p.integ.integral(lo, hi) / (hi - lo);
        u8::from(value > threshold)
    };

    for i in 0..n_bits {
        let center = nominal_center_us(&p, i, cfg);
        check_fits(&p, center + chip_us, i)?;
        estimates.push(center);
        let first = slice(center - 0.5 * chip_us);
        let second = slice(center + 0.5 * chip_us);
        bits.push(match (first, second) {
            (0, 1) => 1,
            (1, 0) => 0,
            (_, s) => s,
        });
    }
    Ok(DecodeResult::from_coded(bits, estimates, n_bits, f64::NAN))
}

/// Differentiator plus peak picking: transitions are the extrema of a
/// smoothed derivative, and each bit is read from the polarity of the
/// transition nearest its expected mid-bit time. Each found transition
/// re-anchors the expected time of the next one.
pub fn decode_baseline_edge(wave: &BasebandWaveform, cfg: &DecoderConfig) -> Result<DecodeResult, DecodeError> {
    let p = prepare(wave, cfg)?;
    let x = wave.samples();
    let chip_us = cfg.clock_ratio_prior * cfg.chip_period_us;
    let chip_samples = chip_us * p.to_samples;
    let h = ((chip_samples / 4.0).round() as usize).max(1);
    let n_bits = cfg.coded_bits();

    let first_center = nominal_center_us(&p, 0, cfg);
    let last_center = nominal_center_us(&p, n_bits.saturating_sub(1), cfg);
    check_fits(&p, last_center + chip_us, n_bits.saturating_sub(1))?;
    let lo = ((first_center - 2.0 * chip_us) * p.to_samples).max(h as f64) as usize;
    let hi = (((last_center + 2.0 * chip_us) * p.to_samples) as usize).min(x.len().saturating_sub(h + 1));

    // Smoothed derivative: mean of the next h samples minus mean of the previous h.
    let mut deriv = vec![0.0; x.len()];
    for n in lo..=hi {
        let ahead: f64 = x[n..n + h].iter().sum();
        let behind: f64 = x[n - h..n].iter().sum();
        deriv[n] = (ahead - behind) / h as f64;
    }
    let peak_mag = deriv[lo..=hi].iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let threshold = 0.5 * peak_mag;

    // Local extrema of |d| above threshold, thinned to one per h samples.
    let mut edges: Vec<(f64, i8)> = Vec::new();
    for n in lo + 1..hi {
        let m = deriv[n].abs();
        if m >= threshold && m >= deriv[n - 1].abs() && m > deriv[n + 1].abs() {
            let t = n as f64 / p.to_samples;
            let sign = if deriv[n] > 0.0 { 1 } else { -1 };
            match edges.last() {
                Some(&(last, _)) if (t - last) * p.to_samples < h as f64 => {
                    let last_n = (last * p.to_samples).round() as usize;
                    if m > deriv[last_n].abs() {
                        edges.pop();
                        edges.push((t, sign));
                    }
                }
                _ => edges.push((t, sign)),
            }
        }
    }

    let mut bits = Vec::with_capacity(n_bits);
    let mut estimates = Vec::with_capacity(n_bits);
    let mut expected = first_center;
    for _ in 0..n_bits {
        estimates.push(expected);
        let nearest = edges
            .iter()
            .filter(|(t, _)| (t - expected).abs() <= 0.5 * chip_us)
            .min_by(|a, b| (a.0 - expected).abs().total_cmp(&(b.0 - expected).abs()));
        match nearest {
            Some(&(t, sign)) => {
                bits.push(u8::from(sign > 0));
                expected = t + 2.0 * chip_us;
            }
            None => {
                bits.push(0);
                expected += 2.0 * chip_us;
            }
        }
    }
    Ok(DecodeResult::from_coded(bits, estimates, n_bits, f64::NAN))
}

/// One-bit matched filter: correlates a single Manchester symbol around the
/// expected bit centre, takes the sign of the strongest peak as the bit and
/// its position as the bit's timing, and expects the next bit one bit period
/// after that peak.
pub fn decode_baseline_single_symbol(
    wave: &BasebandWaveform,
    cfg: &DecoderConfig,
) -> Result<DecodeResult, DecodeError> {
    let p = prepare(wave, cfg)?;
    let chip_us = cfg.clock_ratio_prior * cfg.chip_period_us;
    let chip_len = chip_us * p.to_samples;
    let reach = cfg.search_chips * chip_len;
    let symbol = Template::new(&[-1.0, 1.0]);
    let n_bits = cfg.coded_bits();
    let mut bits = Vec::with_capacity(n_bits);
    let mut estimates = Vec::with_capacity(n_bits);
    let mut sums = Vec::with_capacity(2);
    let mut quality_sum = 0.0;

    let mut expected = nominal_center_us(&p, 0, cfg);
    for i in 0..n_bits {
        check_fits(&p, expected + chip_us + reach / p.to_samples, i)?;
        estimates.push(expected);
        let center = expected * p.to_samples;
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        let steps = (reach * 16.0).floor() as i64;
        for step in -steps..=steps {
            let delta = step as f64 / 16.0;
            let start = center + delta - chip_len;
            chip_segment_sums(&p.integ, start, chip_len, 2, &mut sums);
            let r = WindowStats::new(&p.integ, start, chip_len, &sums).pearson(&symbol, &sums);
            if r.abs() > best.0 {
                best = (r.abs(), r, delta);
            }
        }
        bits.push(u8::from(best.1 > 0.0));
        quality_sum += best.0;
        expected = (center + best.2) / p.to_samples + 2.0 * chip_us;
    }
    Ok(DecodeResult::from_coded(bits, estimates, n_bits, quality_sum / n_bits.max(1) as f64))
}
