use super::correlate::{chip_template_pearson, Integrator, Template, WindowStats};
use super::{DecodeError, DecoderConfig};
use crate::signal::{BasebandWaveform, IDLE_LEVEL, PREAMBLE_CHIPS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreambleDetection {
    /// Sample index of the first preamble chip.
    pub index: usize,
    /// Sub-sample refinement of `index`.
    pub position: f64,
    /// Peak normalized correlation, in [-1, 1].
    pub quality: f64,
}

/// Levels of the preamble template: one idle chip, then the preamble.
pub(crate) fn preamble_template() -> Vec<f64> {
    std::iter::once(IDLE_LEVEL).chain(PREAMBLE_CHIPS).map(|c| if c == 1 { 1.0 } else { -1.0 }).collect()
}

/// Correlates the idle-to-preamble template against every alignment and
/// returns the global peak.
pub fn detect_preamble(wave: &BasebandWaveform, cfg: &DecoderConfig) -> Result<PreambleDetection, DecodeError> {
    let integ = Integrator::new(wave.samples());
    detect_with(&integ, wave.sample_rate_hz(), cfg)
}

pub(crate) fn detect_with(
    integ: &Integrator,
    sample_rate_hz: f64,
    cfg: &DecoderConfig,
) -> Result<PreambleDetection, DecodeError> {
    let chip_len = cfg.chip_samples(sample_rate_hz) * cfg.clock_ratio_prior;
    let template = Template::new(&preamble_template());
    let lead = chip_len;
    let span = chip_len * template.chips() as f64;
    let n = integ.len();
    if (n as f64) < span + 1.0 {
        return Err(DecodeError::WaveformTooShort);
    }
    let first = lead.ceil() as usize;
    let last = (n as f64 - (span - lead)).floor() as usize;

    let mut scratch = Vec::with_capacity(template.chips());
    let whole = chip_len.round();
    let scores: Vec<f64> = if (chip_len - whole).abs() < 1e-9 && whole >= 1.0 {
        // Chip boundaries fall on samples: every chip sum is a table lookup.
        let len = whole as usize;
        let (chip_sums, chip_sq) = integ.block_sums(len);
        (first..=last)
            .map(|u| {
                scratch.clear();
                scratch.extend((0..template.chips()).map(|j| chip_sums[u - len + j * len]));
                let energy: f64 = (0..template.chips()).map(|j| chip_sq[u - len + j * len]).sum();
                WindowStats::from_energy(energy, chip_len, &scratch).pearson(&template, &scratch)
            })
            .collect()
    } else {
        (first..=last)
            .map(|u| chip_template_pearson(integ, u as f64 - lead, chip_len, &template, &mut scratch))
            .collect()
    };
    let (best, &quality) = scores
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("non-empty search range");

    if quality < cfg.preamble_threshold {
        return Err(DecodeError::PreambleMissing { quality });
    }
    let index = first + best;
    let position = index as f64 + parabolic_offset(&scores, best);
    Ok(PreambleDetection { index, position, quality })
}

/// Vertex offset of the parabola through the peak and its neighbours, in [-0.5, 0.5].
pub(crate) fn parabolic_offset(scores: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= scores.len() {
        return 0.0;
    }
    let (a, b, c) = (scores[i - 1], scores[i], scores[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom.abs() < 1e-15 {
        return 0.0;
    }
    (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}
