//! Correlation of piecewise-constant templates against a sampled signal.
//!
//! Every template in this crate is a run of constant-valued chips, so its
//! correlation with the signal reduces to a signed sum of per-chip integrals.
//! Those come from running sums, interpolated linearly inside a sample, which
//! lets chip boundaries sit at fractional sample positions (stretched or
//! shifted templates) at O(1) cost per chip.

/// Running sums of a signal and its square. Positions are in samples; sample
/// `n` covers `[n, n + 1)`.
#[derive(Debug, Clone)]
pub(crate) struct Integrator {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    samples: Vec<f64>,
}

impl Integrator {
    pub fn new(samples: &[f64]) -> Self {
        let mut sum = Vec::with_capacity(samples.len() + 1);
        let mut sum_sq = Vec::with_capacity(samples.len() + 1);
        let (mut a, mut b) = (0.0, 0.0);
        sum.push(0.0);
        sum_sq.push(0.0);
        for &x in samples {
            a += x;
            b += x * x;
            sum.push(a);
            sum_sq.push(b);
        }
        Self { sum, sum_sq, samples: samples.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    fn interp(&self, table: &[f64], u: f64, square: bool) -> f64 {
        let n = self.samples.len();
        if u <= 0.0 {
            return 0.0;
        }
        if u >= n as f64 {
            return table[n];
        }
        // u > 0 here, so truncation is floor
        let i = u as usize;
        let frac = u - i as f64;
        let x = self.samples[i];
        table[i] + frac * if square { x * x } else { x }
    }

    /// Integral of the signal over `[0, u)`.
    pub fn cumulative(&self, u: f64) -> f64 {
        self.interp(&self.sum, u, false)
    }

    /// Integral of the signal over `[a, b)`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.interp(&self.sum, b, false) - self.interp(&self.sum, a, false)
    }

    pub fn integral_sq(&self, a: f64, b: f64) -> f64 {
        self.interp(&self.sum_sq, b, true) - self.interp(&self.sum_sq, a, true)
    }

    /// Sums over `[i, i + len)` for every whole-sample start `i`.
    pub fn block_sums(&self, len: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.samples.len();
        if len > n {
            return (Vec::new(), Vec::new());
        }
        (0..=n - len).map(|i| (self.sum[i + len] - self.sum[i], self.sum_sq[i + len] - self.sum_sq[i])).unzip()
    }
}

/// A chip template with its mean removed and its norm precomputed.
#[derive(Debug, Clone)]
pub(crate) struct Template {
    centered: Vec<f64>,
    inv_norm: f64,
}

impl Template {
    pub fn new(levels: &[f64]) -> Self {
        let mean = levels.iter().sum::<f64>() / levels.len() as f64;
        let centered: Vec<f64> = levels.iter().map(|l| l - mean).collect();
        let energy: f64 = centered.iter().map(|c| c * c).sum();
        let inv_norm = if energy > f64::EPSILON { energy.sqrt().recip() } else { 0.0 };
        Self { centered, inv_norm }
    }

    pub fn chips(&self) -> usize {
        self.centered.len()
    }
}

/// Pearson correlation between the signal and a template of equal-length
/// chips starting at `start`, each `chip_len` samples long.
///
/// `segment_sums` is scratch space reused across calls.
pub(crate) fn chip_template_pearson(
    integ: &Integrator,
    start: f64,
    chip_len: f64,
    template: &Template,
    segment_sums: &mut Vec<f64>,
) -> f64 {
    chip_segment_sums(integ, start, chip_len, template.chips(), segment_sums);
    WindowStats::new(integ, start, chip_len, segment_sums).pearson(template, segment_sums)
}

pub(crate) fn chip_segment_sums(integ: &Integrator, start: f64, chip_len: f64, chips: usize, out: &mut Vec<f64>) {
    out.clear();
    let mut prev = integ.cumulative(start);
    for j in 1..=chips {
        let next = integ.cumulative(start + j as f64 * chip_len);
        out.push(next - prev);
        prev = next;
    }
}

/// Normalisation of a window, shared by every template tested at the same
/// alignment.
pub(crate) struct WindowStats {
    inv_norm: f64,
}

impl WindowStats {
    pub fn new(integ: &Integrator, start: f64, chip_len: f64, segment_sums: &[f64]) -> Self {
        let width = chip_len * segment_sums.len() as f64;
        Self::from_energy(integ.integral_sq(start, start + width), chip_len, segment_sums)
    }

    /// `energy` is the integral of the squared signal over the window.
    pub fn from_energy(energy: f64, chip_len: f64, segment_sums: &[f64]) -> Self {
        let width = chip_len * segment_sums.len() as f64;
        let total: f64 = segment_sums.iter().sum();
        let scaled = (energy - total * total / width).max(0.0) * chip_len;
        Self { inv_norm: if scaled > f64::EPSILON { scaled.sqrt().recip() } else { 0.0 } }
    }

    pub fn pearson(&self, template: &Template, segment_sums: &[f64]) -> f64 {
        let dot: f64 = template.centered.iter().zip(segment_sums).map(|(c, s)| c * s).sum();
        dot * template.inv_norm * self.inv_norm
    }
}
