use crate::signal::manchester_pair;

/// The eight three-bit patterns and their ±1 matching templates.
///
/// A pattern's template is the Manchester chip sequence of its three bits
/// mapped to +1 (high) / -1 (low). Every Manchester bit has one high and one
/// low chip, so each template has zero mean over its support.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateBank {
    patterns: [[u8; 3]; 8],
    levels: [[f64; 6]; 8],
    samples_per_chip: usize,
}

impl TemplateBank {
    pub fn new(samples_per_chip: usize) -> Self {
        let mut patterns = [[0u8; 3]; 8];
        let mut levels = [[0f64; 6]; 8];
        for v in 0..8u8 {
            let pattern = [(v >> 2) & 1, (v >> 1) & 1, v & 1];
            patterns[v as usize] = pattern;
            levels[v as usize] = pattern_levels(pattern);
        }
        Self { patterns, levels, samples_per_chip }
    }

    pub fn patterns(&self) -> &[[u8; 3]; 8] {
        &self.patterns
    }

    /// Chip-rate template levels for pattern `index`.
    pub fn levels(&self, index: usize) -> &[f64; 6] {
        &self.levels[index]
    }

    pub fn samples_per_chip(&self) -> usize {
        self.samples_per_chip
    }

    /// Template `index` sampled at the bank's working rate: three bit periods long.
    pub fn sampled(&self, index: usize) -> Vec<f64> {
        self.levels[index].iter().flat_map(|&l| std::iter::repeat_n(l, self.samples_per_chip)).collect()
    }

    pub fn len(&self) -> usize {
        8
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the pattern `[left, middle, right]`.
    pub fn index_of(pattern: [u8; 3]) -> usize {
        ((pattern[0] << 2) | (pattern[1] << 1) | pattern[2]) as usize
    }
}

pub(crate) fn pattern_levels(pattern: [u8; 3]) -> [f64; 6] {
    let mut out = [0.0; 6];
    for (i, &bit) in pattern.iter().enumerate() {
        let [a, b] = manchester_pair(bit);
        out[2 * i] = if a == 1 { 1.0 } else { -1.0 };
        out[2 * i + 1] = if b == 1 { 1.0 } else { -1.0 };
    }
    out
}

/// Templates for the first window, whose left-hand bit slot holds the last
/// two preamble chips instead of a Manchester bit. Indexed by `(middle, right)`.
pub(crate) fn head_levels(middle: u8, right: u8) -> [f64; 6] {
    let mut out = pattern_levels([0, middle, right]);
    out[0] = 1.0;
    out[1] = 1.0;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_distinct_zero_mean_templates() {
        let bank = TemplateBank::new(16);
        let mut seen = std::collections::HashSet::new();
        for i in 0..8 {
            let t = bank.sampled(i);
            assert_eq!(t.len(), 3 * 2 * 16);
            assert_eq!(t.iter().sum::<f64>(), 0.0);
            assert!(t.iter().all(|v| v.abs() == 1.0));
            assert!(seen.insert(bank.patterns()[i]));
            assert_eq!(TemplateBank::index_of(bank.patterns()[i]), i);
        }
    }

    #[test]
    fn pattern_one_zero_one() {
        // 1 -> low,high ; 0 -> high,low
        assert_eq!(pattern_levels([1, 0, 1]), [-1.0, 1.0, 1.0, -1.0, -1.0, 1.0]);
        assert_eq!(head_levels(1, 0), [1.0, 1.0, -1.0, 1.0, 1.0, -1.0]);
    }
}
