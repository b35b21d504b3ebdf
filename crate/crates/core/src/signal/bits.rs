use super::SignalError;

/// Ordered logical payload bits, each 0 or 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream(Vec<u8>);

impl BitStream {
    pub fn new(bits: Vec<u8>) -> Result<Self, SignalError> {
        if let Some(index) = bits.iter().position(|&b| b > 1) {
            return Err(SignalError::InvalidBit { index, value: bits[index] });
        }
        Ok(Self(bits))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Expands bytes MSB-first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut bits = Vec::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            for shift in (0..8).rev() {
                bits.push((byte >> shift) & 1);
            }
        }
        Self(bits)
    }

    /// Packs MSB-first. Fails unless the length is a multiple of 8.
    pub fn to_bytes(&self) -> Result<Vec<u8>, SignalError> {
        if self.0.len() % 8 != 0 {
            return Err(SignalError::PayloadNotByteAligned(self.0.len()));
        }
        Ok(self.0.chunks(8).map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | b)).collect())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    pub(crate) fn from_trusted(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self(bits)
    }
}

impl TryFrom<Vec<u8>> for BitStream {
    type Error = SignalError;

    fn try_from(bits: Vec<u8>) -> Result<Self, Self::Error> {
        Self::new(bits)
    }
}

/// Binary chip levels with their nominal duration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipSequence {
    chips: Vec<u8>,
    chip_period_us: f64,
}

impl ChipSequence {
    pub fn new(chips: Vec<u8>, chip_period_us: f64) -> Result<Self, SignalError> {
        if !(chip_period_us.is_finite() && chip_period_us > 0.0) {
            return Err(SignalError::InvalidChipPeriod(chip_period_us));
        }
        if let Some(index) = chips.iter().position(|&c| c > 1) {
            return Err(SignalError::InvalidBit { index, value: chips[index] });
        }
        Ok(Self { chips, chip_period_us })
    }

    pub fn chips(&self) -> &[u8] {
        &self.chips
    }

    pub fn chip_period_us(&self) -> f64 {
        self.chip_period_us
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn duration_us(&self) -> f64 {
        self.chips.len() as f64 * self.chip_period_us
    }
}

/// Wire convention: an up edge is a one. `1 -> (low, high)`, `0 -> (high, low)`.
pub fn manchester_encode(bits: &BitStream, chip_period_us: f64) -> Result<ChipSequence, SignalError> {
    let mut chips = Vec::with_capacity(bits.len() * 2);
    for &bit in bits.as_slice() {
        chips.extend_from_slice(&manchester_pair(bit));
    }
    ChipSequence::new(chips, chip_period_us)
}

pub fn manchester_decode(chips: &ChipSequence) -> Result<BitStream, SignalError> {
    decode_chip_levels(chips.chips())
}

pub(crate) fn manchester_pair(bit: u8) -> [u8; 2] {
    if bit == 1 {
        [0, 1]
    } else {
        [1, 0]
    }
}

pub(crate) fn decode_chip_levels(chips: &[u8]) -> Result<BitStream, SignalError> {
    if chips.len() % 2 != 0 {
        return Err(SignalError::OddLength(chips.len()));
    }
    chips
        .chunks_exact(2)
        .enumerate()
        .map(|(i, pair)| match (pair[0], pair[1]) {
            (0, 1) => Ok(1),
            (1, 0) => Ok(0),
            _ => Err(SignalError::InvalidChipPair(2 * i)),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(BitStream::from_trusted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(v: &[u8]) -> BitStream {
        BitStream::new(v.to_vec()).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(manchester_encode(&bits(&[1]), 1.0).unwrap().chips(), &[0, 1]);
        assert!(manchester_encode(&bits(&[]), 1.0).unwrap().is_empty());
        assert_eq!(manchester_encode(&bits(&[1, 0, 1]), 1.0).unwrap().chips(), &[0, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn decode_examples() {
        let chips = ChipSequence::new(vec![0, 1, 1, 0], 1.0).unwrap();
        assert_eq!(manchester_decode(&chips).unwrap(), bits(&[1, 0]));

        let bad = ChipSequence::new(vec![1, 1], 1.0).unwrap();
        assert_eq!(manchester_decode(&bad), Err(SignalError::InvalidChipPair(0)));

        let bad = ChipSequence::new(vec![0, 1, 0, 0], 1.0).unwrap();
        assert_eq!(manchester_decode(&bad), Err(SignalError::InvalidChipPair(2)));

        let odd = ChipSequence::new(vec![0, 1, 0], 1.0).unwrap();
        assert_eq!(manchester_decode(&odd), Err(SignalError::OddLength(3)));
    }

    #[test]
    fn rejects_non_binary_values() {
        assert!(matches!(BitStream::new(vec![0, 2]), Err(SignalError::InvalidBit { index: 1, value: 2 })));
        assert!(ChipSequence::new(vec![0, 1], 0.0).is_err());
    }

    #[test]
    fn byte_packing_is_msb_first() {
        let b = BitStream::from_bytes(&[0b1000_0001, 0x0f]);
        assert_eq!(&b.as_slice()[..8], &[1, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(b.to_bytes().unwrap(), vec![0x81, 0x0f]);
        assert!(bits(&[1, 0, 1]).to_bytes().is_err());
    }

    proptest! {
        #[test]
        fn manchester_round_trip(raw in proptest::collection::vec(0u8..=1, 0..1000)) {
            let b = bits(&raw);
            let chips = manchester_encode(&b, 1000.0).unwrap();
            prop_assert_eq!(chips.len(), 2 * b.len());
            prop_assert_eq!(manchester_decode(&chips).unwrap(), b);
        }
    }
}
