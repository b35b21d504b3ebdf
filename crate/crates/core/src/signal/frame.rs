use super::bits::manchester_pair;
use super::{crc8, manchester_encode, BitStream, ChipSequence, SignalError};

/// Code-violating chip triple that opens every uplink frame. Manchester
/// payloads never contain three equal chips in a row.
pub const PREAMBLE_CHIPS: [u8; 3] = [1, 1, 1];

/// One known bit sent after the CRC so the last coded bit has a right-hand
/// neighbour inside the decoder's three-bit window.
pub const FLUSH_BIT: u8 = 0;

/// LCD state while the tag is not transmitting.
pub const IDLE_LEVEL: u8 = 0;

/// 0.5 kbps uplink: 2 ms bits, 1 ms chips.
pub const DEFAULT_CHIP_PERIOD_US: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    preamble: ChipSequence,
    payload: BitStream,
    crc: u8,
}

impl Frame {
    pub fn preamble(&self) -> &ChipSequence {
        &self.preamble
    }

    pub fn payload(&self) -> &BitStream {
        &self.payload
    }

    pub fn crc(&self) -> u8 {
        self.crc
    }

    pub fn chip_period_us(&self) -> f64 {
        self.preamble.chip_period_us()
    }

    /// Payload followed by the eight CRC bits.
    pub fn coded_bits(&self) -> BitStream {
        let mut bits = self.payload.as_slice().to_vec();
        bits.extend((0..8).rev().map(|s| (self.crc >> s) & 1));
        BitStream::from_trusted(bits)
    }

    /// Everything the LCD keys out: preamble, Manchester(payload ∥ crc), flush bit.
    pub fn line_chips(&self) -> Vec<u8> {
        let mut chips = self.preamble.chips().to_vec();
        for &bit in self.coded_bits().as_slice() {
            chips.extend_from_slice(&manchester_pair(bit));
        }
        chips.extend_from_slice(&manchester_pair(FLUSH_BIT));
        chips
    }

    /// Manchester chips of payload ∥ crc, without preamble or flush.
    pub fn body(&self) -> ChipSequence {
        manchester_encode(&self.coded_bits(), self.chip_period_us())
            .expect("frame chip period validated at construction")
    }
}

pub fn build_frame(payload: &BitStream, chip_period_us: f64) -> Result<Frame, SignalError> {
    let bytes = payload.to_bytes()?;
    let preamble = ChipSequence::new(PREAMBLE_CHIPS.to_vec(), chip_period_us)?;
    Ok(Frame { preamble, payload: payload.clone(), crc: crc8(&bytes) })
}

/// Inverse of [`Frame::coded_bits`]: splits off the CRC and checks it.
pub fn split_coded_bits(coded: &[u8]) -> Option<(BitStream, bool)> {
    if coded.len() < 8 || coded.len() % 8 != 0 {
        return None;
    }
    let whole = BitStream::new(coded.to_vec()).ok()?;
    let crc_ok = crc8(&whole.to_bytes().ok()?) == 0;
    let payload = BitStream::from_trusted(coded[..coded.len() - 8].to_vec());
    Some((payload, crc_ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::manchester_decode;
    use proptest::prelude::*;

    #[test]
    fn preamble_is_three_chips() {
        let f = build_frame(&BitStream::from_bytes(&[0xde, 0xad]), 1000.0).unwrap();
        assert_eq!(f.preamble().chips(), &PREAMBLE_CHIPS);
        assert_eq!(f.preamble().duration_us(), 3.0 * 1000.0);
        assert_eq!(f.crc(), crc8(&[0xde, 0xad]));
    }

    #[test]
    fn rejects_unaligned_payload() {
        let p = BitStream::new(vec![1, 0, 1]).unwrap();
        assert_eq!(build_frame(&p, 1000.0), Err(SignalError::PayloadNotByteAligned(3)));
    }

    #[test]
    fn line_chips_layout() {
        let f = build_frame(&BitStream::from_bytes(&[0x01]), 1000.0).unwrap();
        let chips = f.line_chips();
        assert_eq!(chips.len(), 3 + 2 * 16 + 2);
        assert_eq!(&chips[..3], &PREAMBLE_CHIPS);
        assert_eq!(&chips[chips.len() - 2..], &manchester_pair(FLUSH_BIT));
        let body = ChipSequence::new(chips[3..chips.len() - 2].to_vec(), 1.0).unwrap();
        assert_eq!(manchester_decode(&body).unwrap(), f.coded_bits());
    }

    #[test]
    fn preamble_never_occurs_in_body() {
        let f = build_frame(&BitStream::from_bytes(&[0x00, 0xff, 0x55, 0xaa, 0x33]), 1000.0).unwrap();
        let body = f.body();
        assert!(!body.chips().windows(3).any(|w| w == PREAMBLE_CHIPS));
    }

    proptest! {
        #[test]
        fn crc_detects_any_single_flip(bytes in proptest::collection::vec(any::<u8>(), 0..16), pos in any::<proptest::sample::Index>()) {
            let f = build_frame(&BitStream::from_bytes(&bytes), 1000.0).unwrap();
            let mut coded = f.coded_bits().into_inner();
            let (payload, ok) = split_coded_bits(&coded).unwrap();
            prop_assert!(ok);
            prop_assert_eq!(&payload, f.payload());
            let i = pos.index(coded.len());
            coded[i] ^= 1;
            prop_assert!(!split_coded_bits(&coded).unwrap().1);
        }
    }
}
