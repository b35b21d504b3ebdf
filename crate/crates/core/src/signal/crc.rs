//! CRC-8 over the generator x^8 + x^2 + x + 1 (0x07).
//!
//! Parameters: init 0, no input/output reflection, no final XOR.

pub const CRC8_POLY: u8 = 0x07;

const fn build_table() -> [u8; 256] {
    let mut table = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = i as u8;
        let mut j = 0;
        while j < 8 {
            crc = if crc & 0x80 != 0 { (crc << 1) ^ CRC8_POLY } else { crc << 1 };
            j += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

static CRC8_TABLE: [u8; 256] = build_table();

pub fn crc8(bytes: &[u8]) -> u8 {
    bytes.iter().fold(0u8, |crc, &b| CRC8_TABLE[(crc ^ b) as usize])
}

/// `true` when `bytes` ends in its own CRC (the remainder of the whole message is zero).
pub fn crc8_check(bytes_with_crc: &[u8]) -> bool {
    crc8(bytes_with_crc) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Bit-serial long division of `msg · x^8` by the generator, on explicit bit vectors.
    fn long_division_oracle(msg: &[u8]) -> u8 {
        let generator = [1u8, 0, 0, 0, 0, 0, 1, 1, 1];
        let mut bits: Vec<u8> = msg.iter().flat_map(|&byte| (0..8).rev().map(move |s| (byte >> s) & 1)).collect();
        bits.extend([0; 8]);
        for i in 0..bits.len() - 8 {
            if bits[i] == 1 {
                for (j, g) in generator.iter().enumerate() {
                    bits[i + j] ^= g;
                }
            }
        }
        bits[bits.len() - 8..].iter().fold(0, |acc, &b| (acc << 1) | b)
    }

    #[test]
    fn empty_message_is_zero() {
        assert_eq!(crc8(&[]), 0x00);
    }

    #[test]
    fn known_answer() {
        assert_eq!(long_division_oracle(b"123456789"), 0xF4);
        assert_eq!(crc8(b"123456789"), 0xF4);
    }

    proptest! {
        #[test]
        fn matches_long_division(msg in proptest::collection::vec(any::<u8>(), 0..64)) {
            prop_assert_eq!(crc8(&msg), long_division_oracle(&msg));
        }

        #[test]
        fn self_check_identity(msg in proptest::collection::vec(any::<u8>(), 0..64)) {
            let mut framed = msg.clone();
            framed.push(crc8(&msg));
            prop_assert!(crc8_check(&framed));
        }

        #[test]
        fn single_bit_flip_detected(
            msg in proptest::collection::vec(any::<u8>(), 1..32),
            pos in any::<proptest::sample::Index>(),
        ) {
            let mut framed = msg.clone();
            framed.push(crc8(&msg));
            let bit = pos.index(framed.len() * 8);
            framed[bit / 8] ^= 0x80 >> (bit % 8);
            prop_assert!(!crc8_check(&framed));
        }
    }
}
