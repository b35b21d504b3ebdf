//! Waveform files and ground-truth bit sidecars.
//!
//! Waveform layout, all little-endian:
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0 | 4 | magic `RVLC` |
//! | 4 | 2 | version (u16, currently 1) |
//! | 6 | 2 | reserved (u16, zero) |
//! | 8 | 4 | sample rate in Hz (f32) |
//! | 12 | 4 | sample count (u32) |
//! | 16 | 4·n | samples (f32) |
//!
//! The sidecar holds one ASCII `0` or `1` per line.

use std::io::{Read, Write};
use std::path::Path;

use crate::signal::{BasebandWaveform, BitStream};

pub const WAVEFORM_MAGIC: [u8; 4] = *b"RVLC";
pub const WAVEFORM_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not a waveform file (bad magic)")]
    BadMagic,
    #[error("unsupported waveform version {0}")]
    UnsupportedVersion(u16),
    #[error("header promises {expected} samples, file holds {actual}")]
    Length { expected: usize, actual: usize },
    #[error("waveform of {0} samples does not fit the u32 length field")]
    TooLong(usize),
    #[error("invalid waveform content: {0}")]
    Invalid(String),
    #[error("sidecar line {line}: expected 0 or 1, got {text:?}")]
    BadBit { line: usize, text: String },
}

pub fn encode_waveform(wave: &BasebandWaveform) -> Result<Vec<u8>, IoError> {
    let n = u32::try_from(wave.len()).map_err(|_| IoError::TooLong(wave.len()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * wave.len());
    out.extend_from_slice(&WAVEFORM_MAGIC);
    out.extend_from_slice(&WAVEFORM_VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(wave.sample_rate_hz() as f32).to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    for &s in wave.samples() {
        out.extend_from_slice(&(s as f32).to_le_bytes());
    }
    Ok(out)
}

pub fn decode_waveform(bytes: &[u8]) -> Result<BasebandWaveform, IoError> {
    if bytes.len() < HEADER_LEN || bytes[..4] != WAVEFORM_MAGIC {
        return Err(IoError::BadMagic);
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    let four = |i: usize| [bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]];
    let version = u16_at(4);
    if version != WAVEFORM_VERSION {
        return Err(IoError::UnsupportedVersion(version));
    }
    let rate = f32::from_le_bytes(four(8)) as f64;
    let expected = u32::from_le_bytes(four(12)) as usize;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 4 * expected {
        return Err(IoError::Length { expected, actual: body.len() / 4 });
    }
    let samples = body.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64).collect();
    BasebandWaveform::new(samples, rate).map_err(|e| IoError::Invalid(e.to_string()))
}

pub fn write_waveform(path: &Path, wave: &BasebandWaveform) -> Result<(), IoError> {
    let bytes = encode_waveform(wave)?;
    std::fs::File::create(path)?.write_all(&bytes)?;
    Ok(())
}

pub fn read_waveform(path: &Path) -> Result<BasebandWaveform, IoError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_waveform(&bytes)
}

pub fn encode_bits(bits: &BitStream) -> String {
    bits.as_slice().iter().map(|b| if *b == 1 { "1\n" } else { "0\n" }).collect()
}

pub fn decode_bits(text: &str) -> Result<BitStream, IoError> {
    let mut bits = Vec::new();
    for (i, line) in text.lines().enumerate() {
        match line.trim_end_matches('\r') {
            "0" => bits.push(0),
            "1" => bits.push(1),
            other => return Err(IoError::BadBit { line: i + 1, text: other.to_string() }),
        }
    }
    Ok(BitStream::new(bits).expect("only 0/1 pushed"))
}

pub fn write_bits(path: &Path, bits: &BitStream) -> Result<(), IoError> {
    std::fs::write(path, encode_bits(bits))?;
    Ok(())
}

pub fn read_bits(path: &Path) -> Result<BitStream, IoError> {
    decode_bits(&std::fs::read_to_string(path)?)
}
