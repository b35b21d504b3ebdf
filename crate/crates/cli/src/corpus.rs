//! The distortion fixture corpus on disk: `<case>.rvlc` waveforms,
//! `<case>.bits` ground truth and `golden_ber.csv`.

use std::path::{Path, PathBuf};

use rvlc_core::decoder::DecoderKind;
use rvlc_core::fixtures::{fixture_wave, FixtureCase, CORPUS_SEED, CORPUS_SNR_DB, FIXTURE_PAYLOAD_BYTES};
use rvlc_core::io::{encode_bits, encode_waveform, read_bits, read_waveform};
use rvlc_core::{BasebandWaveform, BitStream, DecoderConfig};

use crate::table::Table;
use crate::CliError;

pub const GOLDEN_FILE: &str = "golden_ber.csv";

fn paths(dir: &Path, case: FixtureCase) -> (PathBuf, PathBuf) {
    (dir.join(format!("{}.rvlc", case.name())), dir.join(format!("{}.bits", case.name())))
}

/// Bit errors and CRC status of every decoder on every corpus waveform.
pub fn ber_table(corpus: &[(FixtureCase, BasebandWaveform, BitStream)]) -> Table {
    let cfg = DecoderConfig::for_payload_bytes(FIXTURE_PAYLOAD_BYTES);
    let mut rows = Vec::new();
    for (case, wave, truth) in corpus {
        for kind in DecoderKind::ALL {
            let (errors, crc_ok) = match kind.decode(wave, &cfg) {
                Ok(r) => (r.bit_errors(truth), r.crc_ok),
                Err(_) => (truth.len(), false),
            };
            rows.push(vec![
                case.name().to_string(),
                kind.name().to_string(),
                truth.len().to_string(),
                errors.to_string(),
                (crc_ok as u8).to_string(),
            ]);
        }
    }
    let header = ["case", "decoder", "bits", "bit_errors", "crc_ok"].map(String::from).to_vec();
    Table { header, rows }
}

fn generate() -> Result<Vec<(FixtureCase, BasebandWaveform, BitStream)>, CliError> {
    FixtureCase::ALL
        .iter()
        .map(|&case| {
            let fx = fixture_wave(case, CORPUS_SEED, CORPUS_SNR_DB).map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok((case, fx.wave, fx.coded_bits))
        })
        .collect()
}

/// Writes the six cases, their sidecars and the golden BER table.
pub fn gen_fixtures(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let corpus = generate()?;
    let mut written = Vec::new();
    for (case, wave, bits) in &corpus {
        let (w, b) = paths(dir, *case);
        std::fs::write(&w, encode_waveform(wave).map_err(|e| CliError::Runtime(e.to_string()))?)?;
        std::fs::write(&b, encode_bits(bits))?;
        written.extend([w, b]);
    }
    // Golden results come from the files as stored (f32 samples), not the f64 originals.
    let stored = read_corpus(dir)?;
    let golden = dir.join(GOLDEN_FILE);
    ber_table(&stored).write(&golden)?;
    written.push(golden);
    Ok(written)
}

fn read_corpus(dir: &Path) -> Result<Vec<(FixtureCase, BasebandWaveform, BitStream)>, CliError> {
    FixtureCase::ALL
        .iter()
        .map(|&case| {
            let (w, b) = paths(dir, case);
            let wave = read_waveform(&w).map_err(|e| CliError::Runtime(format!("{}: {e}", w.display())))?;
            let bits = read_bits(&b).map_err(|e| CliError::Runtime(format!("{}: {e}", b.display())))?;
            Ok((case, wave, bits))
        })
        .collect()
}

/// Differences between `dir` and a fresh corpus; empty when it verifies.
pub fn verify(dir: &Path) -> Result<Vec<String>, CliError> {
    let mut problems = Vec::new();
    let expected: Vec<String> = FixtureCase::ALL
        .iter()
        .flat_map(|c| [format!("{}.rvlc", c.name()), format!("{}.bits", c.name())])
        .chain([GOLDEN_FILE.to_string()])
        .collect();
    let mut present: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    present.sort();
    for name in &expected {
        if !present.contains(name) {
            problems.push(format!("missing {name}"));
        }
    }
    for name in &present {
        if !expected.contains(name) && (name.ends_with(".rvlc") || name.ends_with(".bits")) {
            problems.push(format!("unexpected corpus file {name}"));
        }
    }
    if !problems.is_empty() {
        return Ok(problems);
    }

    for (case, wave, bits) in generate()? {
        let (w, b) = paths(dir, case);
        if std::fs::read(&w)? != encode_waveform(&wave).map_err(|e| CliError::Runtime(e.to_string()))? {
            problems.push(format!("{} differs from a regenerated corpus", w.display()));
        }
        if std::fs::read_to_string(&b)? != encode_bits(&bits) {
            problems.push(format!("{} differs from a regenerated corpus", b.display()));
        }
    }
    let golden = std::fs::read(dir.join(GOLDEN_FILE))?;
    let decoded = ber_table(&read_corpus(dir)?).to_csv()?;
    if golden != decoded {
        let old = Table::from_csv(&golden)?;
        let new = Table::from_csv(&decoded)?;
        for (i, row) in new.rows.iter().enumerate() {
            if old.rows.get(i) != Some(row) {
                problems.push(format!(
                    "{GOLDEN_FILE} row {}: expected {:?}, decoded {:?}",
                    i + 1,
                    old.rows.get(i),
                    row
                ));
            }
        }
        if old.rows.len() != new.rows.len() || old.header != new.header {
            problems.push(format!("{GOLDEN_FILE} shape differs"));
        }
    }
    Ok(problems)
}
