//! Experiment harness for the rvlc link simulator.
//!
//! `rvlc run <scenario> --out <dir>` writes `<experiment>.csv` and
//! `manifest.json`; `rvlc fixtures <dir>` writes the distortion corpus and
//! `rvlc verify <dir>` checks one against a fresh regeneration.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 scenario or argument
//! error, 3 runtime failure.

pub mod corpus;
pub mod experiments;
pub mod scenario;
pub mod table;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use experiments::{run_experiment, RunError};
pub use scenario::{parse, Experiment, ParseError, Scenario};
pub use table::Table;

/// Bumped whenever a CSV column is added, removed or reinterpreted.
pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "rvlc", version, about = "Visible-light backscatter link experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a scenario file.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Replaces the scenario's seed list with this single seed.
        #[arg(long, env = "RVLC_SEED")]
        seed: Option<u64>,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write the distortion fixture corpus and its golden BER table.
    Fixtures { dir: PathBuf },
    /// Check a fixture corpus against a fresh regeneration and its golden table.
    Verify { dir: PathBuf },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("verification failed:\n{}", .0.join("\n"))]
    Verify(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Verify(_) => 1,
            Self::Parse { .. } | Self::Usage(_) => 2,
            Self::Run(_) | Self::Runtime(_) | Self::Io(_) | Self::Csv(_) => 3,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub experiment: String,
    pub csv_schema: String,
    pub scenario_sha256: String,
    pub seeds: Vec<u64>,
    /// Set when `--seed` or `RVLC_SEED` replaced the scenario's seeds.
    pub seed_override: Option<u64>,
    pub sweep: Option<SweepRecord>,
    pub outputs: Vec<OutputRecord>,
}

#[derive(Debug, Serialize)]
pub struct SweepRecord {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug)]
pub struct RunReport {
    pub csv_path: PathBuf,
    pub table: Table,
    pub manifest: Manifest,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses and runs one scenario, writing its CSV and manifest into `out_dir`.
pub fn run_scenario(
    scenario_path: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> Result<RunReport, CliError> {
    let text = std::fs::read(scenario_path)?;
    let parse_err = |source| CliError::Parse { path: scenario_path.display().to_string(), source };
    let utf8 = std::str::from_utf8(&text)
        .map_err(|e| parse_err(ParseError { line: None, field: None, message: format!("not UTF-8: {e}") }))?;
    let sc = parse(utf8).map_err(parse_err)?;
    let seeds = seed.map_or_else(|| sc.experiment.seeds.clone(), |s| vec![s]);

    let table = match jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Runtime(e.to_string()))?
            .install(|| run_experiment(&sc, &seeds))?,
        None => run_experiment(&sc, &seeds)?,
    };

    std::fs::create_dir_all(out_dir)?;
    let name = sc.experiment.kind.name();
    let csv_name = format!("{name}.csv");
    let csv = table.to_csv()?;
    let csv_path = out_dir.join(&csv_name);
    std::fs::write(&csv_path, &csv)?;

    let manifest = Manifest {
        tool: "rvlc".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        core_version: rvlc_core::VERSION.into(),
        experiment: name.into(),
        csv_schema: format!("rvlc.{name}.v{CSV_SCHEMA_VERSION}"),
        scenario_sha256: sha256_hex(&text),
        seeds,
        seed_override: seed,
        sweep: sc.experiment.sweep.as_ref().map(|s| SweepRecord { param: s.param.clone(), values: s.values.clone() }),
        outputs: vec![OutputRecord { file: csv_name, rows: table.rows.len(), sha256: sha256_hex(&csv) }],
    };
    let mut json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
    json.push('\n');
    std::fs::write(out_dir.join(MANIFEST_FILE), json)?;
    Ok(RunReport { csv_path, table, manifest })
}

/// Runs a parsed command and returns the text to print.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Run { scenario, out, seed, jobs } => {
            let report = run_scenario(scenario, out, *seed, *jobs)?;
            Ok(summarize(&report))
        }
        Command::Fixtures { dir } => {
            let files = corpus::gen_fixtures(dir)?;
            let mut s = String::new();
            for f in files {
                let _ = writeln!(s, "wrote {}", f.display());
            }
            Ok(s)
        }
        Command::Verify { dir } => {
            let problems = corpus::verify(dir)?;
            if problems.is_empty() {
                Ok(format!("{} verifies\n", dir.display()))
            } else {
                Err(CliError::Verify(problems))
            }
        }
    }
}

const SUMMARY_MAX_ROWS: usize = 40;

fn summarize(report: &RunReport) -> String {
    let t = &report.table;
    let mut s = format!("{}: {} rows -> {}\n", report.manifest.experiment, t.rows.len(), report.csv_path.display());
    match report.manifest.experiment.as_str() {
        "channel_response" => {
            if let (Some(d), Some(p)) = (t.numbers("distance_m"), t.numbers("rx_power_dbm")) {
                let _ = writeln!(s, "fitted path-loss exponent: {:.3}", table::path_loss_exponent_fit(&d, &p));
            }
        }
        "eavesdrop_map" => {
            if let Some(area) = eavesdrop_area_m2(t) {
                let _ = writeln!(s, "detectable area: {area:.3} m^2");
            }
        }
        _ => {}
    }
    if t.rows.len() <= SUMMARY_MAX_ROWS {
        s.push_str(&t.render());
    }
    s
}

/// Polar-grid area of the detectable cells in an eavesdrop_map table, for a single sniffer gain.
pub fn eavesdrop_area_m2(t: &Table) -> Option<f64> {
    let angles = t.numbers("angle_deg")?;
    let distances = t.numbers("distance_m")?;
    let detectable = t.numbers("detectable")?;
    let step = |v: &[f64]| {
        let mut u: Vec<f64> = v.to_vec();
        u.sort_by(f64::total_cmp);
        u.dedup();
        u.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    };
    let (da, dd) = (step(&angles), step(&distances));
    if !da.is_finite() || !dd.is_finite() {
        return None;
    }
    Some(distances.iter().zip(&detectable).filter(|(_, &on)| on == 1.0).map(|(d, _)| d * da.to_radians() * dd).sum())
}
