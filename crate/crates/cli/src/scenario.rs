//! Scenario files.
//!
//! ```text
//! # dark chamber, distance sweep
//! [experiment]
//! name = plr_vs_distance
//! seeds = 1, 2, 3
//! sweep = geometry.distance_m
//! values = 0.2:3.0:0.1
//!
//! [tag]
//! ambient = dark
//! ```
//!
//! Lines starting with `#` or `;` are comments, as is anything after ` #`.
//! Lists are comma separated; `a:b:step` expands to an inclusive range.
//! Positions are `x y z` triples separated by `;`. Keys are applied in file
//! order, so `channel.model` should come before the keys it would otherwise
//! overwrite.

use std::fmt;

use rvlc_core::channel::Sniffer;
use rvlc_core::fixtures::FixtureCase;
use rvlc_core::mac::{BackoffConfig, Position, TrafficModel};
use rvlc_core::signal::DEFAULT_CHIP_PERIOD_US;
use rvlc_core::tag::{HarvestModel, StorageModel, OFFICE_AMBIENT_UW, TX_POWER_UW};
use rvlc_core::{ChannelConfig, GeometryConfig, LcdShapingParams};

pub const SECTIONS: [&str; 6] = ["signal", "channel", "geometry", "tag", "mac", "experiment"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based; `None` for problems with the file as a whole.
    pub line: Option<usize>,
    /// `section.key` the error refers to, if any.
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: ")?,
            None => write!(f, "scenario: ")?,
        }
        if let Some(field) = &self.field {
            write!(f, "{field}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    PlrVsDistance,
    PlrVsAngle,
    ChargingTime,
    ChannelResponse,
    DecoderCompare,
    Lemma1Trace,
    EavesdropMap,
    WorkingRange,
    MacPolling,
    MacContention,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Self::PlrVsDistance,
        Self::PlrVsAngle,
        Self::ChargingTime,
        Self::ChannelResponse,
        Self::DecoderCompare,
        Self::Lemma1Trace,
        Self::EavesdropMap,
        Self::WorkingRange,
        Self::MacPolling,
        Self::MacContention,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PlrVsDistance => "plr_vs_distance",
            Self::PlrVsAngle => "plr_vs_angle",
            Self::ChargingTime => "charging_time",
            Self::ChannelResponse => "channel_response",
            Self::DecoderCompare => "decoder_compare",
            Self::Lemma1Trace => "lemma1_trace",
            Self::EavesdropMap => "eavesdrop_map",
            Self::WorkingRange => "working_range",
            Self::MacPolling => "mac_polling",
            Self::MacContention => "mac_contention",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// `section.key`
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSection {
    pub kind: Experiment,
    pub seeds: Vec<u64>,
    pub sweep: Option<Sweep>,
    /// Packets per sweep point and seed in the PLR experiments.
    pub packets: usize,
    /// Whether PLR packets with enough energy are also decoded.
    pub decode: bool,
    pub snr_db: f64,
    pub cases: Vec<FixtureCase>,
    pub packet_bits: usize,
    pub origin_error_us: f64,
    pub angles_deg: Vec<f64>,
    pub distances_m: Vec<f64>,
    pub reader_sensitivity_dbm: f64,
    /// Seeded log-normal spread added to channel_response powers.
    pub power_noise_db: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            kind: Experiment::PlrVsDistance,
            seeds: Vec::new(),
            sweep: None,
            packets: 100,
            decode: true,
            snr_db: 15.0,
            cases: FixtureCase::ALL.to_vec(),
            packet_bits: 512,
            origin_error_us: 50.0,
            angles_deg: range(-30.0, 30.0, 1.0).expect("valid range"),
            distances_m: range(0.1, 4.0, 0.1).expect("valid range"),
            reader_sensitivity_dbm: -85.0,
            power_noise_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSection {
    pub payload_bytes: usize,
    pub chip_period_us: f64,
    pub sample_rate_hz: f64,
    pub shaping: LcdShapingParams,
}

impl Default for SignalSection {
    fn default() -> Self {
        Self {
            payload_bytes: 4,
            chip_period_us: DEFAULT_CHIP_PERIOD_US,
            sample_rate_hz: 16_000.0,
            shaping: LcdShapingParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagSection {
    pub harvest: HarvestModel,
    /// Ambient used for the office curve of charging_time.
    pub office_ambient_uw: f64,
    /// Standard deviation of the per-packet harvest, in dB.
    pub fluctuation_db: f64,
    pub tx_power_uw: f64,
    pub storage: StorageModel,
    pub ledger_step_us: f64,
}

impl Default for TagSection {
    fn default() -> Self {
        Self {
            harvest: HarvestModel::default(),
            office_ambient_uw: OFFICE_AMBIENT_UW,
            fluctuation_db: 0.4,
            tx_power_uw: TX_POWER_UW,
            storage: StorageModel::default(),
            ledger_step_us: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacSection {
    pub readers: Vec<Position>,
    pub tags: Vec<Position>,
    /// Polls to issue in mac_polling; whole rounds are run until reached. 0 means one round.
    pub polls: u64,
    pub slot_guard: f64,
    /// Uplink frame duration; derived from the signal section when unset.
    pub frame_us: Option<f64>,
    pub sensitivity_dbm: f64,
    /// Seeded uniform jitter applied to every tag coordinate.
    pub position_jitter_m: f64,
    pub traffic: TrafficModel,
    pub backoff: BackoffConfig,
}

impl Default for MacSection {
    fn default() -> Self {
        Self {
            readers: vec![Position::new(0.0, 0.0, 0.0)],
            tags: vec![Position::new(0.0, 1.0, 0.0), Position::new(0.3, 1.0, 0.0), Position::new(-0.3, 1.0, 0.0)],
            polls: 0,
            slot_guard: 0.1,
            frame_us: None,
            sensitivity_dbm: -100.0,
            position_jitter_m: 0.0,
            traffic: TrafficModel::default(),
            backoff: BackoffConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scenario {
    pub experiment: ExperimentSection,
    pub signal: SignalSection,
    pub channel: ChannelConfig,
    pub sniffer: Sniffer,
    pub geometry: GeometryConfig,
    pub tag: TagSection,
    pub mac: MacSection,
}

pub fn parse(text: &str) -> Result<Scenario, ParseError> {
    let mut sc = Scenario::default();
    let mut section: Option<&str> = None;
    let mut name_seen = false;
    let mut seeds_seen = false;
    let mut sweep_param: Option<(String, usize)> = None;
    let mut sweep_values: Option<(Vec<f64>, usize)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |field: Option<String>, message: String| ParseError { line: Some(line), field, message };
        let text = strip_comment(raw).trim();
        if text.is_empty() {
            continue;
        }
        if let Some(inner) = text.strip_prefix('[') {
            let name =
                inner.strip_suffix(']').ok_or_else(|| err(None, format!("unterminated section header {text:?}")))?;
            let name = name.trim();
            section = Some(SECTIONS.into_iter().find(|s| *s == name).ok_or_else(|| {
                err(None, format!("unknown section [{name}], expected one of {}", SECTIONS.join(", ")))
            })?);
            continue;
        }
        let (key, value) =
            text.split_once('=').ok_or_else(|| err(None, format!("expected `key = value`, got {text:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| err(Some(key.to_string()), "key outside any [section]".into()))?;
        let field = Some(format!("{sec}.{key}"));
        match (sec, key) {
            ("experiment", "sweep") => sweep_param = Some((value.to_string(), line)),
            ("experiment", "values") => sweep_values = Some((list(value).map_err(|m| err(field, m))?, line)),
            _ => {
                sc.set(sec, key, value).map_err(|m| err(field, m))?;
                name_seen |= (sec, key) == ("experiment", "name");
                seeds_seen |= (sec, key) == ("experiment", "seeds");
            }
        }
    }

    let whole =
        |field: &str, message: &str| ParseError { line: None, field: Some(field.into()), message: message.into() };
    if !name_seen {
        return Err(whole("experiment.name", "missing; every scenario names its experiment"));
    }
    if !seeds_seen {
        return Err(whole("experiment.seeds", "missing; at least one seed is required"));
    }
    match (sweep_param, sweep_values) {
        (None, None) => {}
        (Some((_, line)), None) => {
            return Err(ParseError {
                line: Some(line),
                field: Some("experiment.sweep".into()),
                message: "needs experiment.values".into(),
            })
        }
        (None, Some((_, line))) => {
            return Err(ParseError {
                line: Some(line),
                field: Some("experiment.values".into()),
                message: "needs experiment.sweep".into(),
            })
        }
        (Some((param, line)), Some((values, _))) => {
            let err =
                |message: String| ParseError { line: Some(line), field: Some("experiment.sweep".into()), message };
            let (sec, key) =
                param.split_once('.').ok_or_else(|| err(format!("expected section.key, got {param:?}")))?;
            if sec == "experiment" {
                return Err(err("experiment keys cannot be swept".into()));
            }
            for v in &values {
                sc.clone().set(sec, key, &format_value(*v)).map_err(|m| err(format!("{param} = {v}: {m}")))?;
            }
            sc.experiment.sweep = Some(Sweep { param, values });
        }
    }
    Ok(sc)
}

impl Scenario {
    /// Applies one `key = value` of `section`.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), String> {
        match section {
            "experiment" => self.set_experiment(key, value),
            "signal" => self.set_signal(key, value),
            "channel" => self.set_channel(key, value),
            "geometry" => self.set_geometry(key, value),
            "tag" => self.set_tag(key, value),
            "mac" => self.set_mac(key, value),
            _ => Err(format!("unknown section {section:?}")),
        }
    }

    /// The scenario at one sweep point.
    pub fn at_sweep_value(&self, value: f64) -> Result<Scenario, String> {
        let mut sc = self.clone();
        if let Some(sweep) = &self.experiment.sweep {
            let (sec, key) = sweep.param.split_once('.').expect("checked while parsing");
            sc.set(sec, key, &format_value(value))?;
        }
        Ok(sc)
    }

    fn set_experiment(&mut self, key: &str, value: &str) -> Result<(), String> {
        let e = &mut self.experiment;
        match key {
            "name" => {
                e.kind = Experiment::from_name(value).ok_or_else(|| {
                    let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
                    format!("unknown experiment {value:?}, expected one of {}", names.join(", "))
                })?
            }
            "seeds" => {
                e.seeds = list(value)?.into_iter().map(to_u64).collect::<Result<_, _>>()?;
                if e.seeds.is_empty() {
                    return Err("at least one seed is required".into());
                }
            }
            "packets" => e.packets = positive_usize(value)?,
            "decode" => e.decode = boolean(value)?,
            "snr_db" => e.snr_db = number(value)?,
            "cases" => {
                e.cases = value
                    .split(',')
                    .map(|c| {
                        FixtureCase::from_name(c.trim()).ok_or_else(|| format!("unknown fixture case {:?}", c.trim()))
                    })
                    .collect::<Result<_, _>>()?
            }
            "packet_bits" => e.packet_bits = positive_usize(value)?,
            "origin_error_us" => e.origin_error_us = number(value)?,
            "angles_deg" => e.angles_deg = non_empty(list(value)?)?,
            "distances_m" => e.distances_m = non_empty(list(value)?)?,
            "reader_sensitivity_dbm" => e.reader_sensitivity_dbm = number(value)?,
            "power_noise_db" => e.power_noise_db = non_negative(number(value)?)?,
            _ => return Err(unknown(key)),
        }
        Ok(())
    }

    fn set_signal(&mut self, key: &str, value: &str) -> Result<(), String> {
        let s = &mut self.signal;
        match key {
            "payload_bytes" => {
                s.payload_bytes = positive_usize(value)?;
                if s.payload_bytes > 64 {
                    return Err("at most 64 payload bytes".into());
                }
            }
            "chip_period_us" => s.chip_period_us = positive(number(value)?)?,
            "sample_rate_hz" => s.sample_rate_hz = positive(number(value)?)?,
            "tau_us" => {
                let tau = non_negative(number(value)?)?;
                s.shaping.tau_charge_us = tau;
                s.shaping.tau_discharge_us = tau;
            }
            "tau_charge_us" => s.shaping.tau_charge_us = non_negative(number(value)?)?,
            "tau_discharge_us" => s.shaping.tau_discharge_us = non_negative(number(value)?)?,
            _ => return Err(unknown(key)),
        }
        Ok(())
    }

    fn set_channel(&mut self, key: &str, value: &str) -> Result<(), String> {
        let c = &mut self.channel;
        match key {
            "model" => {
                c.path_loss_exponent = match value {
                    "retro" => ChannelConfig::default().path_loss_exponent,
                    "omni" => ChannelConfig::omni_backscatter().path_loss_exponent,
                    _ => return Err(format!("expected retro or omni, got {value:?}")),
                }
            }
            "path_loss_exponent" => {
                let n = number(value)?;
                if !(2.0..=4.0).contains(&n) {
                    return Err(format!("{n} is outside [2, 4]"));
                }
                c.path_loss_exponent = n;
            }
            "ref_distance_m" => c.ref_distance_m = positive(number(value)?)?,
            "ref_rx_power_dbm" => c.ref_rx_power_dbm = number(value)?,
            "tx_power_dbm" => c.tx_power_dbm = number(value)?,
            "angle_breakpoint_deg" => c.angle_breakpoint_deg = non_negative(number(value)?)?,
            "angle_rolloff_db_per_deg" => c.angle_rolloff_db_per_deg = non_negative(number(value)?)?,
            "amplitude_at_ref" => c.amplitude_at_ref = positive(number(value)?)?,
            "scale_by_path_loss" => c.scale_by_path_loss = boolean(value)?,
            "awgn_sigma" => c.awgn_sigma = non_negative(number(value)?)?,
            "ac_harmonic_amps" => c.ac_harmonic_amps = pairs(value)?,
            "drift_amplitude" => c.drift_amplitude = non_negative(number(value)?)?,
            "drift_freq_hz" => c.drift_freq_hz = non_negative(number(value)?)?,
            "clip_high" => c.clip_high = optional(value)?,
            "clip_low" => c.clip_low = optional(value)?,
            "clock_ratio_k" => {
                let k = number(value)?;
                if !(0.9..=1.1).contains(&k) {
                    return Err(format!("{k} is outside [0.9, 1.1]"));
                }
                c.clock_ratio_k = k;
            }
            "clock_offset_us" => c.clock_offset_us = number(value)?,
            "clock_drift_rate" => c.clock_drift_rate = number(value)?,
            "eavesdrop_rolloff_db_per_deg" => c.eavesdrop_rolloff_db_per_deg = non_negative(number(value)?)?,
            "beam_spread_exponent" => c.beam_spread_exponent = non_negative(number(value)?)?,
            "sniffer_gain_db" => self.sniffer.gain_db = number(value)?,
            "sniffer_sensitivity_dbm" => self.sniffer.sensitivity_dbm = number(value)?,
            _ => return Err(unknown(key)),
        }
        if let (Some(high), Some(low)) = (c.clip_high, c.clip_low) {
            if !(high > low) {
                return Err(format!("clip_high {high} must exceed clip_low {low}"));
            }
        }
        Ok(())
    }

    fn set_geometry(&mut self, key: &str, value: &str) -> Result<(), String> {
        let g = &mut self.geometry;
        match key {
            "distance_m" => g.distance_m = positive(number(value)?)?,
            "incidence_angle_deg" => {
                let a = number(value)?;
                if !(0.0..90.0).contains(&a) {
                    return Err(format!("{a} is outside [0, 90)"));
                }
                g.incidence_angle_deg = a;
            }
            "reflector_area_cm2" => g.reflector_area_cm2 = positive(number(value)?)?,
            "dispersion_halfangle_deg" => g.dispersion_halfangle_deg = non_negative(number(value)?)?,
            _ => return Err(unknown(key)),
        }
        Ok(())
    }

    fn set_tag(&mut self, key: &str, value: &str) -> Result<(), String> {
        let t = &mut self.tag;
        match key {
            "ambient" => {
                t.harvest.ambient_uw = match value {
                    "dark" => 0.0,
                    "office" => t.office_ambient_uw,
                    _ => return Err(format!("expected dark or office, got {value:?}")),
                }
            }
            "ambient_uw" => t.harvest.ambient_uw = non_negative(number(value)?)?,
            "office_ambient_uw" => t.office_ambient_uw = non_negative(number(value)?)?,
            "harvest_coeff_uw_m2" => t.harvest.coeff_uw_m2 = positive(number(value)?)?,
            "near_field_m" => t.harvest.near_field_m = non_negative(number(value)?)?,
            "fluctuation_db" => t.fluctuation_db = non_negative(number(value)?)?,
            "tx_power_uw" => t.tx_power_uw = positive(number(value)?)?,
            "capacitance_uf" => t.storage.capacitance_uf = positive(number(value)?)?,
            "v_operating" => t.storage.v_operating = positive(number(value)?)?,
            "leakage_uw" => t.storage.leakage_uw = non_negative(number(value)?)?,
            "ledger_step_us" => t.ledger_step_us = positive(number(value)?)?,
            _ => return Err(unknown(key)),
        }
        Ok(())
    }

    fn set_mac(&mut self, key: &str, value: &str) -> Result<(), String> {
        let m = &mut self.mac;
        match key {
            "readers" => m.readers = non_empty(positions(value)?)?,
            "tags" => m.tags = non_empty(positions(value)?)?,
            "polls" => m.polls = to_u64(number(value)?)?,
            "slot_guard" => m.slot_guard = non_negative(number(value)?)?,
            "frame_us" => m.frame_us = Some(positive(number(value)?)?),
            "sensitivity_dbm" => m.sensitivity_dbm = number(value)?,
            "position_jitter_m" => m.position_jitter_m = non_negative(number(value)?)?,
            "arrival_rate_hz" => m.traffic.arrival_rate_hz = positive(number(value)?)?,
            "duration_us" => m.traffic.duration_us = to_u64(number(value)?)?,
            "sensing_delay_us" => m.traffic.sensing_delay_us = to_u64(number(value)?)?,
            "tx_frame_us" => m.traffic.frame_us = to_u64(positive(number(value)?)?)?,
            "tag_position" => {
                let p = positions(value)?;
                if p.len() != 1 {
                    return Err("expected a single `x y z` position".into());
                }
                m.traffic.tag_position = p[0];
            }
            "backoff_slot_us" => m.backoff.slot_us = to_u64(positive(number(value)?)?)?,
            "cw_min" => m.backoff.cw_min = to_u32(number(value)?)?,
            "cw_max" => m.backoff.cw_max = to_u32(number(value)?)?,
            _ => return Err(unknown(key)),
        }
        if m.backoff.cw_min == 0 || m.backoff.cw_max < m.backoff.cw_min {
            return Err(format!("need 1 <= cw_min <= cw_max, got {} and {}", m.backoff.cw_min, m.backoff.cw_max));
        }
        Ok(())
    }
}

/// Shortest text that parses back to `v`; used for sweep values and CSV cells.
pub fn format_value(v: f64) -> String {
    format!("{v}")
}

/// Whole-line `#`/`;` comments and inline comments opened by whitespace then `#`.
fn strip_comment(line: &str) -> &str {
    let t = line.trim_start();
    if t.starts_with('#') || t.starts_with(';') {
        return "";
    }
    let bytes = line.as_bytes();
    match (1..bytes.len()).find(|&i| bytes[i] == b'#' && bytes[i - 1].is_ascii_whitespace()) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn unknown(key: &str) -> String {
    format!("unknown key {key:?}")
}

fn number(value: &str) -> Result<f64, String> {
    let v: f64 = value.parse().map_err(|_| format!("expected a number, got {value:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got {value:?}"))
    }
}

fn positive(v: f64) -> Result<f64, String> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn non_negative(v: f64) -> Result<f64, String> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must not be negative, got {v}"))
    }
}

fn to_u64(v: f64) -> Result<u64, String> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("expected a non-negative integer, got {v}"))
    }
}

fn to_u32(v: f64) -> Result<u32, String> {
    let n = to_u64(v)?;
    u32::try_from(n).map_err(|_| format!("{n} does not fit in 32 bits"))
}

fn positive_usize(value: &str) -> Result<usize, String> {
    let n = to_u64(number(value)?)?;
    if n == 0 {
        return Err("must be at least 1".into());
    }
    usize::try_from(n).map_err(|_| format!("{n} is too large"))
}

fn boolean(value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got {value:?}")),
    }
}

fn optional(value: &str) -> Result<Option<f64>, String> {
    if value == "none" {
        Ok(None)
    } else {
        number(value).map(Some)
    }
}

fn non_empty<T>(v: Vec<T>) -> Result<Vec<T>, String> {
    if v.is_empty() {
        Err("must not be empty".into())
    } else {
        Ok(v)
    }
}

/// Comma-separated numbers and `start:stop:step` ranges.
pub fn list(value: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => out.push(number(single)?),
            [a, b, step] => out.extend(range(number(a)?, number(b)?, number(step)?)?),
            _ => return Err(format!("expected a number or start:stop:step, got {item:?}")),
        }
    }
    Ok(out)
}

/// Inclusive range with values rounded to 1e-9 so `0.1:0.3:0.1` reads back as written.
fn range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0) || stop < start {
        return Err(format!("range {start}:{stop}:{step} needs a positive step and stop >= start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(format!("range {start}:{stop}:{step} has too many points"));
    }
    Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
}

/// `f:a, f:a` interferer list.
fn pairs(value: &str) -> Result<Vec<(f64, f64)>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (f, a) = item.split_once(':').ok_or_else(|| format!("expected freq_hz:amplitude, got {item:?}"))?;
            Ok((non_negative(number(f.trim())?)?, non_negative(number(a.trim())?)?))
        })
        .collect()
}

/// `x y z; x y z` positions in metres.
fn positions(value: &str) -> Result<Vec<Position>, String> {
    value
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let c: Vec<f64> = item.split_whitespace().map(number).collect::<Result<_, _>>()?;
            match c.as_slice() {
                [x, y, z] => Ok(Position::new(*x, *y, *z)),
                _ => Err(format!("expected `x y z`, got {item:?}")),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[experiment]\nname = lemma1_trace\nseeds = 1\n";

    #[test]
    fn minimal_scenario_uses_defaults() {
        let sc = parse(MINIMAL).unwrap();
        assert_eq!(sc.experiment.kind, Experiment::Lemma1Trace);
        assert_eq!(sc.experiment.seeds, vec![1]);
        assert_eq!(sc.channel, ChannelConfig::default());
        assert!(sc.experiment.sweep.is_none());
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(list("0.1:0.3:0.1").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(list("1, 2:4:1, 7").unwrap(), vec![1.0, 2.0, 3.0, 4.0, 7.0]);
        assert!(list("1:0:1").is_err());
        assert!(list("1:2").is_err());
    }

    #[test]
    fn sections_and_comments() {
        let text = "; header\n[experiment]\nname = mac_polling # inline\nseeds = 3, 4\n\n[mac]\nreaders = 0 0 0; 2 0 0\ntags = 1 1 0\n[channel]\nclip_high = none\nac_harmonic_amps = 100:0.1, 120:0.2\n";
        let sc = parse(text).unwrap();
        assert_eq!(sc.experiment.seeds, vec![3, 4]);
        assert_eq!(sc.mac.readers.len(), 2);
        assert_eq!(sc.mac.tags, vec![Position::new(1.0, 1.0, 0.0)]);
        assert_eq!(sc.channel.ac_harmonic_amps, vec![(100.0, 0.1), (120.0, 0.2)]);
    }

    #[test]
    fn sweep_applies_per_point() {
        let text = format!("{MINIMAL}sweep = geometry.distance_m\nvalues = 0.5, 1.5\n");
        let sc = parse(&text).unwrap();
        assert_eq!(sc.experiment.sweep.as_ref().unwrap().values, vec![0.5, 1.5]);
        assert_eq!(sc.at_sweep_value(1.5).unwrap().geometry.distance_m, 1.5);
    }

    fn error_of(text: &str) -> ParseError {
        parse(text).unwrap_err()
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let e = error_of("[experiment]\nname = lemma1_trace\nseeds = 1\n[channel]\nawgn_sigma = loud\n");
        assert_eq!(e.line, Some(5));
        assert_eq!(e.field.as_deref(), Some("channel.awgn_sigma"));
        assert_eq!(e.to_string(), "line 5: channel.awgn_sigma: expected a number, got \"loud\"");

        let e = error_of("[experiment]\nname = lemma1_trace\nseeds = 1\n[channel]\nbogus = 1\n");
        assert_eq!((e.line, e.field.as_deref()), (Some(5), Some("channel.bogus")));

        assert_eq!(error_of("[radio]\n").line, Some(1));
        assert_eq!(error_of("name = x\n").line, Some(1));
        assert_eq!(error_of("[experiment]\nname = nope\n").field.as_deref(), Some("experiment.name"));
        assert_eq!(error_of("[experiment]\nname = lemma1_trace\n").field.as_deref(), Some("experiment.seeds"));
        assert_eq!(error_of("[experiment]\nseeds = 1\n").field.as_deref(), Some("experiment.name"));
        assert_eq!(error_of("[experiment]\nname = lemma1_trace\nseeds =\n").line, Some(3));
    }

    #[test]
    fn sweep_must_name_an_existing_numeric_field() {
        let e = error_of(&format!("{MINIMAL}sweep = geometry.height_m\nvalues = 1\n"));
        assert_eq!((e.line, e.field.as_deref()), (Some(4), Some("experiment.sweep")));
        assert!(error_of(&format!("{MINIMAL}sweep = geometry.incidence_angle_deg\nvalues = 10, 95\n"))
            .message
            .contains("95"));
        assert!(error_of(&format!("{MINIMAL}sweep = geometry.distance_m\n")).message.contains("values"));
        assert!(error_of(&format!("{MINIMAL}values = 1\n")).message.contains("sweep"));
    }

    #[test]
    fn range_checks() {
        assert!(error_of(&format!("{MINIMAL}[channel]\nclock_ratio_k = 1.5\n")).message.contains("outside"));
        assert!(error_of(&format!("{MINIMAL}[channel]\nclip_low = 0.8\nclip_high = 0.2\n")).message.contains("exceed"));
        assert!(error_of(&format!("{MINIMAL}[mac]\ncw_min = 0\n")).message.contains("cw_min"));
        assert!(error_of(&format!("{MINIMAL}[signal]\npayload_bytes = 65\n")).message.contains("64"));
    }
}
