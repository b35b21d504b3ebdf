//! One function per experiment. Each returns the rows of a single sweep
//! point; [`run_experiment`] fans points and seeds out and reassembles them
//! in sweep-then-seed order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;

use rvlc_core::channel::{apply_channel, eavesdrop_map, received_power_dbm, ChannelError};
use rvlc_core::decoder::{packet_error_trace, DecodeError, DecoderKind};
use rvlc_core::fixtures::{fixture_wave, FixtureError, FIXTURE_PAYLOAD_BYTES};
use rvlc_core::mac::{
    run_polling_round, run_reader_contention, slot_length_us, update_vitag_table, MacError, Node, PollSchedule,
    Position,
};
use rvlc_core::signal::{build_frame, synthesize_uplink_waveform, SignalError};
use rvlc_core::tag::{charging_time_ms, link_feasible, simulate_charging_ms, EnergyLedger, HarvestModel, Phase};
use rvlc_core::{BitStream, DecoderConfig};

use crate::scenario::{format_value, Experiment, Scenario};
use crate::table::Table;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Mac(#[from] MacError),
    #[error("{0}")]
    Invalid(String),
}

type Rows = Vec<Vec<String>>;

pub fn header(kind: Experiment) -> &'static [&'static str] {
    match kind {
        Experiment::PlrVsDistance | Experiment::PlrVsAngle => {
            &["seed", "distance_m", "incidence_angle_deg", "harvest_uw", "packets", "energy_lost", "decode_lost", "plr"]
        }
        Experiment::ChargingTime => &["distance_m", "condition", "harvest_uw", "closed_form_ms", "ledger_ms"],
        Experiment::ChannelResponse => &["seed", "distance_m", "rx_power_dbm"],
        Experiment::DecoderCompare => {
            &["case", "decoder", "frames", "bits", "bit_errors", "ber", "frame_errors", "mean_abs_timing_error_us"]
        }
        Experiment::Lemma1Trace => &["bit", "error_us"],
        Experiment::EavesdropMap => &["sniffer_gain_db", "angle_deg", "distance_m", "power_dbm", "detectable"],
        Experiment::WorkingRange => &["incidence_angle_deg", "uplink_limit_m", "energy_limit_m", "working_range_m"],
        Experiment::MacPolling => &[
            "seed",
            "readers",
            "tags",
            "assigned",
            "rounds",
            "polls",
            "responses",
            "timeouts",
            "collisions",
            "max_responses_per_slot",
            "mean_latency_us",
            "max_latency_us",
            "events",
        ],
        Experiment::MacContention => &[
            "seed",
            "readers",
            "sensing_delay_us",
            "arrivals",
            "attempts",
            "successes",
            "collisions",
            "captured",
            "deferrals",
            "success_rate",
            "mean_delay_us",
            "p50_delay_us",
            "p95_delay_us",
            "p99_delay_us",
        ],
    }
}

/// Experiments that produce independent rows per seed; the others see all seeds at once.
fn per_seed(kind: Experiment) -> bool {
    matches!(
        kind,
        Experiment::PlrVsDistance
            | Experiment::PlrVsAngle
            | Experiment::ChannelResponse
            | Experiment::MacPolling
            | Experiment::MacContention
    )
}

pub fn run_experiment(sc: &Scenario, seeds: &[u64]) -> Result<Table, RunError> {
    let kind = sc.experiment.kind;
    let sweep = sc.experiment.sweep.as_ref();
    let points: Vec<(Option<f64>, Scenario)> = match sweep {
        Some(s) => s
            .values
            .iter()
            .map(|&v| sc.at_sweep_value(v).map(|p| (Some(v), p)).map_err(RunError::Invalid))
            .collect::<Result<_, _>>()?,
        None => vec![(None, sc.clone())],
    };
    let units: Vec<(usize, Vec<u64>)> = points
        .iter()
        .enumerate()
        .flat_map(|(i, _)| {
            if per_seed(kind) {
                seeds.iter().map(|&s| (i, vec![s])).collect::<Vec<_>>()
            } else {
                vec![(i, seeds.to_vec())]
            }
        })
        .collect();

    let blocks: Vec<Rows> = units
        .par_iter()
        .map(|(i, unit_seeds)| {
            let (value, point) = &points[*i];
            let rows = run_point(point, unit_seeds)?;
            Ok(match value {
                Some(v) => rows.into_iter().map(|r| std::iter::once(format_value(*v)).chain(r).collect()).collect(),
                None => rows,
            })
        })
        .collect::<Result<_, RunError>>()?;

    let mut columns: Vec<String> = header(kind).iter().map(|s| s.to_string()).collect();
    if let Some(s) = sweep {
        columns.insert(0, s.param.clone());
    }
    Ok(Table { header: columns, rows: blocks.into_iter().flatten().collect() })
}

fn run_point(sc: &Scenario, seeds: &[u64]) -> Result<Rows, RunError> {
    match sc.experiment.kind {
        Experiment::PlrVsDistance | Experiment::PlrVsAngle => plr(sc, seeds[0]),
        Experiment::ChargingTime => charging_time(sc),
        Experiment::ChannelResponse => channel_response(sc, seeds[0]),
        Experiment::DecoderCompare => decoder_compare(sc, seeds),
        Experiment::Lemma1Trace => lemma1_trace(sc),
        Experiment::EavesdropMap => eavesdrop(sc),
        Experiment::WorkingRange => working_range(sc),
        Experiment::MacPolling => mac_polling(sc, seeds[0]),
        Experiment::MacContention => mac_contention(sc, seeds[0]),
    }
}

fn f(v: f64) -> String {
    format_value(v)
}

fn opt(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

/// Packet loss from energy shortfall and, for packets with enough energy,
/// from failed decodes. Each packet's harvest fluctuation, payload and noise
/// seed come from the seed alone, so every sweep point sees the same draws.
fn plr(sc: &Scenario, seed: u64) -> Result<Rows, RunError> {
    let e = &sc.experiment;
    let geo = sc.geometry;
    let harvest = sc.tag.harvest.harvest_uw(geo.distance_m, geo.incidence_angle_deg);
    let spread = Normal::new(0.0, sc.tag.fluctuation_db).map_err(|err| RunError::Invalid(err.to_string()))?;
    let decoder = DecoderConfig {
        chip_period_us: sc.signal.chip_period_us,
        ..DecoderConfig::for_payload_bytes(sc.signal.payload_bytes)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut energy_lost, mut decode_lost) = (0usize, 0usize);
    for _ in 0..e.packets {
        let fluctuation_db: f64 = spread.sample(&mut rng);
        let payload: Vec<u8> = (0..sc.signal.payload_bytes).map(|_| rng.random()).collect();
        let noise_seed: u64 = rng.random();

        let mut ledger = EnergyLedger::new(harvest * 10f64.powf(fluctuation_db / 10.0));
        ledger.tx_power_uw = sc.tag.tx_power_uw;
        if !link_feasible(&ledger, Phase::Transmit) {
            energy_lost += 1;
            continue;
        }
        if e.decode {
            let frame = build_frame(&BitStream::from_bytes(&payload), sc.signal.chip_period_us)?;
            let clean = synthesize_uplink_waveform(&frame, &sc.signal.shaping, sc.signal.sample_rate_hz)?;
            let channel = rvlc_core::ChannelConfig { seed: noise_seed, ..sc.channel.clone() };
            let wave = apply_channel(&clean, &channel, &geo)?;
            let ok = match DecoderKind::SlidingWindow.decode(&wave, &decoder) {
                Ok(r) => r.crc_ok && r.payload.to_bytes().ok().as_deref() == Some(payload.as_slice()),
                Err(DecodeError::SampleRateTooLow { .. }) => {
                    return Err(RunError::Invalid(format!(
                        "sample rate {} Hz is too low to decode",
                        sc.signal.sample_rate_hz
                    )))
                }
                Err(_) => false,
            };
            if !ok {
                decode_lost += 1;
            }
        }
    }
    let lost = energy_lost + decode_lost;
    Ok(vec![vec![
        seed.to_string(),
        f(geo.distance_m),
        f(geo.incidence_angle_deg),
        f(harvest),
        e.packets.to_string(),
        energy_lost.to_string(),
        decode_lost.to_string(),
        f(lost as f64 / e.packets as f64),
    ]])
}

/// Dark and office curves from the closed form and from stepping the ledger.
fn charging_time(sc: &Scenario) -> Result<Rows, RunError> {
    let geo = sc.geometry;
    let storage = sc.tag.storage;
    let threshold = storage.threshold_uj();
    let conditions = [("dark", 0.0), ("office", sc.tag.office_ambient_uw)];
    Ok(conditions
        .iter()
        .map(|&(name, ambient_uw)| {
            let model = HarvestModel { ambient_uw, ..sc.tag.harvest };
            let h = model.harvest_uw(geo.distance_m, geo.incidence_angle_deg);
            let closed = charging_time_ms(h, threshold, storage.leakage_uw).ok();
            let ledger = closed.and_then(|c| simulate_charging_ms(h, &storage, sc.tag.ledger_step_us, 2.0 * c + 1.0));
            vec![f(geo.distance_m), name.to_string(), f(h), opt(closed), opt(ledger)]
        })
        .collect())
}

fn channel_response(sc: &Scenario, seed: u64) -> Result<Rows, RunError> {
    sc.channel.validate()?;
    sc.geometry.validate()?;
    let mut p = received_power_dbm(&sc.channel, &sc.geometry);
    if sc.experiment.power_noise_db > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        p += Normal::new(0.0, sc.experiment.power_noise_db).expect("checked non-negative").sample(&mut rng);
    }
    Ok(vec![vec![seed.to_string(), f(sc.geometry.distance_m), f(p)]])
}

#[derive(Default)]
struct DecoderTally {
    frames: usize,
    bits: usize,
    bit_errors: usize,
    frame_errors: usize,
    timing_sum: f64,
    timed_frames: usize,
}

/// Every decoder on the same seeded fixture waveforms.
fn decoder_compare(sc: &Scenario, seeds: &[u64]) -> Result<Rows, RunError> {
    let snr = sc.experiment.snr_db;
    let mut rows = Vec::new();
    for &case in &sc.experiment.cases {
        let per_seed: Vec<Vec<(usize, bool, Option<f64>)>> = seeds
            .par_iter()
            .map(|&seed| {
                let fx = fixture_wave(case, seed, snr)?;
                let cfg = fx.decoder_config();
                let truth = fx.received_centers_us();
                Ok(DecoderKind::ALL
                    .iter()
                    .map(|kind| match kind.decode(&fx.wave, &cfg) {
                        Ok(mut r) => {
                            r.attach_truth(&truth);
                            let errors = r.bit_errors(&fx.coded_bits);
                            (errors, errors > 0 || !r.crc_ok, r.mean_abs_timing_error_us())
                        }
                        Err(_) => (fx.coded_bits.len(), true, None),
                    })
                    .collect())
            })
            .collect::<Result<_, RunError>>()?;

        let bits = DecoderConfig::for_payload_bytes(FIXTURE_PAYLOAD_BYTES).coded_bits();
        for (slot, kind) in DecoderKind::ALL.iter().enumerate() {
            let mut t = DecoderTally::default();
            for outcome in &per_seed {
                let (errors, frame_error, timing) = outcome[slot];
                t.frames += 1;
                t.bits += bits;
                t.bit_errors += errors;
                t.frame_errors += frame_error as usize;
                if let Some(m) = timing {
                    t.timing_sum += m;
                    t.timed_frames += 1;
                }
            }
            let timing = (t.timed_frames > 0).then(|| t.timing_sum / t.timed_frames as f64);
            rows.push(vec![
                case.name().to_string(),
                kind.name().to_string(),
                t.frames.to_string(),
                t.bits.to_string(),
                t.bit_errors.to_string(),
                f(t.bit_errors as f64 / t.bits.max(1) as f64),
                t.frame_errors.to_string(),
                opt(timing),
            ]);
        }
    }
    Ok(rows)
}

fn lemma1_trace(sc: &Scenario) -> Result<Rows, RunError> {
    let trace = packet_error_trace(
        sc.experiment.packet_bits,
        sc.channel.clock_ratio_k,
        sc.experiment.origin_error_us,
        2.0 * sc.signal.chip_period_us,
    );
    Ok(trace.iter().enumerate().map(|(i, e)| vec![i.to_string(), f(*e)]).collect())
}

fn eavesdrop(sc: &Scenario) -> Result<Rows, RunError> {
    sc.channel.validate()?;
    let e = &sc.experiment;
    if let Some(&d) = e.distances_m.iter().find(|d| !(**d > 0.0)) {
        return Err(RunError::Invalid(format!("eavesdrop distances must be positive, got {d}")));
    }
    let cells = eavesdrop_map(&sc.channel, &sc.geometry, &sc.sniffer, &e.angles_deg, &e.distances_m);
    Ok(cells
        .iter()
        .map(|c| {
            vec![
                f(sc.sniffer.gain_db),
                f(c.angle_deg),
                f(c.distance_m),
                f(c.power_dbm),
                (c.detectable as u8).to_string(),
            ]
        })
        .collect())
}

/// Farthest distance at which the reader still hears the uplink and the tag
/// still harvests its transmit power, at the scenario's incidence angle.
fn working_range(sc: &Scenario) -> Result<Rows, RunError> {
    let c = &sc.channel;
    c.validate()?;
    let geo = sc.geometry;
    let at_ref = rvlc_core::GeometryConfig { distance_m: c.ref_distance_m, ..geo };
    let margin_db = received_power_dbm(c, &at_ref) - sc.experiment.reader_sensitivity_dbm;
    let uplink = c.ref_distance_m * 10f64.powf(margin_db / (10.0 * c.path_loss_exponent));

    let h = &sc.tag.harvest;
    let cos = geo.incidence_angle_deg.to_radians().cos();
    let deficit = sc.tag.tx_power_uw - h.ambient_uw;
    let energy = if deficit <= 0.0 {
        f64::INFINITY
    } else {
        (h.coeff_uw_m2 * cos / deficit - h.near_field_m.powi(2)).max(0.0).sqrt()
    };
    Ok(vec![vec![f(geo.incidence_angle_deg), f(uplink), f(energy), f(uplink.min(energy))]])
}

fn frame_duration_us(sc: &Scenario) -> Result<f64, RunError> {
    if let Some(us) = sc.mac.frame_us {
        return Ok(us);
    }
    let frame = build_frame(&BitStream::from_bytes(&vec![0; sc.signal.payload_bytes]), sc.signal.chip_period_us)?;
    Ok(frame.line_chips().len() as f64 * sc.signal.chip_period_us)
}

fn mac_polling(sc: &Scenario, seed: u64) -> Result<Rows, RunError> {
    let m = &sc.mac;
    let readers: Vec<Node> = m.readers.iter().enumerate().map(|(i, p)| Node::reader(i as u32 + 1, *p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Uniform::new_inclusive(-m.position_jitter_m, m.position_jitter_m).expect("non-negative jitter");
    let tags: Vec<Node> = m
        .tags
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let p = Position::new(
                p.x + jitter.sample(&mut rng),
                p.y + jitter.sample(&mut rng),
                p.z + jitter.sample(&mut rng),
            );
            Node::tag(10_000 + i as u32, 0x5256_0000 + i as u32, p)
        })
        .collect();

    let table = update_vitag_table(&readers, &tags, &sc.channel, m.sensitivity_dbm);
    let schedule = PollSchedule::from_table(&table, &readers);
    if schedule.entries.is_empty() {
        return Err(RunError::Invalid(format!("no tag is heard above {} dBm", m.sensitivity_dbm)));
    }
    let slot = slot_length_us(frame_duration_us(sc)?, m.slot_guard);
    let per_round = schedule.entries.len() as u64;
    let rounds = if m.polls == 0 { 1 } else { m.polls.div_ceil(per_round) };

    let mut total = rvlc_core::mac::PollingStats::default();
    for _ in 0..rounds {
        let s = run_polling_round(&readers, &tags, &schedule, slot)?;
        total.polls += s.polls;
        total.responses += s.responses;
        total.timeouts += s.timeouts;
        total.collisions += s.collisions;
        total.max_responses_per_slot = total.max_responses_per_slot.max(s.max_responses_per_slot);
        total.latencies.extend(s.latencies);
        total.events += s.events;
    }
    let lat: Vec<u64> = total.latencies.iter().map(|l| l.1).collect();
    let mean = if lat.is_empty() { None } else { Some(lat.iter().sum::<u64>() as f64 / lat.len() as f64) };
    Ok(vec![vec![
        seed.to_string(),
        readers.len().to_string(),
        tags.len().to_string(),
        table.len().to_string(),
        rounds.to_string(),
        total.polls.to_string(),
        total.responses.to_string(),
        total.timeouts.to_string(),
        total.collisions.to_string(),
        total.max_responses_per_slot.to_string(),
        opt(mean),
        lat.iter().max().map(u64::to_string).unwrap_or_default(),
        total.events.to_string(),
    ]])
}

fn mac_contention(sc: &Scenario, seed: u64) -> Result<Rows, RunError> {
    let m = &sc.mac;
    let readers: Vec<Node> = m.readers.iter().enumerate().map(|(i, p)| Node::reader(i as u32 + 1, *p)).collect();
    let traffic = rvlc_core::mac::TrafficModel { seed, ..m.traffic.clone() };
    let s = run_reader_contention(&readers, &traffic, &m.backoff)?;
    Ok(vec![vec![
        seed.to_string(),
        readers.len().to_string(),
        traffic.sensing_delay_us.to_string(),
        s.arrivals.to_string(),
        s.attempts.to_string(),
        s.successes.to_string(),
        s.collisions.to_string(),
        s.captured.to_string(),
        s.deferrals.to_string(),
        f(s.success_rate()),
        f(s.mean_delay_us()),
        s.delay_percentile_us(50.0).to_string(),
        s.delay_percentile_us(95.0).to_string(),
        s.delay_percentile_us(99.0).to_string(),
    ]])
}
