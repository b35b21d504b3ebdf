use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::events::{EventKind, EventQueue};
use super::table::{downlink_capture, CAPTURE_MARGIN_DB};
use super::{check_nodes, MacError, Node, Position};
use crate::channel::{received_power_dbm, ChannelConfig, GeometryConfig};

/// Integer backoff in `[1, cw]` slots; `cw` doubles per collision up to `cw_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackoffConfig {
    pub slot_us: u64,
    pub cw_min: u32,
    pub cw_max: u32,
}

impl Default for BackoffConfig {
    fn default() -> Self {
        Self { slot_us: 1_000, cw_min: 4, cw_max: 64 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficModel {
    /// Poisson downlink arrivals per reader.
    pub arrival_rate_hz: f64,
    pub frame_us: u64,
    pub duration_us: u64,
    /// Time before a reader notices another's transmission.
    pub sensing_delay_us: u64,
    /// Where the contended tag sits, for the capture count.
    pub tag_position: Position,
    pub seed: u64,
}

impl Default for TrafficModel {
    fn default() -> Self {
        Self {
            arrival_rate_hz: 5.0,
            frame_us: 4_000,
            duration_us: 10_000_000,
            sensing_delay_us: 0,
            tag_position: Position::default(),
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContentionStats {
    pub arrivals: u64,
    pub attempts: u64,
    pub successes: u64,
    /// Transmissions that overlapped another.
    pub collisions: u64,
    /// Overlapped transmissions the tag still decoded by capture.
    pub captured: u64,
    /// Attempts postponed because the medium was sensed busy.
    pub deferrals: u64,
    /// Arrival-to-delivery delay of each success, in delivery order.
    pub delays_us: Vec<u64>,
}

impl ContentionStats {
    pub fn success_rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.successes as f64 / self.attempts as f64
        }
    }

    pub fn mean_delay_us(&self) -> f64 {
        if self.delays_us.is_empty() {
            return 0.0;
        }
        self.delays_us.iter().sum::<u64>() as f64 / self.delays_us.len() as f64
    }

    /// Nearest-rank percentile of the delays.
    pub fn delay_percentile_us(&self, p: f64) -> u64 {
        if self.delays_us.is_empty() {
            return 0;
        }
        let mut d = self.delays_us.clone();
        d.sort_unstable();
        let rank = ((p / 100.0) * d.len() as f64).ceil().max(1.0) as usize;
        d[rank.min(d.len()) - 1]
    }
}

#[derive(Debug, Clone)]
struct Transmission {
    reader: usize,
    start: u64,
    end: u64,
    collided: bool,
}

#[derive(Debug, Clone)]
struct ReaderState {
    queue: VecDeque<u64>,
    cw: u32,
    busy: bool,
    power_at_tag_dbm: f64,
}

/// Carrier-sensing ALOHA among readers that all hear each other.
///
/// A reader with a frame senses the medium: it is busy if some transmission
/// began at least `sensing_delay_us` ago and has not ended. Busy means a
/// backoff of `[1, cw]` slots; idle means transmit. Transmissions that
/// overlap all collide and their readers back off with doubled `cw`.
pub fn run_reader_contention(
    readers: &[Node],
    traffic: &TrafficModel,
    backoff: &BackoffConfig,
) -> Result<ContentionStats, MacError> {
    if !(traffic.arrival_rate_hz > 0.0 && traffic.arrival_rate_hz.is_finite()) {
        return Err(MacError::InvalidParameter("arrival rate must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(traffic.seed);
    let gap = Exp::new(traffic.arrival_rate_hz / 1e6).expect("rate checked positive");
    // Arrivals are drawn up front, reader by reader, so each reader's stream
    // does not depend on how backoffs consume randomness.
    let mut arrivals = Vec::new();
    for i in 0..readers.len() {
        let mut t = 0.0;
        loop {
            t += gap.sample(&mut rng);
            if t >= traffic.duration_us as f64 {
                break;
            }
            arrivals.push((i, t as u64));
        }
    }
    simulate(readers, &arrivals, traffic, backoff, &mut rng)
}

/// As [`run_reader_contention`] with explicit `(reader index, time_us)` arrivals.
pub fn run_reader_contention_with_arrivals(
    readers: &[Node],
    arrivals: &[(usize, u64)],
    traffic: &TrafficModel,
    backoff: &BackoffConfig,
) -> Result<ContentionStats, MacError> {
    if let Some(&(i, _)) = arrivals.iter().find(|(i, _)| *i >= readers.len()) {
        return Err(MacError::UnknownReader(i as u32));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(traffic.seed);
    simulate(readers, arrivals, traffic, backoff, &mut rng)
}

fn simulate(
    readers: &[Node],
    arrivals: &[(usize, u64)],
    traffic: &TrafficModel,
    backoff: &BackoffConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ContentionStats, MacError> {
    check_nodes(readers, &[])?;
    if backoff.cw_min == 0 || backoff.cw_max < backoff.cw_min || backoff.slot_us == 0 {
        return Err(MacError::InvalidParameter("backoff needs 1 <= cw_min <= cw_max and a positive slot"));
    }
    if traffic.frame_us == 0 {
        return Err(MacError::InvalidParameter("frame length must be positive"));
    }

    let channel = ChannelConfig::default();
    let mut state: Vec<ReaderState> = readers
        .iter()
        .map(|r| {
            let geo = GeometryConfig::at_distance(r.position.distance_to(&traffic.tag_position).max(1e-3));
            ReaderState {
                queue: VecDeque::new(),
                cw: backoff.cw_min,
                busy: false,
                power_at_tag_dbm: received_power_dbm(&channel, &geo),
            }
        })
        .collect();
    let mut q = EventQueue::new();
    for &(i, t) in arrivals {
        q.push(t, EventKind::Arrival, readers[i].id, i as u64);
    }

    let mut stats = ContentionStats::default();
    // Transmissions still on air, and ended ones that may overlap those.
    let mut on_air: Vec<Transmission> = Vec::new();
    let mut ended: Vec<Transmission> = Vec::new();

    while let Some(ev) = q.pop() {
        let i = ev.data as usize;
        let now = ev.time_us;
        match ev.kind {
            EventKind::Arrival => {
                stats.arrivals += 1;
                state[i].queue.push_back(now);
                if state[i].queue.len() == 1 && !state[i].busy {
                    q.push(now, EventKind::BackoffEnd, ev.node, i as u64);
                }
            }
            EventKind::BackoffEnd => {
                if state[i].busy || state[i].queue.is_empty() {
                    continue;
                }
                if on_air.iter().any(|t| t.start + traffic.sensing_delay_us <= now) {
                    stats.deferrals += 1;
                    let slots = rng.random_range(1..=state[i].cw) as u64;
                    q.push(now + slots * backoff.slot_us, EventKind::BackoffEnd, ev.node, i as u64);
                    continue;
                }
                stats.attempts += 1;
                let collided = !on_air.is_empty();
                for t in on_air.iter_mut() {
                    t.collided = true;
                }
                if collided {
                    q.push(now, EventKind::Collision, ev.node, i as u64);
                }
                state[i].busy = true;
                on_air.push(Transmission { reader: i, start: now, end: now + traffic.frame_us, collided });
                q.push(now + traffic.frame_us, EventKind::TxEnd, ev.node, i as u64);
            }
            EventKind::Collision => {}
            EventKind::TxEnd => {
                let pos = on_air.iter().position(|t| t.reader == i).expect("transmission in flight");
                let tx = on_air.remove(pos);
                state[i].busy = false;
                if tx.collided {
                    stats.collisions += 1;
                    let overlapping: Vec<&Transmission> =
                        on_air.iter().chain(&ended).filter(|t| t.start < tx.end && tx.start < t.end).collect();
                    let mut powers = vec![state[i].power_at_tag_dbm];
                    powers.extend(overlapping.iter().map(|t| state[t.reader].power_at_tag_dbm));
                    if downlink_capture(&powers, CAPTURE_MARGIN_DB) == Some(0) {
                        stats.captured += 1;
                    }
                    state[i].cw = (state[i].cw * 2).min(backoff.cw_max);
                    let slots = rng.random_range(1..=state[i].cw) as u64;
                    q.push(now + slots * backoff.slot_us, EventKind::BackoffEnd, ev.node, i as u64);
                } else {
                    stats.successes += 1;
                    let arrived = state[i].queue.pop_front().expect("frame being sent");
                    stats.delays_us.push(now - arrived);
                    state[i].cw = backoff.cw_min;
                    if !state[i].queue.is_empty() {
                        q.push(now, EventKind::BackoffEnd, ev.node, i as u64);
                    }
                }
                ended.push(tx);
                let earliest = on_air.iter().map(|t| t.start).min().unwrap_or(u64::MAX);
                ended.retain(|t| t.end > earliest);
            }
            _ => unreachable!("contention schedules no {:?} events", ev.kind),
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn readers(n: u32) -> Vec<Node> {
        (0..n).map(|i| Node::reader(i, Position::new(i as f64 * 0.5, 1.5, 0.0))).collect()
    }

    #[test]
    fn single_reader_never_collides() {
        let s = run_reader_contention(
            &readers(1),
            &TrafficModel { arrival_rate_hz: 50.0, ..Default::default() },
            &BackoffConfig::default(),
        )
        .unwrap();
        assert_eq!(s.collisions, 0);
        assert!(s.successes > 0);
        assert_eq!(s.successes, s.attempts);
    }

    #[test]
    fn simultaneous_arrivals_serialize() {
        let s = run_reader_contention_with_arrivals(
            &readers(2),
            &[(0, 100), (1, 100)],
            &TrafficModel::default(),
            &BackoffConfig::default(),
        )
        .unwrap();
        assert_eq!((s.attempts, s.successes, s.collisions), (2, 2, 0));
        assert!(s.deferrals >= 1);
        // reader 0 goes first (lower id), reader 1 after at least one backoff slot past its end
        assert_eq!(s.delays_us[0], 4_000);
        assert!(s.delays_us[1] >= 4_000 + 1_000);
    }

    #[test]
    fn zero_sensing_delay_means_no_collisions() {
        for seed in 0..20 {
            let traffic = TrafficModel { arrival_rate_hz: 40.0, seed, duration_us: 2_000_000, ..Default::default() };
            let s = run_reader_contention(&readers(5), &traffic, &BackoffConfig::default()).unwrap();
            assert_eq!(s.collisions, 0, "seed {seed}");
        }
    }

    #[test]
    fn sensing_delay_allows_collisions() {
        let traffic =
            TrafficModel { arrival_rate_hz: 40.0, sensing_delay_us: 500, duration_us: 5_000_000, ..Default::default() };
        let s = run_reader_contention(&readers(5), &traffic, &BackoffConfig::default()).unwrap();
        assert!(s.collisions > 0);
        assert!(s.successes > 0);
    }

    #[test]
    fn deterministic_per_seed() {
        let traffic = TrafficModel { arrival_rate_hz: 30.0, sensing_delay_us: 300, seed: 9, ..Default::default() };
        let a = run_reader_contention(&readers(5), &traffic, &BackoffConfig::default()).unwrap();
        let b = run_reader_contention(&readers(5), &traffic, &BackoffConfig::default()).unwrap();
        assert_eq!(a, b);
        let c = run_reader_contention(&readers(5), &TrafficModel { seed: 10, ..traffic }, &BackoffConfig::default())
            .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn percentiles() {
        let s = ContentionStats { delays_us: vec![5, 1, 3, 2, 4], ..Default::default() };
        assert_eq!(s.delay_percentile_us(50.0), 3);
        assert_eq!(s.delay_percentile_us(100.0), 5);
        assert_eq!(s.delay_percentile_us(1.0), 1);
    }
}
