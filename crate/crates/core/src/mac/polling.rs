use std::collections::BTreeMap;

use super::events::{EventKind, EventQueue};
use super::table::VitagTable;
use super::{check_nodes, MacError, Node, NodeId};

/// Uplink frame duration plus a guard fraction, rounded up to whole microseconds.
pub fn slot_length_us(frame_us: f64, guard_fraction: f64) -> u64 {
    (frame_us * (1.0 + guard_fraction)).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PollEntry {
    pub reader: NodeId,
    pub serial: u32,
    pub slot: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PollSchedule {
    pub entries: Vec<PollEntry>,
}

impl PollSchedule {
    /// One reader polling `serials` in order, one per slot from slot 0.
    pub fn sequential(reader: NodeId, serials: &[u32]) -> Self {
        let entries =
            serials.iter().enumerate().map(|(i, &serial)| PollEntry { reader, serial, slot: i as u64 }).collect();
        Self { entries }
    }

    /// Every reader polls the tags of its table; readers take turns so no two polls share a slot.
    pub fn from_table(table: &VitagTable, readers: &[Node]) -> Self {
        let mut entries = Vec::new();
        for r in readers {
            for serial in table.tags_of(r.id) {
                entries.push(PollEntry { reader: r.id, serial, slot: entries.len() as u64 });
            }
        }
        Self { entries }
    }

    fn check(&self) -> Result<(), MacError> {
        let mut used = std::collections::BTreeSet::new();
        for e in &self.entries {
            if !used.insert(e.slot) {
                return Err(MacError::ScheduleOverlap { slot: e.slot });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PollingStats {
    pub polls: u64,
    pub responses: u64,
    pub timeouts: u64,
    /// Slots in which more than one tag answered.
    pub collisions: u64,
    /// Poll receptions discarded by tags whose serial did not match.
    pub ignored: u64,
    /// Most tag transmissions seen in a single slot.
    pub max_responses_per_slot: u64,
    /// `(serial, latency_us)` per response: slot start relative to the round start.
    pub latencies: Vec<(u32, u64)>,
    pub events: u64,
}

/// Runs one polling round. Each poll opens its slot; the tag with the polled
/// serial answers inside that slot, all others ignore the poll. A slot with no
/// answer ends in a timeout.
pub fn run_polling_round(
    readers: &[Node],
    tags: &[Node],
    schedule: &PollSchedule,
    slot_us: u64,
) -> Result<PollingStats, MacError> {
    check_nodes(readers, tags)?;
    schedule.check()?;
    if slot_us == 0 {
        return Err(MacError::InvalidParameter("slot length must be positive"));
    }
    if let Some(e) = schedule.entries.iter().find(|e| !readers.iter().any(|r| r.id == e.reader)) {
        return Err(MacError::UnknownReader(e.reader));
    }

    let mut q = EventQueue::new();
    for (i, e) in schedule.entries.iter().enumerate() {
        q.push(e.slot * slot_us, EventKind::PollSent, e.reader, i as u64);
    }

    let mut stats = PollingStats::default();
    let mut per_slot: BTreeMap<u64, u64> = BTreeMap::new();
    while let Some(ev) = q.pop() {
        match ev.kind {
            EventKind::PollSent => {
                stats.polls += 1;
                let entry = schedule.entries[ev.data as usize];
                let mut answered = false;
                for t in tags {
                    if t.serial() == Some(entry.serial) {
                        q.push(ev.time_us, EventKind::Response, t.id, entry.slot);
                        answered = true;
                    } else {
                        stats.ignored += 1;
                    }
                }
                if !answered {
                    q.push(ev.time_us + slot_us, EventKind::Timeout, entry.reader, entry.slot);
                }
            }
            EventKind::Response => {
                stats.responses += 1;
                *per_slot.entry(ev.data).or_default() += 1;
                let serial = tags.iter().find(|t| t.id == ev.node).and_then(Node::serial).expect("responder is a tag");
                stats.latencies.push((serial, ev.time_us));
            }
            EventKind::Timeout => stats.timeouts += 1,
            _ => unreachable!("polling schedules no {:?} events", ev.kind),
        }
    }
    stats.collisions = per_slot.values().filter(|&&n| n > 1).count() as u64;
    stats.max_responses_per_slot = per_slot.values().copied().max().unwrap_or(0);
    stats.events = q.processed();
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::Position;

    fn tags(n: u32) -> Vec<Node> {
        (0..n).map(|i| Node::tag(100 + i, 1000 + i, Position::new(i as f64, 1.0, 0.0))).collect()
    }

    #[test]
    fn three_tags_three_responses() {
        let r = [Node::reader(1, Position::default())];
        let s = PollSchedule::sequential(1, &[1000, 1001, 1002]);
        let stats = run_polling_round(&r, &tags(3), &s, 100).unwrap();
        assert_eq!((stats.polls, stats.responses, stats.collisions, stats.timeouts), (3, 3, 0, 0));
        assert_eq!(stats.ignored, 6);
    }

    #[test]
    fn absent_serial_times_out() {
        let r = [Node::reader(1, Position::default())];
        let s = PollSchedule::sequential(1, &[1000, 4242]);
        let stats = run_polling_round(&r, &tags(2), &s, 100).unwrap();
        assert_eq!((stats.responses, stats.timeouts), (1, 1));
    }

    #[test]
    fn latency_is_slot_position_times_length() {
        let r = [Node::reader(1, Position::default())];
        let serials: Vec<u32> = (0..10).map(|i| 1009 - i).collect();
        let slot = slot_length_us(80_000.0, 0.1);
        assert_eq!(slot, 88_000);
        let stats = run_polling_round(&r, &tags(10), &PollSchedule::sequential(1, &serials), slot).unwrap();
        for (pos, &serial) in serials.iter().enumerate() {
            let lat = stats.latencies.iter().find(|(s, _)| *s == serial).unwrap().1;
            assert_eq!(lat, pos as u64 * slot);
        }
    }

    #[test]
    fn overlapping_schedule_rejected() {
        let r = [Node::reader(1, Position::default())];
        let mut s = PollSchedule::sequential(1, &[1000, 1001]);
        s.entries[1].slot = 0;
        assert_eq!(run_polling_round(&r, &tags(2), &s, 100), Err(MacError::ScheduleOverlap { slot: 0 }));
    }

    #[test]
    fn duplicated_serial_is_a_collision() {
        let r = [Node::reader(1, Position::default())];
        let mut t = tags(2);
        t[1].kind = crate::mac::NodeKind::Tag { serial: 1000, normal: None };
        let stats = run_polling_round(&r, &t, &PollSchedule::sequential(1, &[1000]), 100).unwrap();
        assert_eq!((stats.collisions, stats.max_responses_per_slot), (1, 2));
    }
}
