//! Discrete-event simulation of the medium access layer.
//!
//! * polling: a reader addresses one tag per slot by serial number; tags never
//!   transmit unpolled
//! * contention: readers share the optical medium with carrier-sensing ALOHA
//!   and binary exponential backoff
//! * tag table: each tag is served by the reader it hears strongest
//!
//! Times are integer microseconds so runs are exactly reproducible.

mod contention;
mod events;
mod polling;
mod table;

pub use contention::{
    run_reader_contention, run_reader_contention_with_arrivals, BackoffConfig, ContentionStats, TrafficModel,
};
pub use events::{Event, EventKind, EventQueue};
pub use polling::{run_polling_round, slot_length_us, PollEntry, PollSchedule, PollingStats};
pub use table::{downlink_capture, update_vitag_table, VitagTable, CAPTURE_MARGIN_DB};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    Reader,
    /// `normal` is the reflector's facing direction; `None` means it faces
    /// whichever reader is asking.
    Tag {
        serial: u32,
        normal: Option<[f64; 3]>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub position: Position,
}

impl Node {
    pub fn reader(id: NodeId, position: Position) -> Self {
        Self { id, kind: NodeKind::Reader, position }
    }

    pub fn tag(id: NodeId, serial: u32, position: Position) -> Self {
        Self { id, kind: NodeKind::Tag { serial, normal: None }, position }
    }

    pub fn serial(&self) -> Option<u32> {
        match self.kind {
            NodeKind::Tag { serial, .. } => Some(serial),
            NodeKind::Reader => None,
        }
    }

    /// Angle between the tag's facing direction and the line to `from`, degrees.
    pub fn incidence_from(&self, from: &Position) -> f64 {
        let NodeKind::Tag { normal: Some(n), .. } = self.kind else {
            return 0.0;
        };
        let d = [from.x - self.position.x, from.y - self.position.y, from.z - self.position.z];
        let dn = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if dn == 0.0 {
            return 0.0;
        }
        let cos = ((d[0] * n[0] + d[1] * n[1] + d[2] * n[2]) / dn).clamp(-1.0, 1.0);
        cos.acos().to_degrees()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MacError {
    #[error("slot {slot} is assigned to more than one poll")]
    ScheduleOverlap { slot: u64 },
    #[error("node id {0} is used twice")]
    DuplicateId(NodeId),
    #[error("node {0} has the wrong kind for its role")]
    WrongKind(NodeId),
    #[error("poll issued by unknown reader {0}")]
    UnknownReader(NodeId),
    #[error("invalid MAC parameter: {0}")]
    InvalidParameter(&'static str),
}

fn check_nodes(readers: &[Node], tags: &[Node]) -> Result<(), MacError> {
    let mut seen = std::collections::BTreeSet::new();
    for n in readers.iter().chain(tags) {
        if !seen.insert(n.id) {
            return Err(MacError::DuplicateId(n.id));
        }
    }
    if let Some(n) = readers.iter().find(|n| n.kind != NodeKind::Reader) {
        return Err(MacError::WrongKind(n.id));
    }
    if let Some(n) = tags.iter().find(|n| n.serial().is_none()) {
        return Err(MacError::WrongKind(n.id));
    }
    Ok(())
}
