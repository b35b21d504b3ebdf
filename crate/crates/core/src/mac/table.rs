use std::collections::BTreeMap;

use super::{Node, NodeId};
use crate::channel::{received_power_dbm, ChannelConfig, GeometryConfig};

/// A downlink survives overlap when it is this far above the sum of the rest.
pub const CAPTURE_MARGIN_DB: f64 = 6.0;

/// Best serving reader per tag serial.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VitagTable {
    assignments: BTreeMap<u32, (NodeId, f64)>,
}

impl VitagTable {
    pub fn reader_for(&self, serial: u32) -> Option<NodeId> {
        self.assignments.get(&serial).map(|a| a.0)
    }

    pub fn power_dbm(&self, serial: u32) -> Option<f64> {
        self.assignments.get(&serial).map(|a| a.1)
    }

    /// Serials served by `reader`, ascending.
    pub fn tags_of(&self, reader: NodeId) -> Vec<u32> {
        self.assignments.iter().filter(|(_, a)| a.0 == reader).map(|(s, _)| *s).collect()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// Assigns every tag to the reader with the highest received power, lowest
/// reader id on ties. Tags no reader hears above `sensitivity_dbm` are left out.
pub fn update_vitag_table(
    readers: &[Node],
    tags: &[Node],
    channel: &ChannelConfig,
    sensitivity_dbm: f64,
) -> VitagTable {
    let mut sorted: Vec<&Node> = readers.iter().collect();
    sorted.sort_by_key(|r| r.id);
    let mut assignments = BTreeMap::new();
    for tag in tags {
        let Some(serial) = tag.serial() else { continue };
        let mut best: Option<(NodeId, f64)> = None;
        for r in &sorted {
            let distance_m = tag.position.distance_to(&r.position).max(1e-3);
            let incidence = tag.incidence_from(&r.position).min(89.999);
            let geo = GeometryConfig { distance_m, incidence_angle_deg: incidence, ..GeometryConfig::default() };
            let p = received_power_dbm(channel, &geo);
            if p >= sensitivity_dbm && best.is_none_or(|(_, bp)| p > bp) {
                best = Some((r.id, p));
            }
        }
        if let Some(b) = best {
            assignments.insert(serial, b);
        }
    }
    VitagTable { assignments }
}

/// Index of the downlink a tag decodes when several overlap, if any.
pub fn downlink_capture(powers_dbm: &[f64], margin_db: f64) -> Option<usize> {
    let (best, &strongest) = powers_dbm.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    let others_mw: f64 =
        powers_dbm.iter().enumerate().filter(|(i, _)| *i != best).map(|(_, p)| 10f64.powf(p / 10.0)).sum();
    if others_mw == 0.0 || strongest - 10.0 * others_mw.log10() >= margin_db {
        Some(best)
    } else {
        None
    }
}
