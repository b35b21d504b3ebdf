use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::NodeId;

/// Declaration order is the tie-break rank for simultaneous events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    PollSent,
    SlotStart,
    Response,
    Timeout,
    TxEnd,
    Collision,
    Arrival,
    BackoffEnd,
    TableUpdate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Event {
    pub time_us: u64,
    pub kind: EventKind,
    pub node: NodeId,
    /// Insertion counter: keeps fully tied events in FIFO order.
    pub seq: u64,
    /// Event-specific payload (slot index, serial, ...).
    pub data: u64,
}

/// Min-queue on `(time, kind, node, seq)`.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Event>>,
    next_seq: u64,
    now_us: u64,
    processed: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Events may not be scheduled in the past.
    pub fn push(&mut self, time_us: u64, kind: EventKind, node: NodeId, data: u64) {
        assert!(time_us >= self.now_us, "event at {time_us} scheduled after {}", self.now_us);
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Event { time_us, kind, node, seq, data }));
    }

    pub fn pop(&mut self) -> Option<Event> {
        let Reverse(e) = self.heap.pop()?;
        debug_assert!(e.time_us >= self.now_us);
        self.now_us = e.time_us;
        self.processed += 1;
        Some(e)
    }

    pub fn now_us(&self) -> u64 {
        self.now_us
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_by_time_kind_node() {
        let mut q = EventQueue::new();
        q.push(10, EventKind::Arrival, 2, 0);
        q.push(10, EventKind::Arrival, 1, 0);
        q.push(10, EventKind::TxEnd, 9, 0);
        q.push(5, EventKind::TableUpdate, 0, 0);
        q.push(10, EventKind::Arrival, 1, 7);
        let order: Vec<_> = std::iter::from_fn(|| q.pop()).map(|e| (e.time_us, e.kind, e.node, e.data)).collect();
        assert_eq!(
            order,
            vec![
                (5, EventKind::TableUpdate, 0, 0),
                (10, EventKind::TxEnd, 9, 0),
                (10, EventKind::Arrival, 1, 0),
                (10, EventKind::Arrival, 1, 7),
                (10, EventKind::Arrival, 2, 0),
            ]
        );
        assert_eq!(q.processed(), 5);
    }

    #[test]
    #[should_panic]
    fn rejects_past_events() {
        let mut q = EventQueue::new();
        q.push(10, EventKind::Arrival, 0, 0);
        q.pop();
        q.push(9, EventKind::Arrival, 0, 0);
    }
}
