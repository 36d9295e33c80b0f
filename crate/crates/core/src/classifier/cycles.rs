//! Splitting the aggregate's events into cycles between all-OFF periods.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::features::ApplianceModel;
use crate::scalar::Scalar;
use crate::signal::EventRecord;

pub const DEFAULT_ALL_OFF_MARGIN: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    /// Position of the first event in the event list.
    pub start_event: usize,
    /// Position of the last event, inclusive.
    pub end_event: usize,
    /// The first event leaves an all-OFF level.
    pub starts_at_off: bool,
    /// The last event reaches an all-OFF level.
    pub ends_at_off: bool,
}

impl Cycle {
    pub fn events(&self) -> RangeInclusive<usize> {
        self.start_event..=self.end_event
    }

    pub fn len(&self) -> usize {
        self.end_event - self.start_event + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bounded by all-OFF on both sides, so it must return to all-OFF.
    pub fn is_closed(&self) -> bool {
        self.starts_at_off && self.ends_at_off
    }
}

/// Aggregate level below which every appliance is considered OFF: the sum of
/// the OFF states' upper bounds plus `margin`.
pub fn all_off_threshold<F: Scalar>(models: &[ApplianceModel<F>], margin: F) -> F {
    models.iter().map(|m| m.states.off().interval.hi).fold(margin, |a, b| a + b)
}

/// Partitions `events` (detected on `filtered`) into cycles.
pub fn segment_cycles<F: Scalar>(filtered: &[F], events: &[EventRecord<F>], threshold: F) -> Vec<Cycle> {
    if events.is_empty() {
        return Vec::new();
    }
    if !filtered.iter().any(|&v| v < threshold) {
        log::warn!("aggregate never drops below the all-OFF level {threshold}; using one cycle");
        return vec![Cycle {
            start_event: 0,
            end_event: events.len() - 1,
            starts_at_off: false,
            ends_at_off: false,
        }];
    }

    let mut cycles = Vec::new();
    let mut open: Option<(usize, bool)> = None;
    for (i, e) in events.iter().enumerate() {
        let leaves_off = e.pre_level < threshold;
        if let Some((start, at_off)) = open {
            if leaves_off {
                // An all-OFF stretch slipped between events without one
                // reaching it; close the running cycle there.
                cycles.push(Cycle { start_event: start, end_event: i - 1, starts_at_off: at_off, ends_at_off: true });
                open = None;
            }
        }
        if open.is_none() {
            open = Some((i, leaves_off));
        }
        if e.post_level < threshold {
            let (start, at_off) = open.take().expect("opened above");
            cycles.push(Cycle { start_event: start, end_event: i, starts_at_off: at_off, ends_at_off: true });
        }
    }
    if let Some((start, at_off)) = open {
        cycles.push(Cycle { start_event: start, end_event: events.len() - 1, starts_at_off: at_off, ends_at_off: false });
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(index: usize, pre: f64, post: f64) -> EventRecord {
        EventRecord::new(index, pre, post)
    }

    #[test]
    fn three_disjoint_runs() {
        let events = [
            ev(1, 2.0, 500.0),
            ev(5, 500.0, 2.0),
            ev(9, 2.0, 800.0),
            ev(12, 800.0, 1500.0),
            ev(14, 1500.0, 3.0),
            ev(20, 3.0, 100.0),
            ev(22, 100.0, 2.0),
        ];
        let filtered = [2.0; 30];
        let cycles = segment_cycles(&filtered, &events, 15.0);
        let spans: Vec<_> = cycles.iter().map(|c| (c.start_event, c.end_event, c.is_closed())).collect();
        assert_eq!(spans, vec![(0, 1, true), (2, 4, true), (5, 6, true)]);
    }

    #[test]
    fn open_ends_are_flagged() {
        let events = [ev(1, 300.0, 2.0), ev(4, 2.0, 200.0)];
        let cycles = segment_cycles(&[2.0, 300.0], &events, 15.0);
        assert_eq!(cycles.len(), 2);
        assert!(!cycles[0].starts_at_off && cycles[0].ends_at_off);
        assert!(cycles[1].starts_at_off && !cycles[1].ends_at_off);
    }

    #[test]
    fn never_off_is_one_cycle() {
        let events = [ev(1, 300.0, 500.0), ev(4, 500.0, 300.0)];
        let cycles = segment_cycles(&[300.0, 500.0, 300.0], &events, 15.0);
        assert_eq!(cycles, vec![Cycle { start_event: 0, end_event: 1, starts_at_off: false, ends_at_off: false }]);
    }

    #[test]
    fn all_off_signal_has_no_cycles() {
        assert!(segment_cycles::<f64>(&[1.0; 10], &[], 15.0).is_empty());
    }
}
