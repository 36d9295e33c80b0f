//! Per-appliance fingerprints learned from training signals: transition
//! magnitude intervals, participation indices and behavioral rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Sub;

use num_traits::{FromPrimitive, Num, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::modes::{ModeId, StateSet, OFF_MODE};
use crate::scalar::Scalar;
use crate::signal::EventRecord;

/// Samples after an event searched for an overshoot peak.
pub const OVERSHOOT_WINDOW: usize = 8;
pub const DEFAULT_OVERSHOOT_FLOOR: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Rising,
    Falling,
}

/// Ordered pair of modes of one appliance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModePair {
    pub from: ModeId,
    pub to: ModeId,
}

impl ModePair {
    pub fn new(from: ModeId, to: ModeId) -> Self {
        ModePair { from, to }
    }

    pub fn starts_from_off(&self) -> bool {
        self.from == OFF_MODE && self.to != OFF_MODE
    }

    pub fn ends_at_off(&self) -> bool {
        self.to == OFF_MODE && self.from != OFF_MODE
    }
}

impl fmt::Display for ModePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

/// A mode transition of one appliance and the magnitude range of the event
/// it produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Transition<F = f64> {
    pub appliance: String,
    pub from: ModeId,
    pub to: ModeId,
    pub interval: Interval<F>,
    pub direction: Direction,
    /// Trained participation index; zero until computed.
    #[serde(default)]
    pub participation: F,
}

impl<F: Scalar> Transition<F> {
    /// Transition between two existing modes. `None` for a self-loop or an
    /// unknown mode.
    pub fn between(appliance: &str, states: &StateSet<F>, from: ModeId, to: ModeId) -> Option<Self> {
        if from == to {
            return None;
        }
        let a = states.get(from)?;
        let b = states.get(to)?;
        let (interval, direction) = if b.centroid > a.centroid {
            (transition_interval(b.interval, a.interval), Direction::Rising)
        } else {
            (transition_interval(a.interval, b.interval), Direction::Falling)
        };
        Some(Transition {
            appliance: appliance.to_string(),
            from,
            to,
            interval,
            direction,
            participation: F::zero(),
        })
    }

    pub fn pair(&self) -> ModePair {
        ModePair::new(self.from, self.to)
    }

    /// True when an event of this sign and magnitude falls in the interval.
    pub fn admits(&self, event: &EventRecord<F>) -> bool {
        self.direction_matches(event) && self.interval.contains(event.magnitude.abs())
    }

    pub fn direction_matches(&self, event: &EventRecord<F>) -> bool {
        match self.direction {
            Direction::Rising => event.magnitude > F::zero(),
            Direction::Falling => event.magnitude < F::zero(),
        }
    }
}

/// Magnitude interval of a move between a higher state `high` and a lower
/// state `low`: `[high.lo - low.hi, high.hi - low.lo]`, lower bound clamped
/// at zero when the states overlap.
pub fn transition_interval<T>(high: Interval<T>, low: Interval<T>) -> Interval<T>
where
    T: Copy + PartialOrd + Sub<Output = T> + Zero,
{
    let mut lo = high.lo - low.hi;
    if lo < T::zero() {
        lo = T::zero();
    }
    Interval::new(lo, high.hi - low.lo)
}

/// Maps each event of a single-appliance signal to the modes containing its
/// pre and post levels (nearest state when outside all of them). Events whose
/// levels resolve to the same mode are not transitions and are dropped.
pub fn label_training_events<F: Scalar>(
    appliance: &str,
    events: &[EventRecord<F>],
    states: &StateSet<F>,
) -> Vec<(EventRecord<F>, Transition<F>)> {
    events
        .iter()
        .filter_map(|e| {
            let from = states.nearest_mode(e.pre_level);
            let to = states.nearest_mode(e.post_level);
            Transition::between(appliance, states, from, to).map(|t| (*e, t))
        })
        .collect()
}

/// Distinct observed transitions and every ordered mode pair (self pairs
/// included) that never occurred.
pub fn observed_transitions<F: Scalar>(
    labeled: &[(EventRecord<F>, Transition<F>)],
    states: &StateSet<F>,
) -> (Vec<ModePair>, Vec<ModePair>) {
    let observed: BTreeSet<ModePair> = labeled
        .iter()
        .map(|(_, t)| t.pair())
        .filter(|p| p.from != p.to)
        .collect();
    let n = states.len() as ModeId;
    let forbidden = (0..n)
        .flat_map(|a| (0..n).map(move |b| ModePair::new(a, b)))
        .filter(|p| !observed.contains(p))
        .collect();
    (observed.into_iter().collect(), forbidden)
}

/// Occurrences of one transition on one training day, next to the number
/// of events detected in the aggregate signal that day.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayCount {
    pub day: i64,
    pub transition: usize,
    pub total: usize,
}

/// Which days the participation average runs over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticipationDays {
    /// Only days on which the transition happened.
    #[default]
    Occurring,
    /// Every training day.
    All,
}

/// Daily average share of a transition among all events of the day.
///
/// Generic over the number type so the arithmetic can be checked exactly
/// with rationals.
pub fn participation_index<R>(days: &[DayCount], variant: ParticipationDays) -> Result<R>
where
    R: Num + FromPrimitive,
{
    let conv = |n: usize| {
        R::from_usize(n).ok_or_else(|| Error::DataConsistency(format!("count {n} not representable")))
    };
    let mut sum = R::zero();
    let mut n_days = 0usize;
    for d in days {
        if d.transition > 0 && d.total == 0 {
            return Err(Error::DataConsistency(format!(
                "day {} has {} transitions but no events",
                d.day, d.transition
            )));
        }
        if d.transition > 0 {
            sum = sum + conv(d.transition)? / conv(d.total)?;
        }
        if d.transition > 0 || variant == ParticipationDays::All {
            n_days += 1;
        }
    }
    if n_days == 0 || sum.is_zero() {
        return Ok(R::zero());
    }
    Ok(sum / conv(n_days)?)
}

/// Behavioral fingerprints of an appliance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct BehaviorSet<F = f64> {
    /// Transition whose absence on a day means the appliance was off all day.
    pub all_or_none_daily: Option<ModePair>,
    /// Transitions seen on every active training day.
    #[serde(default)]
    pub signature_candidates: Vec<ModePair>,
    pub forbidden_transitions: Vec<ModePair>,
    /// Smallest overshoot above the settled level seen at rising transitions.
    pub overshoot_min: Option<F>,
    /// Shortest OFF period between two runs, seconds.
    pub min_off_gap: Option<f64>,
}

/// One labeled training event with the data behavioral extraction needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainingEvent<F = f64> {
    pub event: EventRecord<F>,
    pub pair: ModePair,
    /// Raw peak above the filtered post-event level, watts.
    pub overshoot: F,
    /// Epoch seconds of the event.
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingDay<F = f64> {
    pub day: i64,
    pub events: Vec<TrainingEvent<F>>,
}

/// Height of the raw signal's peak right after `event` above its filtered
/// post-event level; zero when the raw signal stays below it.
pub fn overshoot_height<F: Scalar>(raw: &[F], event: &EventRecord<F>) -> F {
    let from = (event.index + 1).min(raw.len());
    let to = (event.index + 1 + OVERSHOOT_WINDOW).min(raw.len());
    let peak = raw[from..to].iter().copied().fold(F::neg_infinity(), F::max);
    (peak - event.post_level).max(F::zero())
}

/// Extracts the daily all-or-none pattern, the overshoot signature and the
/// minimum OFF dwell from labeled training days.
pub fn extract_behaviors<F: Scalar>(
    days: &[TrainingDay<F>],
    states: &StateSet<F>,
    transitions: &[Transition<F>],
    forbidden: &[ModePair],
    overshoot_floor: F,
) -> BehaviorSet<F> {
    let mut behaviors = BehaviorSet {
        forbidden_transitions: forbidden.to_vec(),
        ..BehaviorSet::default()
    };

    // All-or-none: every day visits either all non-OFF modes or none.
    let non_off: BTreeSet<ModeId> = states.non_off().map(|s| s.mode).collect();
    let mut active_days = 0usize;
    let mut pattern_holds = non_off.len() >= 2;
    let mut every_day: Option<BTreeSet<ModePair>> = None;
    for d in days {
        let visited: BTreeSet<ModeId> = d
            .events
            .iter()
            .flat_map(|e| [e.pair.from, e.pair.to])
            .filter(|m| *m != OFF_MODE)
            .collect();
        if visited.is_empty() {
            continue;
        }
        active_days += 1;
        if visited != non_off {
            pattern_holds = false;
        }
        let seen: BTreeSet<ModePair> = d.events.iter().map(|e| e.pair).collect();
        every_day = Some(match every_day {
            None => seen,
            Some(acc) => acc.intersection(&seen).copied().collect(),
        });
    }
    if pattern_holds && active_days > 0 {
        let candidates: Vec<ModePair> = every_day.unwrap_or_default().into_iter().collect();
        let intervals: BTreeMap<ModePair, Interval<F>> =
            transitions.iter().map(|t| (t.pair(), t.interval)).collect();
        behaviors.all_or_none_daily = candidates
            .iter()
            .copied()
            .find(|c| match intervals.get(c) {
                Some(iv) => intervals
                    .iter()
                    .all(|(p, other)| p == c || !iv.overlaps(other)),
                None => false,
            });
        behaviors.signature_candidates = candidates;
    }

    // Overshoot: every rising transition must clear the floor.
    let rising: Vec<F> = days
        .iter()
        .flat_map(|d| &d.events)
        .filter(|e| e.event.is_rising())
        .map(|e| e.overshoot)
        .collect();
    if !rising.is_empty() && rising.iter().all(|&h| h >= overshoot_floor) {
        behaviors.overshoot_min = rising.iter().copied().reduce(F::min);
    }

    // Minimum OFF dwell between two runs.
    let mut last_off: Option<f64> = None;
    let mut min_gap: Option<f64> = None;
    for e in days.iter().flat_map(|d| &d.events) {
        if e.pair.starts_from_off() {
            if let Some(t0) = last_off {
                let gap = e.time - t0;
                min_gap = Some(min_gap.map_or(gap, |g: f64| g.min(gap)));
            }
        }
        if e.pair.ends_at_off() {
            last_off = Some(e.time);
        }
    }
    behaviors.min_off_gap = min_gap;
    behaviors
}

/// Learned artifact for one appliance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct ApplianceModel<F = f64> {
    pub appliance: String,
    pub states: StateSet<F>,
    /// Transitions observed in training, ordered by mode pair.
    pub transitions: Vec<Transition<F>>,
    pub behaviors: BehaviorSet<F>,
    /// Set when training saw no events for the appliance.
    #[serde(default)]
    pub inactive: bool,
}

impl<F: Scalar> ApplianceModel<F> {
    pub fn transition(&self, pair: ModePair) -> Option<&Transition<F>> {
        self.transitions.iter().find(|t| t.pair() == pair)
    }

    pub fn participation(&self, pair: ModePair) -> F {
        self.transition(pair).map_or(F::zero(), |t| t.participation)
    }

    pub fn is_forbidden(&self, pair: ModePair) -> bool {
        self.behaviors.forbidden_transitions.contains(&pair)
    }
}

/// Re-picks each all-or-none appliance's signature so that its interval
/// overlaps no transition of any other appliance. Appliances without such a
/// candidate lose the rule.
pub fn select_signatures<F: Scalar>(models: &mut [ApplianceModel<F>]) {
    let all: Vec<(usize, ModePair, Interval<F>)> = models
        .iter()
        .enumerate()
        .flat_map(|(i, m)| m.transitions.iter().map(move |t| (i, t.pair(), t.interval)))
        .collect();
    for (i, model) in models.iter_mut().enumerate() {
        if model.behaviors.signature_candidates.is_empty() {
            continue;
        }
        let pick = model.behaviors.signature_candidates.iter().copied().find(|c| {
            let Some(iv) = model.transition(*c).map(|t| t.interval) else {
                return false;
            };
            all.iter()
                .filter(|(j, p, _)| !(*j == i && p == c))
                .all(|(_, _, other)| !iv.overlaps(other))
        });
        model.behaviors.all_or_none_daily = pick;
    }
}
