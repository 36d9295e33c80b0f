//! Time-series model shared by every stage: uniformly sampled power signals,
//! detected events, grid alignment and aggregation.
//!
//! Time is always `f64` epoch seconds; only power values are generic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Default hold age beyond which an aligned sample is reported as a gap.
pub const DEFAULT_MAX_GAP: f64 = 60.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Appliance,
    Aggregate,
}

/// Uniformly sampled active-power series. Sample `t` is taken at
/// `start_time + t * sample_period`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct PowerSignal<F = f64> {
    values: Vec<F>,
    start_time: f64,
    sample_period: f64,
    source_id: String,
    kind: SignalKind,
}

impl<F: Scalar> PowerSignal<F> {
    pub fn new(
        values: Vec<F>,
        start_time: f64,
        sample_period: f64,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        Self::with_kind(values, start_time, sample_period, source_id, SignalKind::Appliance)
    }

    pub fn with_kind(
        values: Vec<F>,
        start_time: f64,
        sample_period: f64,
        source_id: impl Into<String>,
        kind: SignalKind,
    ) -> Result<Self> {
        let source_id = source_id.into();
        if values.is_empty() {
            return Err(Error::InvalidSignal(format!("{source_id}: no samples")));
        }
        if !(sample_period > 0.0 && sample_period.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "{source_id}: sample period must be positive, got {sample_period}"
            )));
        }
        if !start_time.is_finite() {
            return Err(Error::InvalidSignal(format!("{source_id}: non-finite start time")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < F::zero()) {
            return Err(Error::InvalidSignal(format!(
                "{source_id}: sample {i} is {} (must be finite and non-negative)",
                values[i]
            )));
        }
        Ok(PowerSignal {
            values,
            start_time,
            sample_period,
            source_id,
            kind,
        })
    }

    /// Same grid and metadata, new samples.
    pub fn with_values(&self, values: Vec<F>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Misaligned(format!(
                "replacement for {} has {} samples, expected {}",
                self.source_id,
                values.len(),
                self.values.len()
            )));
        }
        Self::with_kind(
            values,
            self.start_time,
            self.sample_period,
            self.source_id.clone(),
            self.kind,
        )
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn kind(&self) -> SignalKind {
        self.kind
    }

    pub fn end_time(&self) -> f64 {
        self.time_at(self.values.len() - 1)
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.start_time + index as f64 * self.sample_period
    }

    /// UTC day number (days since the epoch) of sample `index`.
    pub fn day_of(&self, index: usize) -> i64 {
        (self.time_at(index) / SECONDS_PER_DAY).floor() as i64
    }

    /// Distinct day numbers covered by the signal, ascending.
    pub fn days(&self) -> Vec<i64> {
        let first = self.day_of(0);
        let last = self.day_of(self.len() - 1);
        (first..=last).collect()
    }

    /// Contiguous pieces of the signal whose samples fall on one of `days`.
    pub fn segments_for_days(&self, days: &[i64]) -> Vec<PowerSignal<F>> {
        let mut out = Vec::new();
        let mut start: Option<usize> = None;
        for i in 0..=self.len() {
            let keep = i < self.len() && days.contains(&self.day_of(i));
            match (keep, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    out.push(self.slice(s, i));
                    start = None;
                }
                _ => {}
            }
        }
        out
    }

    /// Sub-signal of samples `[from, to)`.
    pub fn slice(&self, from: usize, to: usize) -> PowerSignal<F> {
        assert!(from < to && to <= self.len(), "slice {from}..{to} out of range");
        PowerSignal {
            values: self.values[from..to].to_vec(),
            start_time: self.time_at(from),
            sample_period: self.sample_period,
            source_id: self.source_id.clone(),
            kind: self.kind,
        }
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && self.start_time == other.start_time
            && self.sample_period == other.sample_period
    }
}

/// A detected change of signal level.
///
/// `index` is the last sample before the change; the new level is first seen
/// at a later sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct EventRecord<F = f64> {
    pub index: usize,
    pub magnitude: F,
    pub pre_level: F,
    pub post_level: F,
}

impl<F: Scalar> EventRecord<F> {
    pub fn new(index: usize, pre_level: F, post_level: F) -> Self {
        EventRecord {
            index,
            magnitude: post_level - pre_level,
            pre_level,
            post_level,
        }
    }

    pub fn is_rising(&self) -> bool {
        self.magnitude > F::zero()
    }
}

/// Irregularly timed samples, as read from a logger channel.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSeries<F = f64> {
    pub source_id: String,
    pub times: Vec<f64>,
    pub values: Vec<F>,
}

impl<F: Scalar> RawSeries<F> {
    pub fn new(source_id: impl Into<String>, times: Vec<f64>, values: Vec<F>) -> Result<Self> {
        let source_id = source_id.into();
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidSignal(format!(
                "{source_id}: {} timestamps for {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSignal(format!(
                "{source_id}: timestamps must be strictly increasing"
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < F::zero()) {
            return Err(Error::InvalidSignal(format!(
                "{source_id}: samples must be finite and non-negative"
            )));
        }
        Ok(RawSeries {
            source_id,
            times,
            values,
        })
    }
}

/// Grid positions whose held sample is older than the allowed gap.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub max_gap: f64,
    pub gaps: Vec<Gap>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub source_id: String,
    /// First grid index of the gap.
    pub start: usize,
    /// One past the last grid index of the gap.
    pub end: usize,
}

trait Timed<F> {
    fn id(&self) -> &str;
    fn count(&self) -> usize;
    fn time(&self, i: usize) -> f64;
    fn value(&self, i: usize) -> F;

    /// Index of the last sample at or before `t`. Caller guarantees
    /// `t >= time(0)`.
    fn hold_index(&self, t: f64) -> usize;
}

impl<F: Scalar> Timed<F> for PowerSignal<F> {
    fn id(&self) -> &str {
        &self.source_id
    }
    fn count(&self) -> usize {
        self.values.len()
    }
    fn time(&self, i: usize) -> f64 {
        self.time_at(i)
    }
    fn value(&self, i: usize) -> F {
        self.values[i]
    }
    fn hold_index(&self, t: f64) -> usize {
        let n = self.values.len();
        let guess = ((t - self.start_time) / self.sample_period).floor();
        let mut j = if guess <= 0.0 {
            0
        } else {
            (guess as usize).min(n - 1)
        };
        while j + 1 < n && self.time_at(j + 1) <= t {
            j += 1;
        }
        while j > 0 && self.time_at(j) > t {
            j -= 1;
        }
        j
    }
}

impl<F: Scalar> Timed<F> for RawSeries<F> {
    fn id(&self) -> &str {
        &self.source_id
    }
    fn count(&self) -> usize {
        self.times.len()
    }
    fn time(&self, i: usize) -> f64 {
        self.times[i]
    }
    fn value(&self, i: usize) -> F {
        self.values[i]
    }
    fn hold_index(&self, t: f64) -> usize {
        self.times.partition_point(|&x| x <= t).saturating_sub(1)
    }
}

fn align_timed<F: Scalar, S: Timed<F>>(
    inputs: &[S],
    period: f64,
    max_gap: f64,
) -> Result<(Vec<PowerSignal<F>>, GapReport)> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidSignal(format!(
            "alignment period must be positive, got {period}"
        )));
    }
    if inputs.is_empty() {
        return Ok((Vec::new(), GapReport { max_gap, gaps: Vec::new() }));
    }
    let start = inputs
        .iter()
        .map(|s| s.time(0))
        .fold(f64::NEG_INFINITY, f64::max);
    let end = inputs
        .iter()
        .map(|s| s.time(s.count() - 1))
        .fold(f64::INFINITY, f64::min);
    if start > end {
        return Err(Error::AlignmentDomain);
    }
    let mut n = ((end - start) / period).floor() as usize + 1;
    while n > 1 && start + (n - 1) as f64 * period > end {
        n -= 1;
    }
    while start + n as f64 * period <= end {
        n += 1;
    }

    let mut report = GapReport {
        max_gap,
        gaps: Vec::new(),
    };
    let mut out = Vec::with_capacity(inputs.len());
    for s in inputs {
        let mut values = Vec::with_capacity(n);
        let mut gap_start: Option<usize> = None;
        for k in 0..n {
            let t = start + k as f64 * period;
            let j = s.hold_index(t);
            values.push(s.value(j));
            let stale = t - s.time(j) > max_gap;
            match (stale, gap_start) {
                (true, None) => gap_start = Some(k),
                (false, Some(g)) => {
                    report.gaps.push(Gap {
                        source_id: s.id().to_string(),
                        start: g,
                        end: k,
                    });
                    gap_start = None;
                }
                _ => {}
            }
        }
        if let Some(g) = gap_start {
            report.gaps.push(Gap {
                source_id: s.id().to_string(),
                start: g,
                end: n,
            });
        }
        out.push(PowerSignal::new(values, start, period, s.id().to_string())?);
    }
    Ok((out, report))
}

/// Resamples every signal onto one shared grid spanning the intersection of
/// their time ranges, holding the most recent sample at each grid instant.
pub fn align<F: Scalar>(signals: &[PowerSignal<F>], period: f64) -> Result<Vec<PowerSignal<F>>> {
    align_timed(signals, period, DEFAULT_MAX_GAP).map(|(s, _)| s)
}

pub fn align_with_gaps<F: Scalar>(
    signals: &[PowerSignal<F>],
    period: f64,
    max_gap: f64,
) -> Result<(Vec<PowerSignal<F>>, GapReport)> {
    align_timed(signals, period, max_gap)
}

/// [`align`] for irregular logger series. Holds longer than `max_gap`
/// seconds are still filled but listed in the gap report.
pub fn align_raw<F: Scalar>(
    series: &[RawSeries<F>],
    period: f64,
    max_gap: f64,
) -> Result<(Vec<PowerSignal<F>>, GapReport)> {
    align_timed(series, period, max_gap)
}

/// Sample-wise sum of aligned signals, accumulated in list order.
pub fn aggregate<F: Scalar>(signals: &[PowerSignal<F>]) -> Result<PowerSignal<F>> {
    let first = signals
        .first()
        .ok_or_else(|| Error::Misaligned("nothing to aggregate".into()))?;
    if let Some(bad) = signals.iter().find(|s| !s.same_grid(first)) {
        return Err(Error::Misaligned(format!(
            "{} does not share the grid of {}",
            bad.source_id, first.source_id
        )));
    }
    let mut values = first.values.clone();
    for s in &signals[1..] {
        for (acc, v) in values.iter_mut().zip(&s.values) {
            *acc = *acc + *v;
        }
    }
    PowerSignal::with_kind(
        values,
        first.start_time,
        first.sample_period,
        "aggregate",
        SignalKind::Aggregate,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(values: &[f64], start: f64, period: f64, id: &str) -> PowerSignal {
        PowerSignal::new(values.to_vec(), start, period, id).unwrap()
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(PowerSignal::<f64>::new(vec![], 0.0, 1.0, "x").is_err());
        assert!(PowerSignal::new(vec![1.0, -1.0], 0.0, 1.0, "x").is_err());
        assert!(PowerSignal::new(vec![1.0, f64::NAN], 0.0, 1.0, "x").is_err());
        assert!(PowerSignal::new(vec![1.0], 0.0, 0.0, "x").is_err());
    }

    #[test]
    fn align_identical_signals_is_identity() {
        let a = sig(&[1.0, 2.0, 3.0, 4.0], 100.0, 3.0, "a");
        let b = sig(&[5.0, 6.0, 7.0, 8.0], 100.0, 3.0, "b");
        let out = align(&[a.clone(), b.clone()], 3.0).unwrap();
        assert_eq!(out[0].values(), a.values());
        assert_eq!(out[1].values(), b.values());
    }

    #[test]
    fn align_step_hold_downsamples_to_coarser_grid() {
        // A: 1 s samples at t = 0..9 with value 10*t; B: 3 s samples at t = 0,3,6,9.
        let a_vals: Vec<f64> = (0..10).map(|t| 10.0 * t as f64).collect();
        let a = sig(&a_vals, 0.0, 1.0, "a");
        let b = sig(&[7.0, 8.0, 9.0, 10.0], 0.0, 3.0, "b");
        let out = align(&[a, b], 3.0).unwrap();
        // Grid instants 0,3,6,9 pick A samples 0,3,6,9.
        assert_eq!(out[0].values(), &[0.0, 30.0, 60.0, 90.0]);
        assert_eq!(out[1].values(), &[7.0, 8.0, 9.0, 10.0]);
        assert_eq!(out[0].len(), out[1].len());
    }

    #[test]
    fn align_offset_grid_holds_previous_sample() {
        let a_vals: Vec<f64> = (0..10).map(|t| t as f64).collect();
        let a = sig(&a_vals, 0.0, 1.0, "a");
        let b = sig(&[1.0, 1.0, 1.0], 1.5, 3.0, "b");
        let out = align(&[a, b], 3.0).unwrap();
        // Span [1.5, 7.5]; instants 1.5, 4.5, 7.5 hold A samples 1, 4, 7.
        assert_eq!(out[0].values(), &[1.0, 4.0, 7.0]);
        assert_eq!(out[0].start_time(), 1.5);
    }

    #[test]
    fn disjoint_spans_fail() {
        let a = sig(&[1.0, 1.0], 0.0, 1.0, "a");
        let b = sig(&[1.0, 1.0], 10.0, 1.0, "b");
        assert!(matches!(align(&[a, b], 1.0), Err(Error::AlignmentDomain)));
    }

    #[test]
    fn raw_series_gaps_are_reported() {
        let raw = RawSeries::new("c", vec![0.0, 3.0, 6.0, 200.0, 203.0], vec![1.0, 2.0, 3.0, 4.0, 5.0])
            .unwrap();
        let (out, report) = align_raw(&[raw], 3.0, 60.0).unwrap();
        assert_eq!(out[0].len(), 68);
        assert_eq!(out[0].values()[2], 3.0);
        assert_eq!(out[0].values()[40], 3.0);
        assert_eq!(out[0].values()[67], 4.0);
        // Instants 69..198 hold the t = 6 sample for more than 60 s.
        assert_eq!(report.gaps.len(), 1);
        assert_eq!(report.gaps[0].start, 23);
        assert_eq!(report.gaps[0].end, 67);
    }

    #[test]
    fn aggregate_sums_and_checks_grid() {
        let a = sig(&[100.0, 100.0], 0.0, 1.0, "a");
        let b = sig(&[50.0, 50.0], 0.0, 1.0, "b");
        let s = aggregate(&[a.clone(), b]).unwrap();
        assert_eq!(s.values(), &[150.0, 150.0]);
        assert_eq!(s.kind(), SignalKind::Aggregate);
        assert_eq!(aggregate(std::slice::from_ref(&a)).unwrap().values(), a.values());
        let c = sig(&[1.0, 1.0, 1.0], 0.0, 1.0, "c");
        assert!(matches!(aggregate(&[a, c]), Err(Error::Misaligned(_))));
    }

    #[test]
    fn day_segments() {
        let s = sig(&[1.0; 6], SECONDS_PER_DAY - 3.0, 1.0, "a");
        assert_eq!(s.days(), vec![0, 1]);
        let segs = s.segments_for_days(&[1]);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].len(), 3);
        assert_eq!(segs[0].start_time(), SECONDS_PER_DAY);
    }
}
