//! Statistics-based outlier detection on consecutive-sample ratios, the
//! filtered signal built from it, and event detection on the filtered signal.
//!
//! For a signal `P`, the ratio series is `m(t) = 1 - min(P(t), P(t+1)) /
//! max(P(t), P(t+1))`. Instants where `m(t)` is strictly greater than the
//! sample standard deviation of the whole series are outliers. Indices are
//! zero-based throughout: instance `t` compares samples `t` and `t + 1`, and
//! the sample it marks is `t + 1`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{EventRecord, PowerSignal};

/// Upper bound on the number of inlier samples averaged to replace an
/// outlier run.
pub const REPLACEMENT_WINDOW: usize = 10;

/// Ratios within this distance of the threshold count as equal to it, so
/// rounding noise in `m` cannot create outliers on its own.
pub const RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct RatioSeries<F = f64> {
    pub m: Vec<F>,
    pub threshold_sd: F,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    /// Ascending instances `t` with `m(t) > sd`.
    pub instances: Vec<usize>,
    /// Samples classified as outliers: `t + 1` for every instance `t`.
    pub sample_marks: BTreeSet<usize>,
}

/// Output of the full filter-then-detect chain.
#[derive(Clone, Debug)]
pub struct Detection<F: Scalar = f64> {
    pub outliers: OutlierReport,
    pub filtered: PowerSignal<F>,
    pub events: Vec<EventRecord<F>>,
}

fn ratio<F: Scalar>(a: F, b: F) -> F {
    let hi = a.max(b);
    if hi <= F::zero() {
        return F::zero();
    }
    F::one() - a.min(b) / hi
}

/// Sample (n - 1) standard deviation; zero for fewer than two values.
pub fn sample_sd<F: Scalar>(xs: &[F]) -> F {
    if xs.len() < 2 {
        return F::zero();
    }
    let n = F::of_usize(xs.len());
    let mean = xs.iter().copied().sum::<F>() / n;
    let ss: F = xs.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (ss / (n - F::one())).sqrt()
}

pub fn ratio_series<F: Scalar>(values: &[F]) -> Result<RatioSeries<F>> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: values.len(),
        });
    }
    let m: Vec<F> = values.windows(2).map(|w| ratio(w[0], w[1])).collect();
    let threshold_sd = sample_sd(&m);
    Ok(RatioSeries { m, threshold_sd })
}

fn outliers_of<F: Scalar>(values: &[F]) -> Result<OutlierReport> {
    let series = ratio_series(values)?;
    let threshold = series.threshold_sd + F::of(RATIO_TOLERANCE);
    let instances: Vec<usize> = series
        .m
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > threshold)
        .map(|(t, _)| t)
        .collect();
    let sample_marks = instances.iter().map(|t| t + 1).collect();
    Ok(OutlierReport {
        instances,
        sample_marks,
    })
}

pub fn detect_outliers<F: Scalar>(signal: &PowerSignal<F>) -> Result<OutlierReport> {
    outliers_of(signal.values())
}

/// Mean computed relative to the first value, exact for constant input.
fn shifted_mean<F: Scalar>(xs: &[F]) -> F {
    let base = xs[0];
    base + xs.iter().map(|&x| x - base).sum::<F>() / F::of_usize(xs.len())
}

/// Maximal runs `[first, last]` of consecutive integers in an ascending list.
fn runs(sorted: impl IntoIterator<Item = usize>) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for i in sorted {
        match out.last_mut() {
            Some((_, last)) if *last + 1 == i => *last = i,
            _ => out.push((i, i)),
        }
    }
    out
}

/// Replaces each run of marked samples with the mean of the inlier run that
/// follows it (at most [`REPLACEMENT_WINDOW`] samples). A run that reaches the
/// end of the signal uses the preceding inlier run instead.
pub fn build_filtered_signal<F: Scalar>(
    signal: &PowerSignal<F>,
    report: &OutlierReport,
) -> Result<PowerSignal<F>> {
    let raw = signal.values();
    let n = raw.len();
    let marked = |i: usize| report.sample_marks.contains(&i);
    let mut out = raw.to_vec();

    for (first, last) in runs(report.sample_marks.iter().copied().filter(|&i| i < n)) {
        let following: Vec<F> = (last + 1..n)
            .take_while(|&i| !marked(i))
            .take(REPLACEMENT_WINDOW)
            .map(|i| raw[i])
            .collect();
        let window = if following.is_empty() {
            (0..first)
                .rev()
                .take_while(|&i| !marked(i))
                .take(REPLACEMENT_WINDOW)
                .map(|i| raw[i])
                .collect()
        } else {
            following
        };
        if window.is_empty() {
            continue;
        }
        let mean = shifted_mean(&window);
        for v in &mut out[first..=last] {
            *v = mean;
        }
    }
    signal.with_values(out)
}

/// One pass of outlier detection over a filtered signal; each maximal run of
/// consecutive outlier instances becomes one event whose levels are read one
/// sample outside the run.
pub fn detect_events<F: Scalar>(filtered: &PowerSignal<F>) -> Result<Vec<EventRecord<F>>> {
    let report = detect_outliers(filtered)?;
    let v = filtered.values();
    Ok(runs(report.instances)
        .into_iter()
        .map(|(first, last)| EventRecord::new(first, v[first], v[last + 1]))
        .filter(|e| e.magnitude != F::zero())
        .collect())
}

pub fn filter_and_detect<F: Scalar>(signal: &PowerSignal<F>) -> Result<Detection<F>> {
    let outliers = detect_outliers(signal)?;
    let filtered = build_filtered_signal(signal, &outliers)?;
    let events = detect_events(&filtered)?;
    Ok(Detection {
        outliers,
        filtered,
        events,
    })
}
