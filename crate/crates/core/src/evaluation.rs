//! Scoring predicted event labels against ground truth.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::features::{ModePair, Transition};
use crate::scalar::Scalar;
use crate::signal::EventRecord;

pub const DEFAULT_MATCH_TOLERANCE: usize = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Number of one-to-one pairs between two sorted index lists whose indices
/// differ by at most `tolerance`. Each prediction takes the earliest free
/// truth in its window, which is a maximum matching on a line.
pub fn match_indices(predicted: &[usize], truth: &[usize], tolerance: usize) -> usize {
    let mut matched = 0;
    let mut next = 0;
    for &p in predicted {
        while next < truth.len() && truth[next] + tolerance < p {
            next += 1;
        }
        if next < truth.len() && truth[next] <= p + tolerance {
            matched += 1;
            next += 1;
        }
    }
    matched
}

/// Per-appliance counts for labeled events. A prediction is a true positive
/// when a not yet matched truth event of the same appliance and transition
/// lies within `tolerance` samples.
pub fn match_events<F: Scalar>(
    predicted: &[(EventRecord<F>, Transition<F>)],
    truth: &[(EventRecord<F>, Transition<F>)],
    tolerance: usize,
) -> BTreeMap<String, ConfusionCounts> {
    type Key = (String, ModePair);
    let group = |events: &[(EventRecord<F>, Transition<F>)]| {
        let mut by: BTreeMap<Key, Vec<usize>> = BTreeMap::new();
        for (e, t) in events {
            by.entry((t.appliance.clone(), t.pair())).or_default().push(e.index);
        }
        by.values_mut().for_each(|v| v.sort_unstable());
        by
    };
    let pred = group(predicted);
    let tru = group(truth);

    let mut counts: BTreeMap<String, ConfusionCounts> = BTreeMap::new();
    for (key, p) in &pred {
        let t = tru.get(key).map_or(&[][..], Vec::as_slice);
        let tp = match_indices(p, t, tolerance);
        let c = counts.entry(key.0.clone()).or_default();
        c.tp += tp;
        c.fp += p.len() - tp;
    }
    for (key, t) in &tru {
        let p = pred.get(key).map_or(&[][..], Vec::as_slice);
        let tp = match_indices(p, t, tolerance);
        counts.entry(key.0.clone()).or_default().fn_ += t.len() - tp;
    }
    let total = predicted.len().max(truth.len());
    for c in counts.values_mut() {
        c.tn = total.saturating_sub(c.tp + c.fp + c.fn_);
    }
    counts
}

/// Harmonic mean of precision and recall; zero without true positives.
pub fn f_measure(counts: &ConfusionCounts) -> f64 {
    if counts.tp == 0 {
        return 0.0;
    }
    let (p, r) = (counts.precision(), counts.recall());
    2.0 * p * r / (p + r)
}

/// Harmonic mean of the true-positive rate `TP/(TP+FN)` and the
/// false-positive rate `FP/(FP+TN)`. Kept for comparison only; it rewards
/// false positives and is not a usable accuracy measure.
pub fn f_measure_literal(counts: &ConfusionCounts) -> f64 {
    let tpr = ratio(counts.tp, counts.tp + counts.fn_);
    let fpr = ratio(counts.fp, counts.fp + counts.tn);
    if tpr + fpr == 0.0 {
        0.0
    } else {
        2.0 * tpr * fpr / (tpr + fpr)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreFormula {
    #[default]
    Standard,
    Literal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApplianceScore {
    pub appliance: String,
    pub counts: ConfusionCounts,
    pub f_measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub appliances: Vec<ApplianceScore>,
    pub average: f64,
}

impl EvaluationReport {
    pub fn score(&self, appliance: &str) -> Option<f64> {
        self.appliances.iter().find(|s| s.appliance == appliance).map(|s| s.f_measure)
    }
}

/// Matches, scores each appliance and averages over appliances.
pub fn evaluate<F: Scalar>(
    predicted: &[(EventRecord<F>, Transition<F>)],
    truth: &[(EventRecord<F>, Transition<F>)],
    tolerance: usize,
    formula: ScoreFormula,
) -> EvaluationReport {
    let appliances: Vec<ApplianceScore> = match_events(predicted, truth, tolerance)
        .into_iter()
        .map(|(appliance, counts)| {
            let f_measure = match formula {
                ScoreFormula::Standard => f_measure(&counts),
                ScoreFormula::Literal => f_measure_literal(&counts),
            };
            ApplianceScore { appliance, counts, f_measure }
        })
        .collect();
    let average = if appliances.is_empty() {
        0.0
    } else {
        appliances.iter().map(|s| s.f_measure).sum::<f64>() / appliances.len() as f64
    };
    EvaluationReport { appliances, average }
}
