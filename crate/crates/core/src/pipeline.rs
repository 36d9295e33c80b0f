//! Train → disaggregate → evaluate over aligned in-memory signals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classifier::{classify, ClassifierConfig, Cycle, CycleDiagnostic, Label};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate, EvaluationReport, ScoreFormula};
use crate::features::{
    extract_behaviors, label_training_events, observed_transitions, overshoot_height, participation_index,
    select_signatures, ApplianceModel, BehaviorSet, DayCount, ParticipationDays, Transition, TrainingDay,
    TrainingEvent,
};
use crate::filtering::filter_and_detect;
use crate::modes::{extract_states_from_samples, StateSet};
use crate::scalar::Scalar;
use crate::signal::{EventRecord, PowerSignal};
use crate::synth::TruthEvent;

/// Every tunable of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub k_clusters: usize,
    pub merge_ratio: f64,
    pub off_threshold: f64,
    pub all_off_margin: f64,
    pub overshoot_floor: f64,
    pub search_budget: usize,
    pub match_tolerance: usize,
    pub n_days_variant: ParticipationDays,
    pub score_formula: ScoreFormula,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k_clusters: crate::modes::DEFAULT_K,
            merge_ratio: crate::modes::DEFAULT_MERGE_RATIO,
            off_threshold: crate::modes::DEFAULT_OFF_THRESHOLD,
            all_off_margin: crate::classifier::DEFAULT_ALL_OFF_MARGIN,
            overshoot_floor: crate::features::DEFAULT_OVERSHOOT_FLOOR,
            search_budget: crate::classifier::DEFAULT_SEARCH_BUDGET,
            match_tolerance: crate::evaluation::DEFAULT_MATCH_TOLERANCE,
            n_days_variant: ParticipationDays::Occurring,
            score_formula: ScoreFormula::Standard,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_clusters < 10 {
            return Err(Error::Config(format!("k_clusters must be at least 10, got {}", self.k_clusters)));
        }
        if !(self.merge_ratio > 0.0 && self.merge_ratio < 1.0) {
            return Err(Error::Config(format!("merge_ratio must be in (0, 1), got {}", self.merge_ratio)));
        }
        if !(self.off_threshold >= 0.0 && self.all_off_margin >= 0.0 && self.overshoot_floor >= 0.0) {
            return Err(Error::Config("thresholds must be non-negative".into()));
        }
        if self.search_budget == 0 {
            return Err(Error::Config("search_budget must be positive".into()));
        }
        Ok(())
    }

    pub fn classifier(&self) -> ClassifierConfig {
        ClassifierConfig { all_off_margin: self.all_off_margin, search_budget: self.search_budget }
    }
}

/// Detection results for one contiguous piece of a signal.
struct Piece<F: Scalar> {
    signal: PowerSignal<F>,
    filtered: Vec<F>,
    events: Vec<EventRecord<F>>,
}

fn detect_pieces<F: Scalar>(signal: &PowerSignal<F>, days: &[i64]) -> Result<Vec<Piece<F>>> {
    signal
        .segments_for_days(days)
        .into_iter()
        .filter(|s| s.len() >= 2)
        .map(|s| {
            let d = filter_and_detect(&s)?;
            Ok(Piece { filtered: d.filtered.values().to_vec(), events: d.events, signal: s })
        })
        .collect()
}

/// Learns one model per appliance from the given training days. `appliances`
/// and `aggregate` must share a grid.
pub fn train<F: Scalar>(
    appliances: &[PowerSignal<F>],
    aggregate: &PowerSignal<F>,
    days: &[i64],
    config: &RunConfig,
) -> Result<Vec<ApplianceModel<F>>> {
    config.validate()?;
    if days.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut totals: BTreeMap<i64, usize> = days.iter().map(|&d| (d, 0)).collect();
    for piece in detect_pieces(aggregate, days)? {
        for e in &piece.events {
            *totals.entry(piece.signal.day_of(e.index)).or_default() += 1;
        }
    }

    let mut models = Vec::with_capacity(appliances.len());
    for signal in appliances {
        models.push(train_one(signal, days, &totals, config)?);
    }
    select_signatures(&mut models);
    Ok(models)
}

fn train_one<F: Scalar>(
    signal: &PowerSignal<F>,
    days: &[i64],
    totals: &BTreeMap<i64, usize>,
    config: &RunConfig,
) -> Result<ApplianceModel<F>> {
    let name = signal.source_id().to_string();
    let pieces = detect_pieces(signal, days)?;
    let samples: Vec<F> = pieces.iter().flat_map(|p| p.filtered.iter().copied()).collect();
    let n_events: usize = pieces.iter().map(|p| p.events.len()).sum();
    if n_events == 0 || samples.is_empty() {
        log::warn!("{name}: no training events, model is OFF only");
        return Ok(ApplianceModel {
            appliance: name,
            states: StateSet::off_only(),
            transitions: Vec::new(),
            behaviors: BehaviorSet::default(),
            inactive: true,
        });
    }
    let states = extract_states_from_samples(
        &samples,
        config.k_clusters,
        F::of(config.merge_ratio),
        F::of(config.off_threshold),
    )?;

    let mut labeled = Vec::new();
    let mut by_day: BTreeMap<i64, Vec<TrainingEvent<F>>> = days.iter().map(|&d| (d, Vec::new())).collect();
    for p in &pieces {
        for (event, t) in label_training_events(&name, &p.events, &states) {
            by_day.entry(p.signal.day_of(event.index)).or_default().push(TrainingEvent {
                event,
                pair: t.pair(),
                overshoot: overshoot_height(p.signal.values(), &event),
                time: p.signal.time_at(event.index),
            });
            labeled.push((event, t));
        }
    }
    let (observed, forbidden) = observed_transitions(&labeled, &states);
    let mut transitions: Vec<Transition<F>> = observed
        .iter()
        .filter_map(|p| Transition::between(&name, &states, p.from, p.to))
        .collect();
    for t in &mut transitions {
        let counts: Vec<DayCount> = by_day
            .iter()
            .map(|(&day, events)| DayCount {
                day,
                transition: events.iter().filter(|e| e.pair == t.pair()).count(),
                total: totals.get(&day).copied().unwrap_or(0),
            })
            .collect();
        t.participation = participation_index(&counts, config.n_days_variant)?;
    }
    let days: Vec<TrainingDay<F>> = by_day.into_iter().map(|(day, events)| TrainingDay { day, events }).collect();
    let behaviors = extract_behaviors(&days, &states, &transitions, &forbidden, F::of(config.overshoot_floor));
    Ok(ApplianceModel { appliance: name, states, transitions, behaviors, inactive: false })
}

/// Labels produced for one piece of the test aggregate, with indices
/// relative to the full aggregate.
#[derive(Clone, Debug)]
pub struct Disaggregation<F: Scalar = f64> {
    pub labels: Vec<Label<F>>,
    pub cycles: Vec<Cycle>,
    pub diagnostics: Vec<CycleDiagnostic>,
}

/// Classifies the aggregate over the given test days.
pub fn disaggregate<F: Scalar>(
    aggregate: &PowerSignal<F>,
    models: &[ApplianceModel<F>],
    days: &[i64],
    config: &RunConfig,
) -> Result<Disaggregation<F>> {
    config.validate()?;
    let mut out = Disaggregation { labels: Vec::new(), cycles: Vec::new(), diagnostics: Vec::new() };
    for piece in aggregate.segments_for_days(days) {
        if piece.len() < 2 {
            continue;
        }
        let offset = ((piece.start_time() - aggregate.start_time()) / aggregate.sample_period()).round() as usize;
        let c = classify(&piece, models, &config.classifier())?;
        let base = out.labels.len();
        out.labels.extend(c.labels.into_iter().map(|mut l| {
            l.event.index += offset;
            l
        }));
        let first_cycle = out.cycles.len();
        out.cycles.extend(c.cycles.into_iter().map(|mut cy| {
            cy.start_event += base;
            cy.end_event += base;
            cy
        }));
        out.diagnostics.extend(c.diagnostics.into_iter().map(|mut d| {
            d.cycle += first_cycle;
            d
        }));
    }
    Ok(out)
}

/// Reference labels: each appliance's own events over the test days, named
/// with its trained states.
pub fn ground_truth<F: Scalar>(
    appliances: &[PowerSignal<F>],
    models: &[ApplianceModel<F>],
    days: &[i64],
) -> Result<Vec<(EventRecord<F>, Transition<F>)>> {
    let mut truth = Vec::new();
    for signal in appliances {
        let Some(model) = models.iter().find(|m| m.appliance == signal.source_id()) else {
            return Err(Error::DataConsistency(format!("no model for {}", signal.source_id())));
        };
        for piece in signal.segments_for_days(days) {
            if piece.len() < 2 {
                continue;
            }
            let offset = ((piece.start_time() - signal.start_time()) / signal.sample_period()).round() as usize;
            let d = filter_and_detect(&piece)?;
            for (mut e, t) in label_training_events(&model.appliance, &d.events, &model.states) {
                e.index += offset;
                truth.push((e, t));
            }
        }
    }
    truth.sort_by_key(|(e, _)| e.index);
    Ok(truth)
}

/// Generator truth over the test days, named with the trained states. Events
/// whose two nominal levels fall in the same trained state are dropped, as
/// are appliances without a model.
pub fn synthetic_truth<F: Scalar>(
    truth: &[TruthEvent],
    models: &[ApplianceModel<F>],
    grid: &PowerSignal<F>,
    days: &[i64],
) -> Vec<(EventRecord<F>, Transition<F>)> {
    truth
        .iter()
        .filter(|t| t.index + 1 < grid.len() && days.contains(&grid.day_of(t.index)))
        .filter_map(|t| {
            let model = models.iter().find(|m| m.appliance == t.appliance)?;
            let (pre, post) = (F::of(t.pre_level), F::of(t.post_level));
            let from = model.states.nearest_mode(pre);
            let to = model.states.nearest_mode(post);
            let transition = Transition::between(&model.appliance, &model.states, from, to)?;
            Some((EventRecord::new(t.index, pre, post), transition))
        })
        .collect()
}

/// Scores labels against a prepared truth list.
pub fn score_against<F: Scalar>(
    labels: &[Label<F>],
    truth: &[(EventRecord<F>, Transition<F>)],
    config: &RunConfig,
) -> EvaluationReport {
    let predicted: Vec<(EventRecord<F>, Transition<F>)> =
        labels.iter().map(|l| (l.event, l.transition.clone())).collect();
    evaluate(&predicted, truth, config.match_tolerance, config.score_formula)
}

/// Scores labels against per-appliance ground truth.
pub fn score<F: Scalar>(
    labels: &[Label<F>],
    appliances: &[PowerSignal<F>],
    models: &[ApplianceModel<F>],
    days: &[i64],
    config: &RunConfig,
) -> Result<EvaluationReport> {
    let truth = ground_truth(appliances, models, days)?;
    Ok(score_against(labels, &truth, config))
}

/// First `train` days for training, the rest for testing.
pub fn split_days(all: &[i64], train: usize) -> (Vec<i64>, Vec<i64>) {
    let train = train.min(all.len());
    (all[..train].to_vec(), all[train..].to_vec())
}
