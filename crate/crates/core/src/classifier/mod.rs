//! Labeling aggregate events with appliance mode transitions.
//!
//! Four passes narrow a binary candidate matrix (transitions × events):
//! interval matching, cycle compatibility, behavioral rules and finally a
//! participation-index vote for whatever is still ambiguous.

mod behaviors;
mod compat;
mod cycles;
mod participation;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{ApplianceModel, Transition};
use crate::filtering::{filter_and_detect, Detection};
use crate::scalar::Scalar;
use crate::signal::{EventRecord, PowerSignal};

pub use behaviors::refine_by_behaviors;
pub use compat::{compatible_labels, Compatibility, ModeVector, DEFAULT_SEARCH_BUDGET};
pub use cycles::{all_off_threshold, segment_cycles, Cycle, DEFAULT_ALL_OFF_MARGIN};
pub use participation::{overlap_groups, resolve_by_participation};

/// Pass that left a column with its final single label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Initial,
    Compatibility,
    Behavior,
    Participation,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Initial => "initial",
            Stage::Compatibility => "compatibility",
            Stage::Behavior => "behavior",
            Stage::Participation => "participation",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "initial" => Stage::Initial,
            "compatibility" => Stage::Compatibility,
            "behavior" => Stage::Behavior,
            "participation" => Stage::Participation,
            _ => return Err(format!("unknown stage {s:?}")),
        })
    }
}

/// A transition of one appliance, as a matrix row.
#[derive(Clone, Debug, PartialEq)]
pub struct Row<F = f64> {
    /// Index into the model list.
    pub appliance: usize,
    pub transition: Transition<F>,
    pub forbidden: bool,
}

/// Rows for every trained transition, in model order.
pub fn rows_of<F: Scalar>(models: &[ApplianceModel<F>]) -> Vec<Row<F>> {
    models
        .iter()
        .enumerate()
        .flat_map(|(a, m)| {
            m.transitions.iter().map(move |t| Row {
                appliance: a,
                transition: t.clone(),
                forbidden: m.is_forbidden(t.pair()),
            })
        })
        .collect()
}

/// Candidate labels per event. Stored by column: `cells[e][t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateLabelMatrix<F = f64> {
    pub events: Vec<EventRecord<F>>,
    pub rows: Vec<Row<F>>,
    cells: Vec<Vec<bool>>,
    stages: Vec<Option<Stage>>,
}

impl<F: Scalar> CandidateLabelMatrix<F> {
    /// Matrix from explicit candidate row lists, one per event.
    pub fn from_candidates(events: Vec<EventRecord<F>>, rows: Vec<Row<F>>, candidates: &[Vec<usize>]) -> Self {
        assert_eq!(events.len(), candidates.len());
        let cells: Vec<Vec<bool>> = candidates
            .iter()
            .map(|c| {
                let mut col = vec![false; rows.len()];
                for &r in c {
                    col[r] = true;
                }
                col
            })
            .collect();
        let mut m = CandidateLabelMatrix { stages: vec![None; events.len()], events, rows, cells };
        m.settle(Stage::Initial);
        m
    }

    pub fn n_events(&self) -> usize {
        self.events.len()
    }

    pub fn n_transitions(&self) -> usize {
        self.rows.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> bool {
        self.cells[col][row]
    }

    pub fn candidates(&self, col: usize) -> Vec<usize> {
        (0..self.rows.len()).filter(|&r| self.cells[col][r]).collect()
    }

    pub fn count(&self, col: usize) -> usize {
        self.cells[col].iter().filter(|&&c| c).count()
    }

    pub fn single(&self, col: usize) -> Option<usize> {
        let c = self.candidates(col);
        (c.len() == 1).then(|| c[0])
    }

    pub fn stage(&self, col: usize) -> Option<Stage> {
        self.stages[col]
    }

    pub fn total_ones(&self) -> usize {
        (0..self.n_events()).map(|c| self.count(c)).sum()
    }

    fn set_candidates(&mut self, col: usize, rows: &[usize]) {
        let column = &mut self.cells[col];
        column.iter_mut().for_each(|c| *c = false);
        for &r in rows {
            column[r] = true;
        }
    }

    /// Records `stage` for columns that just became single-labeled.
    fn settle(&mut self, stage: Stage) {
        for col in 0..self.n_events() {
            if self.stages[col].is_none() && self.count(col) == 1 {
                self.stages[col] = Some(stage);
            }
        }
    }
}

/// Step 1: interval membership with matching sign; an event matching nothing
/// goes to the nearest interval of its sign, or of any sign if none exists.
pub fn initial_labels<F: Scalar>(events: &[EventRecord<F>], rows: Vec<Row<F>>) -> Result<CandidateLabelMatrix<F>> {
    let mut candidates = Vec::with_capacity(events.len());
    for e in events {
        let mut c: Vec<usize> = (0..rows.len()).filter(|&r| rows[r].transition.admits(e)).collect();
        if c.is_empty() {
            let magnitude = e.magnitude.abs();
            let nearest = |signed: bool| {
                (0..rows.len())
                    .filter(|&r| !signed || rows[r].transition.direction_matches(e))
                    .min_by(|&a, &b| {
                        let da = rows[a].transition.interval.distance(magnitude);
                        let db = rows[b].transition.interval.distance(magnitude);
                        da.partial_cmp(&db).expect("finite distances").then(a.cmp(&b))
                    })
            };
            match nearest(true).or_else(|| nearest(false)) {
                Some(r) => c.push(r),
                None => {
                    return Err(Error::ModelCoverage { index: e.index, magnitude: e.magnitude.as_f64() });
                }
            }
        }
        candidates.push(c);
    }
    Ok(CandidateLabelMatrix::from_candidates(events.to_vec(), rows, &candidates))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleIssue {
    /// No closed walk exists with the current candidates.
    Infeasible,
    /// The search budget ran out.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleDiagnostic {
    pub cycle: usize,
    pub issue: CycleIssue,
}

/// Shared context for passes that must keep cycles closable: removals inside
/// a cycle that passed the compatibility search are re-checked and
/// propagated, or reverted if they break every closed walk.
#[derive(Clone, Debug)]
pub struct Refinery {
    pub cycles: Vec<Cycle>,
    pub appliances: usize,
    pub budget: usize,
    /// Cycle of each event column.
    cycle_of: Vec<Option<usize>>,
    /// Cycles kept consistent by every later pass.
    constrained: Vec<bool>,
}

impl Refinery {
    pub fn new(cycles: Vec<Cycle>, n_events: usize, appliances: usize, budget: usize) -> Self {
        let mut cycle_of = vec![None; n_events];
        for (k, c) in cycles.iter().enumerate() {
            for e in c.events() {
                cycle_of[e] = Some(k);
            }
        }
        let constrained = vec![false; cycles.len()];
        Refinery { cycles, appliances, budget, cycle_of, constrained }
    }

    pub fn is_constrained(&self, cycle: usize) -> bool {
        self.constrained[cycle]
    }

    fn search<F: Scalar>(&self, matrix: &CandidateLabelMatrix<F>, cycle: usize) -> Compatibility {
        let cands: Vec<Vec<usize>> = self.cycles[cycle].events().map(|e| matrix.candidates(e)).collect();
        compatible_labels(&cands, &matrix.rows, self.appliances, self.budget)
    }

    fn write_kept<F: Scalar>(&self, matrix: &mut CandidateLabelMatrix<F>, cycle: usize, kept: &[Vec<usize>]) {
        for (e, rows) in self.cycles[cycle].events().zip(kept) {
            matrix.set_candidates(e, rows);
        }
    }

    /// Replaces candidate sets in bulk. Columns that would end up empty are
    /// left alone; per cycle, a change that leaves no closed walk is undone.
    /// Returns the number of columns whose change stuck.
    pub fn apply<F: Scalar>(
        &self,
        matrix: &mut CandidateLabelMatrix<F>,
        changes: &BTreeMap<usize, Vec<usize>>,
        stage: Stage,
    ) -> usize {
        let mut by_cycle: BTreeMap<Option<usize>, Vec<(usize, &Vec<usize>)>> = BTreeMap::new();
        for (&col, rows) in changes {
            if !rows.is_empty() {
                by_cycle.entry(self.cycle_of[col]).or_default().push((col, rows));
            }
        }
        let mut applied = 0;
        for (cycle, cols) in by_cycle {
            let snapshot: Vec<(usize, Vec<usize>)> = cols.iter().map(|&(c, _)| (c, matrix.candidates(c))).collect();
            for &(col, rows) in &cols {
                matrix.set_candidates(col, rows);
            }
            match cycle {
                Some(k) if self.constrained[k] => match self.search(matrix, k) {
                    Compatibility::Kept(kept) => {
                        self.write_kept(matrix, k, &kept);
                        applied += cols.len();
                    }
                    _ => {
                        for (col, rows) in snapshot {
                            matrix.set_candidates(col, &rows);
                        }
                    }
                },
                _ => applied += cols.len(),
            }
        }
        matrix.settle(stage);
        applied
    }

    /// Removes `(column, row)` cells, sparing any column's last label.
    pub fn remove<F: Scalar>(
        &self,
        matrix: &mut CandidateLabelMatrix<F>,
        removals: &BTreeMap<usize, Vec<usize>>,
        stage: Stage,
    ) -> usize {
        let changes: BTreeMap<usize, Vec<usize>> = removals
            .iter()
            .filter_map(|(&col, drop)| {
                let cur = matrix.candidates(col);
                let rest: Vec<usize> = cur.iter().copied().filter(|r| !drop.contains(r)).collect();
                (rest.len() < cur.len()).then_some((col, rest))
            })
            .collect();
        self.apply(matrix, &changes, stage)
    }
}

/// Step 2: keeps, inside each cycle bounded by all-OFF, only labels that take
/// part in a closed walk. Cycles without one stay as they are.
pub fn refine_by_compatibility<F: Scalar>(
    matrix: &mut CandidateLabelMatrix<F>,
    refinery: &mut Refinery,
) -> Vec<CycleDiagnostic> {
    let mut diagnostics = Vec::new();
    for k in 0..refinery.cycles.len() {
        if !refinery.cycles[k].is_closed() {
            continue;
        }
        match refinery.search(matrix, k) {
            Compatibility::Kept(kept) => {
                refinery.write_kept(matrix, k, &kept);
                refinery.constrained[k] = true;
            }
            Compatibility::Infeasible => diagnostics.push(CycleDiagnostic { cycle: k, issue: CycleIssue::Infeasible }),
            Compatibility::Exhausted => diagnostics.push(CycleDiagnostic { cycle: k, issue: CycleIssue::Exhausted }),
        }
    }
    matrix.settle(Stage::Compatibility);
    diagnostics
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub all_off_margin: f64,
    pub search_budget: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig { all_off_margin: DEFAULT_ALL_OFF_MARGIN, search_budget: DEFAULT_SEARCH_BUDGET }
    }
}

/// One classified event.
#[derive(Clone, Debug, PartialEq)]
pub struct Label<F = f64> {
    pub event: EventRecord<F>,
    /// Epoch seconds of the event's last pre-event sample.
    pub time: f64,
    pub transition: Transition<F>,
    pub stage: Stage,
}

#[derive(Clone, Debug)]
pub struct Classification<F: Scalar = f64> {
    pub detection: Detection<F>,
    pub cycles: Vec<Cycle>,
    pub labels: Vec<Label<F>>,
    pub diagnostics: Vec<CycleDiagnostic>,
}

/// Runs detection and all four labeling passes on an aggregate signal.
pub fn classify<F: Scalar>(
    aggregate: &PowerSignal<F>,
    models: &[ApplianceModel<F>],
    config: &ClassifierConfig,
) -> Result<Classification<F>> {
    let detection = filter_and_detect(aggregate)?;
    let events = detection.events.clone();
    let mut matrix = initial_labels(&events, rows_of(models))?;

    let threshold = all_off_threshold(models, F::of(config.all_off_margin));
    let cycles = segment_cycles(detection.filtered.values(), &events, threshold);
    let mut refinery = Refinery::new(cycles, events.len(), models.len(), config.search_budget);
    let diagnostics = refine_by_compatibility(&mut matrix, &mut refinery);
    for d in &diagnostics {
        log::debug!("cycle {} left unrefined: {:?}", d.cycle, d.issue);
    }

    let times: Vec<f64> = events.iter().map(|e| aggregate.time_at(e.index)).collect();
    let days: Vec<i64> = events.iter().map(|e| aggregate.day_of(e.index)).collect();
    refine_by_behaviors(&mut matrix, &refinery, models, aggregate.values(), &days, &times);
    resolve_by_participation(&mut matrix, &refinery, models, &days);

    let labels = (0..events.len())
        .map(|col| {
            let row = matrix.single(col).expect("one label per event after resolution");
            Label {
                event: events[col],
                time: times[col],
                transition: matrix.rows[row].transition.clone(),
                stage: matrix.stage(col).unwrap_or(Stage::Participation),
            }
        })
        .collect();
    Ok(Classification { cycles: refinery.cycles, detection, labels, diagnostics })
}
