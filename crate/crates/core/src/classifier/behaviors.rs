//! Step 3: pruning multi-labeled events with behavioral fingerprints.

use std::collections::{BTreeMap, BTreeSet};

use super::{CandidateLabelMatrix, Refinery, Stage};
use crate::features::{overshoot_height, ApplianceModel, Direction};
use crate::modes::OFF_MODE;
use crate::scalar::Scalar;

type Removals = BTreeMap<usize, Vec<usize>>;

/// Applies, in order, the all-or-none daily rule, the forbidden-transition
/// rule, the overshoot rule and the minimum OFF-gap rule. `days` and `times`
/// hold each event column's day number and epoch time.
pub fn refine_by_behaviors<F: Scalar>(
    matrix: &mut CandidateLabelMatrix<F>,
    refinery: &Refinery,
    models: &[ApplianceModel<F>],
    raw: &[F],
    days: &[i64],
    times: &[f64],
) {
    let all_or_none = all_or_none_removals(matrix, models, days);
    refinery.remove(matrix, &all_or_none, Stage::Behavior);

    let forbidden: Removals = (0..matrix.n_events())
        .filter_map(|col| {
            let drop: Vec<usize> = matrix.candidates(col).into_iter().filter(|&r| matrix.rows[r].forbidden).collect();
            (!drop.is_empty()).then_some((col, drop))
        })
        .collect();
    refinery.remove(matrix, &forbidden, Stage::Behavior);

    let overshoot = overshoot_removals(matrix, models, raw);
    refinery.remove(matrix, &overshoot, Stage::Behavior);

    for (a, model) in models.iter().enumerate() {
        if let Some(gap) = model.behaviors.min_off_gap {
            let early = early_restart_removals(matrix, a, gap, times);
            refinery.remove(matrix, &early, Stage::Behavior);
        }
    }
}

/// Days on which an appliance's signature transition is not among any
/// event's candidates lose all of that appliance's labels.
fn all_or_none_removals<F: Scalar>(matrix: &CandidateLabelMatrix<F>, models: &[ApplianceModel<F>], days: &[i64]) -> Removals {
    let mut removals = Removals::new();
    let day_set: BTreeSet<i64> = days.iter().copied().collect();
    for (a, model) in models.iter().enumerate() {
        let Some(signature) = model.behaviors.all_or_none_daily else { continue };
        let Some(sig_row) = matrix
            .rows
            .iter()
            .position(|r| r.appliance == a && r.transition.pair() == signature)
        else {
            continue;
        };
        for &day in &day_set {
            let cols: Vec<usize> = (0..matrix.n_events()).filter(|&c| days[c] == day).collect();
            if cols.iter().any(|&c| matrix.cell(sig_row, c)) {
                continue;
            }
            for c in cols {
                let drop: Vec<usize> = matrix.candidates(c).into_iter().filter(|&r| matrix.rows[r].appliance == a).collect();
                if !drop.is_empty() {
                    removals.entry(c).or_default().extend(drop);
                }
            }
        }
    }
    removals
}

/// A rising event whose raw overshoot stays below an appliance's learned
/// minimum cannot be that appliance's transition when a candidate without
/// overshoot exists; one reaching the minimum rules out the latter.
fn overshoot_removals<F: Scalar>(matrix: &CandidateLabelMatrix<F>, models: &[ApplianceModel<F>], raw: &[F]) -> Removals {
    let mut removals = Removals::new();
    for col in 0..matrix.n_events() {
        let event = &matrix.events[col];
        let cands = matrix.candidates(col);
        if cands.len() < 2 || !event.is_rising() {
            continue;
        }
        let height = overshoot_height(raw, event);
        let mut below = Vec::new();
        let mut reached = false;
        let mut plain = Vec::new();
        for &r in &cands {
            let row = &matrix.rows[r];
            match models[row.appliance].behaviors.overshoot_min {
                Some(min) if row.transition.direction == Direction::Rising => {
                    if height < min {
                        below.push(r);
                    } else {
                        reached = true;
                    }
                }
                Some(_) => {}
                None => plain.push(r),
            }
        }
        if !below.is_empty() && !plain.is_empty() {
            removals.insert(col, below);
        } else if reached && !plain.is_empty() {
            removals.insert(col, plain);
        }
    }
    removals
}

/// Candidate restarts of appliance `a` sooner than `gap` seconds after its
/// last settled switch-off.
fn early_restart_removals<F: Scalar>(matrix: &CandidateLabelMatrix<F>, a: usize, gap: f64, times: &[f64]) -> Removals {
    let mut removals = Removals::new();
    let mut last_off: Option<f64> = None;
    for col in 0..matrix.n_events() {
        let cands = matrix.candidates(col);
        if cands.len() == 1 {
            let t = &matrix.rows[cands[0]].transition;
            if matrix.rows[cands[0]].appliance == a && t.to == OFF_MODE {
                last_off = Some(times[col]);
            }
            continue;
        }
        let Some(off_at) = last_off else { continue };
        if times[col] - off_at >= gap {
            continue;
        }
        let drop: Vec<usize> = cands
            .into_iter()
            .filter(|&r| matrix.rows[r].appliance == a && matrix.rows[r].transition.pair().starts_from_off())
            .collect();
        if !drop.is_empty() {
            removals.insert(col, drop);
        }
    }
    removals
}
