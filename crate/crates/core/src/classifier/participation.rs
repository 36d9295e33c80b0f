//! Step 4: resolving leftover ambiguity with participation indices.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{CandidateLabelMatrix, Refinery, Row, Stage};
use crate::features::ApplianceModel;
use crate::scalar::Scalar;

/// Component id per row: rows of one direction whose intervals overlap,
/// directly or through a chain of others, share a component.
pub fn overlap_groups<F: Scalar>(rows: &[Row<F>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        let (ta, tb) = (&rows[a].transition, &rows[b].transition);
        ta.direction
            .cmp(&tb.direction)
            .then(ta.interval.lo.partial_cmp(&tb.interval.lo).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });
    let mut group = vec![0; rows.len()];
    let mut current = 0;
    let mut reach: Option<(crate::features::Direction, F)> = None;
    for &r in &order {
        let t = &rows[r].transition;
        match reach {
            Some((dir, hi)) if dir == t.direction && t.interval.lo <= hi => {
                reach = Some((dir, hi.max(t.interval.hi)));
            }
            Some(_) => {
                current += 1;
                reach = Some((t.direction, t.interval.hi));
            }
            None => reach = Some((t.direction, t.interval.hi)),
        }
        group[r] = current;
    }
    group
}

/// Chooses one label for every still-ambiguous event.
///
/// Per day and overlap group, each candidate transition's observed share of
/// the day's events is computed as if all of the group's ambiguous events
/// were that transition. Each event then takes the candidate whose trained
/// participation index is closest to that share; ties go to the larger
/// trained index, then to the appliance name.
pub fn resolve_by_participation<F: Scalar>(
    matrix: &mut CandidateLabelMatrix<F>,
    refinery: &Refinery,
    models: &[ApplianceModel<F>],
    days: &[i64],
) {
    let groups = overlap_groups(&matrix.rows);
    let mut per_day: BTreeMap<i64, usize> = BTreeMap::new();
    let mut single_counts: BTreeMap<(i64, usize), usize> = BTreeMap::new();
    let mut ambiguous: BTreeMap<(i64, usize), Vec<usize>> = BTreeMap::new();
    for col in 0..matrix.n_events() {
        *per_day.entry(days[col]).or_default() += 1;
        let cands = matrix.candidates(col);
        if cands.len() == 1 {
            *single_counts.entry((days[col], cands[0])).or_default() += 1;
        } else {
            ambiguous.entry((days[col], groups[cands[0]])).or_default().push(col);
        }
    }

    for ((day, _), cols) in ambiguous {
        let total = per_day[&day] as f64;
        let mut share: BTreeMap<usize, f64> = BTreeMap::new();
        for &col in &cols {
            for r in matrix.candidates(col) {
                *share.entry(r).or_insert_with(|| *single_counts.get(&(day, r)).unwrap_or(&0) as f64) += 1.0;
            }
        }
        let trained = |r: usize| {
            let row = &matrix.rows[r];
            models[row.appliance].participation(row.transition.pair()).as_f64()
        };
        let score = |r: usize| (share[&r] / total - trained(r)).abs();
        let rank = |a: &usize, b: &usize| {
            score(*a)
                .total_cmp(&score(*b))
                .then(trained(*b).total_cmp(&trained(*a)))
                .then(matrix.rows[*a].transition.appliance.cmp(&matrix.rows[*b].transition.appliance))
                .then(a.cmp(b))
        };
        let ranked: Vec<Vec<usize>> = cols
            .iter()
            .map(|&col| {
                let mut c = matrix.candidates(col);
                c.sort_by(rank);
                c
            })
            .collect();

        for (&col, order) in cols.iter().zip(ranked) {
            if matrix.count(col) <= 1 {
                continue;
            }
            let live: Vec<usize> = order.into_iter().filter(|&r| matrix.cell(r, col)).collect();
            let fixed = live.iter().any(|&r| {
                refinery.apply(matrix, &BTreeMap::from([(col, vec![r])]), Stage::Participation) > 0
            });
            if !fixed {
                // Every choice breaks the cycle's closure; take the best one anyway.
                matrix.set_candidates(col, &live[..1]);
                matrix.settle(Stage::Participation);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::model;
    use super::super::{initial_labels, rows_of, Refinery};
    use super::*;
    use crate::features::ModePair;
    use crate::signal::EventRecord;

    fn with_participation(mut m: ApplianceModel, on: f64) -> ApplianceModel {
        for t in &mut m.transitions {
            if t.pair() == ModePair::new(0, 1) {
                t.participation = on;
            }
        }
        m
    }

    #[test]
    fn closest_trained_index_wins() {
        // Shares: 12 ambiguous + 0 singles over 100 events = 0.12 for both.
        let a = with_participation(model("bgfi", &[(1580.0, 1620.0)], &[(0, 1), (1, 0)]), 0.11);
        let b = with_participation(model("mw", &[(1439.0, 1598.0)], &[(0, 1), (1, 0)]), 0.20);
        let filler = model("x", &[(45.0, 55.0)], &[(0, 1), (1, 0)]);
        let models = [a, b, filler];
        let mut events = Vec::new();
        for i in 0..100 {
            events.push(if i < 12 { EventRecord::new(i * 4, 3.0, 1590.0) } else { EventRecord::new(i * 4, 3.0, 50.0) });
        }
        let mut m = initial_labels(&events, rows_of(&models)).unwrap();
        let days = vec![0; 100];
        let refinery = Refinery::new(Vec::new(), 100, 3, 1000);
        resolve_by_participation(&mut m, &refinery, &models, &days);
        for c in 0..12 {
            assert_eq!(m.rows[m.single(c).unwrap()].transition.appliance, "bgfi");
            assert_eq!(m.stage(c), Some(Stage::Participation));
        }
    }

    #[test]
    fn ties_prefer_larger_index_then_name() {
        let a = with_participation(model("b", &[(100.0, 200.0)], &[(0, 1), (1, 0)]), 0.5);
        let b = with_participation(model("a", &[(100.0, 200.0)], &[(0, 1), (1, 0)]), 0.5);
        let models = [a, b];
        let events = vec![EventRecord::new(0, 0.0, 150.0)];
        let mut m = initial_labels(&events, rows_of(&models)).unwrap();
        resolve_by_participation(&mut m, &Refinery::new(Vec::new(), 1, 2, 10), &models, &[0]);
        assert_eq!(m.rows[m.single(0).unwrap()].transition.appliance, "a");
    }

    #[test]
    fn groups_follow_overlap_chains() {
        let models = [
            model("a", &[(100.0, 200.0)], &[(0, 1), (1, 0)]),
            model("b", &[(190.0, 300.0)], &[(0, 1), (1, 0)]),
            model("c", &[(500.0, 600.0)], &[(0, 1), (1, 0)]),
        ];
        let rows = rows_of(&models);
        let g = overlap_groups(&rows);
        // rising a, b share; falling a, b share; c on its own each way.
        assert_eq!(g[0], g[2]);
        assert_eq!(g[1], g[3]);
        assert_ne!(g[0], g[1]);
        assert_ne!(g[0], g[4]);
        assert_ne!(g[1], g[5]);
    }
}
