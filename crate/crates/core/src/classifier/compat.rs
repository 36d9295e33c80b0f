//! Mode-vector compatibility search over one cycle.
//!
//! The graph over mode vectors is never built: a forward sweep collects the
//! vectors reachable from all-OFF after each event, a backward sweep keeps
//! those from which all-OFF is still reachable, and a label survives when it
//! links two surviving vectors.

use std::collections::HashSet;

use super::Row;
use crate::modes::{ModeId, OFF_MODE};
use crate::scalar::Scalar;

pub const DEFAULT_SEARCH_BUDGET: usize = 1_000_000;

/// Current mode of every appliance, indexed like the model list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeVector(pub Vec<ModeId>);

impl ModeVector {
    pub fn all_off(appliances: usize) -> Self {
        ModeVector(vec![OFF_MODE; appliances])
    }

    pub fn is_all_off(&self) -> bool {
        self.0.iter().all(|&m| m == OFF_MODE)
    }

    /// Vector after taking `row`, if the row is applicable here.
    pub fn step<F: Scalar>(&self, row: &Row<F>) -> Option<ModeVector> {
        let t = &row.transition;
        if row.forbidden || self.0[row.appliance] != t.from {
            return None;
        }
        let mut next = self.0.clone();
        next[row.appliance] = t.to;
        Some(ModeVector(next))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    /// Per event, the candidate rows used by at least one closed walk.
    Kept(Vec<Vec<usize>>),
    Infeasible,
    Exhausted,
}

/// Labels of a cycle that take part in some walk from all-OFF back to
/// all-OFF, one label per event.
pub fn compatible_labels<F: Scalar>(
    candidates: &[Vec<usize>],
    rows: &[Row<F>],
    appliances: usize,
    budget: usize,
) -> Compatibility {
    let start = ModeVector::all_off(appliances);
    let mut layers: Vec<HashSet<ModeVector>> = vec![HashSet::from([start.clone()])];
    let mut nodes = 1usize;
    for cands in candidates {
        let mut next = HashSet::new();
        for theta in layers.last().expect("non-empty") {
            for &r in cands {
                if let Some(t) = theta.step(&rows[r]) {
                    nodes += 1;
                    if nodes > budget {
                        return Compatibility::Exhausted;
                    }
                    next.insert(t);
                }
            }
        }
        if next.is_empty() {
            return Compatibility::Infeasible;
        }
        layers.push(next);
    }
    if !layers.last().expect("non-empty").contains(&start) {
        return Compatibility::Infeasible;
    }

    let mut kept = vec![Vec::new(); candidates.len()];
    let mut good: HashSet<ModeVector> = HashSet::from([start]);
    for (i, cands) in candidates.iter().enumerate().rev() {
        let mut used = vec![false; cands.len()];
        let mut prev = HashSet::new();
        for theta in &layers[i] {
            for (k, &r) in cands.iter().enumerate() {
                if theta.step(&rows[r]).is_some_and(|t| good.contains(&t)) {
                    used[k] = true;
                    prev.insert(theta.clone());
                }
            }
        }
        kept[i] = cands
            .iter()
            .zip(used)
            .filter_map(|(&r, u)| u.then_some(r))
            .collect();
        good = prev;
    }
    Compatibility::Kept(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Direction, Transition};
    use crate::interval::Interval;

    fn row(appliance: usize, from: ModeId, to: ModeId) -> Row {
        Row {
            appliance,
            transition: Transition {
                appliance: format!("a{appliance}"),
                from,
                to,
                interval: Interval::new(0.0, 1.0),
                direction: if to > from { Direction::Rising } else { Direction::Falling },
                participation: 0.0,
            },
            forbidden: false,
        }
    }

    // rows: 0 = A on, 1 = A off, 2 = B on, 3 = B off
    fn two_appliances() -> Vec<Row> {
        vec![row(0, 0, 1), row(0, 1, 0), row(1, 0, 1), row(1, 1, 0)]
    }

    #[test]
    fn cannot_switch_on_what_is_already_on() {
        // A on, A on, {A off, B off}, A off ... only A off is consistent at 3rd
        let rows = two_appliances();
        let c = compatible_labels(&[vec![0], vec![1], vec![0, 2], vec![1]], &rows, 2, 100);
        assert_eq!(c, Compatibility::Kept(vec![vec![0], vec![1], vec![0], vec![1]]));
    }

    #[test]
    fn minimal_cycle_is_unchanged() {
        let rows = two_appliances();
        let c = compatible_labels(&[vec![0], vec![1]], &rows, 2, 100);
        assert_eq!(c, Compatibility::Kept(vec![vec![0], vec![1]]));
    }

    #[test]
    fn unclosed_walk_is_infeasible() {
        let rows = two_appliances();
        assert_eq!(compatible_labels(&[vec![0]], &rows, 2, 100), Compatibility::Infeasible);
        assert_eq!(compatible_labels(&[vec![1]], &rows, 2, 100), Compatibility::Infeasible);
    }

    #[test]
    fn forbidden_rows_are_never_applicable() {
        let mut rows = two_appliances();
        rows[2].forbidden = true;
        let c = compatible_labels(&[vec![0, 2], vec![1, 3]], &rows, 2, 100);
        assert_eq!(c, Compatibility::Kept(vec![vec![0], vec![1]]));
    }

    #[test]
    fn budget_is_enforced() {
        let rows = two_appliances();
        let c = compatible_labels(&[vec![0, 2], vec![0, 2], vec![1, 3], vec![1, 3]], &rows, 2, 3);
        assert_eq!(c, Compatibility::Exhausted);
    }

    /// Union of labels over every closed walk, by exhaustive enumeration.
    fn enumerate(cands: &[Vec<usize>], rows: &[Row], appliances: usize) -> Option<Vec<Vec<usize>>> {
        let mut kept = vec![std::collections::BTreeSet::new(); cands.len()];
        let mut any = false;
        let total: usize = cands.iter().map(Vec::len).product();
        for mut code in 0..total {
            let mut modes = vec![0u16; appliances];
            let mut pick = Vec::with_capacity(cands.len());
            let mut ok = true;
            for c in cands {
                let r = c[code % c.len()];
                code /= c.len();
                let t = &rows[r].transition;
                if rows[r].forbidden || modes[rows[r].appliance] != t.from {
                    ok = false;
                    break;
                }
                modes[rows[r].appliance] = t.to;
                pick.push(r);
            }
            if ok && modes.iter().all(|&m| m == 0) {
                any = true;
                for (k, r) in pick.into_iter().enumerate() {
                    kept[k].insert(r);
                }
            }
        }
        any.then(|| kept.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    proptest::proptest! {
        #[test]
        fn matches_exhaustive_enumeration(
            appliances in 1usize..=3,
            masks in proptest::collection::vec(1u8..64, 1..=6),
        ) {
            let rows: Vec<Row> = (0..appliances).flat_map(|a| [row(a, 0, 1), row(a, 1, 0)]).collect();
            let cands: Vec<Vec<usize>> = masks
                .iter()
                .map(|&m| {
                    let c: Vec<usize> = (0..rows.len()).filter(|&r| m & (1 << r) != 0).collect();
                    if c.is_empty() { vec![m as usize % rows.len()] } else { c }
                })
                .collect();
            let got = compatible_labels(&cands, &rows, appliances, DEFAULT_SEARCH_BUDGET);
            match enumerate(&cands, &rows, appliances) {
                Some(kept) => proptest::prop_assert_eq!(got, Compatibility::Kept(kept)),
                None => proptest::prop_assert_eq!(got, Compatibility::Infeasible),
            }
        }
    }
}
