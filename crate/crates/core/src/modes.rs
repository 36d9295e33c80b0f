//! Operation-mode extraction from a filtered single-appliance signal.
//!
//! Samples are first grouped by agglomerative Ward clustering down to a fixed
//! number of clusters. The clusters are then merged top-down by centroid
//! distance: starting from the highest centroid as root, the next lower
//! cluster is absorbed while its centroid lies within `merge_ratio` of the
//! root's centroid, otherwise it becomes the new root.
//!
//! In one dimension the cheapest Ward merge is always between clusters that
//! are adjacent in value order, so clustering runs over the sorted distinct
//! values with a heap of adjacent-pair costs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::scalar::Scalar;
use crate::signal::PowerSignal;

pub type ModeId = u16;

pub const OFF_MODE: ModeId = 0;
pub const DEFAULT_K: usize = 10;
pub const DEFAULT_MERGE_RATIO: f64 = 0.15;
pub const DEFAULT_OFF_THRESHOLD: f64 = 5.0;

/// Above this many samples, values are quantized to 1 W before clustering.
/// Inputs longer than this are pre-grouped into 1 W bins before Ward.
pub const BIN_ABOVE: usize = 20_000;

/// Summary of a group of power samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Cluster<F = f64> {
    pub centroid: F,
    pub min: F,
    pub max: F,
    pub size: usize,
}

impl<F: Scalar> Cluster<F> {
    pub fn singleton(value: F, multiplicity: usize) -> Self {
        Cluster {
            centroid: value,
            min: value,
            max: value,
            size: multiplicity,
        }
    }

    pub fn from_samples(samples: &[F]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let n = F::of_usize(samples.len());
        Some(Cluster {
            centroid: samples.iter().copied().sum::<F>() / n,
            min: samples.iter().copied().fold(F::infinity(), F::min),
            max: samples.iter().copied().fold(F::neg_infinity(), F::max),
            size: samples.len(),
        })
    }

    /// Size-weighted centroid, envelope bounds.
    pub fn merge(&self, other: &Self) -> Self {
        let na = F::of_usize(self.size);
        let nb = F::of_usize(other.size);
        Cluster {
            centroid: (na * self.centroid + nb * other.centroid) / (na + nb),
            min: self.min.min(other.min),
            max: self.max.max(other.max),
            size: self.size + other.size,
        }
    }

    pub fn interval(&self) -> Interval<F> {
        Interval::new(self.min, self.max)
    }
}

/// Increase in within-cluster sum of squares caused by merging `a` and `b`:
/// `n_a n_b / (n_a + n_b) * (m_a - m_b)^2`.
pub fn ward_merge_cost<F: Scalar>(a: &Cluster<F>, b: &Cluster<F>) -> F {
    let na = F::of_usize(a.size);
    let nb = F::of_usize(b.size);
    let d = a.centroid - b.centroid;
    na * nb / (na + nb) * d * d
}

#[derive(Clone, Copy, Debug)]
struct Candidate<F> {
    cost: F,
    left_centroid: F,
    right_centroid: F,
    left: usize,
    right: usize,
    left_version: u32,
    right_version: u32,
}

impl<F: Scalar> Candidate<F> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        let by = |a: F, b: F| a.partial_cmp(&b).unwrap_or(Ordering::Equal);
        by(self.cost, other.cost)
            .then_with(|| by(self.left_centroid, other.left_centroid))
            .then_with(|| by(self.right_centroid, other.right_centroid))
            .then_with(|| self.left.cmp(&other.left))
    }
}

impl<F: Scalar> PartialEq for Candidate<F> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}
impl<F: Scalar> Eq for Candidate<F> {}
impl<F: Scalar> PartialOrd for Candidate<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<F: Scalar> Ord for Candidate<F> {
    // Reversed: BinaryHeap is a max-heap and we want the cheapest merge.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// Collapses samples into `(value, multiplicity)` pairs sorted by value.
/// Large inputs are rounded to whole watts first.
pub fn weighted_points<F: Scalar>(samples: &[F]) -> Vec<(F, usize)> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let mut out: Vec<(F, usize)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((last, n)) if *last == v => *n += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Samples grouped by integer watt, each group summarized exactly.
pub fn watt_bins<F: Scalar>(samples: &[F]) -> Vec<Cluster<F>> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i].floor() != sorted[start].floor() {
            out.push(Cluster::from_samples(&sorted[start..i]).expect("non-empty bin"));
            start = i;
        }
    }
    out
}

/// Ward agglomerative clustering down to `k` clusters.
///
/// Among merges of equal cost the pair with the smaller centroids goes first.
/// Returned clusters are sorted by centroid, ascending.
pub fn lw_cluster<F: Scalar>(samples: &[F], k: usize) -> Result<Vec<Cluster<F>>> {
    if k == 0 || samples.len() < k {
        return Err(Error::InsufficientData {
            needed: k.max(1),
            got: samples.len(),
        });
    }
    if samples.len() > BIN_ABOVE {
        let bins = watt_bins(samples);
        if bins.len() >= k {
            return Ok(ward(bins, k));
        }
    }
    lw_cluster_weighted(&weighted_points(samples), k)
}

/// [`lw_cluster`] over distinct values with multiplicities, sorted ascending.
pub fn lw_cluster_weighted<F: Scalar>(points: &[(F, usize)], k: usize) -> Result<Vec<Cluster<F>>> {
    let total: usize = points.iter().map(|p| p.1).sum();
    if k == 0 || total < k {
        return Err(Error::InsufficientData {
            needed: k.max(1),
            got: total,
        });
    }
    let mut clusters: Vec<Cluster<F>> = points
        .iter()
        .map(|&(v, n)| Cluster::singleton(v, n))
        .collect();

    // Duplicated values can leave fewer distinct points than k; split the
    // heaviest multiplicities so each cluster holds at least one sample.
    while clusters.len() < k {
        let (i, _) = clusters
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.size.cmp(&b.1.size).then(b.0.cmp(&a.0)))
            .expect("non-empty");
        let c = clusters[i];
        let half = c.size / 2;
        clusters[i].size = c.size - half;
        clusters.insert(i + 1, Cluster { size: half, ..c });
    }
    Ok(ward(clusters, k))
}

/// Ward merging of adjacent clusters (sorted ascending) down to `k`.
fn ward<F: Scalar>(mut clusters: Vec<Cluster<F>>, k: usize) -> Vec<Cluster<F>> {
    let n = clusters.len();
    let mut alive = vec![true; n];
    let mut version = vec![0u32; n];
    let mut prev: Vec<Option<usize>> = (0..n).map(|i| i.checked_sub(1)).collect();
    let mut next: Vec<Option<usize>> = (0..n).map(|i| (i + 1 < n).then_some(i + 1)).collect();

    let candidate = |clusters: &[Cluster<F>], version: &[u32], l: usize, r: usize| Candidate {
        cost: ward_merge_cost(&clusters[l], &clusters[r]),
        left_centroid: clusters[l].centroid,
        right_centroid: clusters[r].centroid,
        left: l,
        right: r,
        left_version: version[l],
        right_version: version[r],
    };

    let mut heap: BinaryHeap<Candidate<F>> = (0..n.saturating_sub(1))
        .map(|i| candidate(&clusters, &version, i, i + 1))
        .collect();

    let mut remaining = n;
    while remaining > k {
        let c = heap.pop().expect("adjacent pairs remain while more than k clusters");
        if !alive[c.left]
            || !alive[c.right]
            || version[c.left] != c.left_version
            || version[c.right] != c.right_version
        {
            continue;
        }
        let merged = clusters[c.left].merge(&clusters[c.right]);
        clusters[c.left] = merged;
        version[c.left] += 1;
        alive[c.right] = false;
        next[c.left] = next[c.right];
        if let Some(r) = next[c.right] {
            prev[r] = Some(c.left);
        }
        remaining -= 1;
        if let Some(p) = prev[c.left] {
            heap.push(candidate(&clusters, &version, p, c.left));
        }
        if let Some(r) = next[c.left] {
            heap.push(candidate(&clusters, &version, c.left, r));
        }
    }

    clusters
        .into_iter()
        .zip(alive)
        .filter_map(|(c, a)| a.then_some(c))
        .collect()
}

/// Top-down merge of clusters whose centroids lie within `ratio` of the
/// current root centroid. Output sorted by centroid, ascending.
pub fn distance_merge<F: Scalar>(clusters: &[Cluster<F>], ratio: F) -> Vec<Cluster<F>> {
    let mut sorted = clusters.to_vec();
    sorted.sort_by(|a, b| {
        b.centroid
            .partial_cmp(&a.centroid)
            .unwrap_or(Ordering::Equal)
            .then_with(|| b.max.partial_cmp(&a.max).unwrap_or(Ordering::Equal))
            .then_with(|| b.size.cmp(&a.size))
    });
    let mut out: Vec<Cluster<F>> = Vec::new();
    let mut iter = sorted.into_iter();
    let Some(mut root) = iter.next() else {
        return out;
    };
    for c in iter {
        if root.centroid - c.centroid < ratio * root.centroid {
            root = root.merge(&c);
        } else {
            out.push(root);
            root = c;
        }
    }
    out.push(root);
    out.reverse();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct State<F = f64> {
    pub mode: ModeId,
    pub interval: Interval<F>,
    pub centroid: F,
    /// Number of training samples behind the state; zero for a synthetic OFF.
    pub size: usize,
    pub off: bool,
}

/// Disjoint power intervals of an appliance, one per operation mode, sorted
/// ascending. Mode ids are positions in that order, so OFF is always mode 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct StateSet<F = f64> {
    pub states: Vec<State<F>>,
}

impl<F: Scalar> StateSet<F> {
    /// Tags the lowest cluster OFF when its centroid is below
    /// `off_threshold`; otherwise prepends a zero-width OFF state at 0 W.
    pub fn from_clusters(clusters: &[Cluster<F>], off_threshold: F) -> Self {
        let mut sorted = clusters.to_vec();
        sorted.sort_by(|a, b| a.centroid.partial_cmp(&b.centroid).unwrap_or(Ordering::Equal));
        let mut states = Vec::with_capacity(sorted.len() + 1);
        let has_off = sorted
            .first()
            .is_some_and(|c| c.centroid < off_threshold);
        if !has_off {
            states.push(State {
                mode: OFF_MODE,
                interval: Interval::point(F::zero()),
                centroid: F::zero(),
                size: 0,
                off: true,
            });
        }
        for c in sorted {
            let mode = states.len() as ModeId;
            states.push(State {
                mode,
                interval: c.interval(),
                centroid: c.centroid,
                size: c.size,
                off: mode == OFF_MODE,
            });
        }
        StateSet { states }
    }

    /// An appliance that never left OFF.
    pub fn off_only() -> Self {
        Self::from_clusters(&[], F::one())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn off(&self) -> &State<F> {
        &self.states[OFF_MODE as usize]
    }

    pub fn get(&self, mode: ModeId) -> Option<&State<F>> {
        self.states.get(mode as usize)
    }

    pub fn non_off(&self) -> impl Iterator<Item = &State<F>> {
        self.states.iter().filter(|s| !s.off)
    }

    /// Mode whose interval contains `level`, else the one nearest to it.
    /// Ties go to the lower mode.
    pub fn nearest_mode(&self, level: F) -> ModeId {
        let mut best = OFF_MODE;
        let mut best_d = F::infinity();
        for s in &self.states {
            let d = s.interval.distance(level);
            if d < best_d {
                best = s.mode;
                best_d = d;
            }
        }
        best
    }
}

/// Ward clustering to `k` clusters followed by the distance-based merge.
pub fn extract_states<F: Scalar>(
    filtered: &PowerSignal<F>,
    k: usize,
    merge_ratio: F,
    off_threshold: F,
) -> Result<StateSet<F>> {
    extract_states_from_samples(filtered.values(), k, merge_ratio, off_threshold)
}

pub fn extract_states_from_samples<F: Scalar>(
    samples: &[F],
    k: usize,
    merge_ratio: F,
    off_threshold: F,
) -> Result<StateSet<F>> {
    let clusters = lw_cluster(samples, k)?;
    let merged = distance_merge(&clusters, merge_ratio);
    Ok(StateSet::from_clusters(&merged, off_threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cl(samples: &[f64]) -> Cluster {
        Cluster::from_samples(samples).unwrap()
    }

    fn sse(xs: &[f64]) -> f64 {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m) * (x - m)).sum()
    }

    /// Textbook agglomerative Ward over all pairs, tracking members.
    fn brute_ward(samples: &[f64], k: usize) -> Vec<Vec<f64>> {
        let mut groups: Vec<Vec<f64>> = samples.iter().map(|&x| vec![x]).collect();
        while groups.len() > k {
            let mut best: Option<(f64, f64, f64, usize, usize)> = None;
            for i in 0..groups.len() {
                for j in 0..groups.len() {
                    if i == j {
                        continue;
                    }
                    let mut u = groups[i].clone();
                    u.extend(&groups[j]);
                    let cost = sse(&u) - sse(&groups[i]) - sse(&groups[j]);
                    let ci = groups[i].iter().sum::<f64>() / groups[i].len() as f64;
                    let cj = groups[j].iter().sum::<f64>() / groups[j].len() as f64;
                    let (lo, hi) = if ci <= cj { (ci, cj) } else { (cj, ci) };
                    let better = match best {
                        None => true,
                        Some((bc, bl, bh, _, _)) => {
                            cost < bc - 1e-9
                                || ((cost - bc).abs() <= 1e-9 && (lo, hi) < (bl, bh))
                        }
                    };
                    if better {
                        best = Some((cost, lo, hi, i, j));
                    }
                }
            }
            let (_, _, _, i, j) = best.unwrap();
            let (a, b) = (i.min(j), i.max(j));
            let gb = groups.remove(b);
            groups[a].extend(gb);
        }
        for g in &mut groups {
            g.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        groups.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        groups
    }

    #[test]
    fn ward_cost_examples() {
        assert_eq!(ward_merge_cost(&cl(&[5.0, 5.0]), &cl(&[5.0])), 0.0);
        assert_eq!(ward_merge_cost(&cl(&[0.0, 0.0]), &cl(&[3.0, 3.0])), 9.0);
    }

    #[test]
    fn ward_cost_matches_sse_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a: Vec<f64> = (0..rng.random_range(1..20)).map(|_| rng.random_range(0.0..2000.0)).collect();
            let b: Vec<f64> = (0..rng.random_range(1..20)).map(|_| rng.random_range(0.0..2000.0)).collect();
            let mut u = a.clone();
            u.extend(&b);
            let oracle = sse(&u) - sse(&a) - sse(&b);
            let got = ward_merge_cost(&cl(&a), &cl(&b));
            assert!((got - oracle).abs() <= 1e-9 * oracle.abs().max(1.0), "{got} vs {oracle}");
        }
    }

    #[test]
    fn singletons_when_k_equals_n() {
        let c = lw_cluster(&[3.0, 1.0, 2.0], 3).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|c| c.size == 1 && c.min == c.max));
    }

    #[test]
    fn two_obvious_groups() {
        let c = lw_cluster(&[0.0, 1.0, 10.0, 11.0], 2).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].min, c[0].max, c[0].size), (0.0, 1.0, 2));
        assert_eq!((c[1].min, c[1].max, c[1].size), (10.0, 11.0, 2));
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            lw_cluster(&[1.0, 2.0], 3),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn duplicates_can_still_reach_k() {
        let c = lw_cluster(&[4.0; 5], 3).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.iter().map(|c| c.size).sum::<usize>(), 5);
    }

    #[test]
    fn heap_clustering_matches_all_pairs_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..150 {
            let n = rng.random_range(2..18);
            let mut pool: Vec<f64> = (0..60).map(|i| i as f64 * 7.5).collect();
            for i in (1..pool.len()).rev() {
                pool.swap(i, rng.random_range(0..=i));
            }
            let samples = pool[..n].to_vec();
            let k = rng.random_range(1..=n);
            let fast = lw_cluster(&samples, k).unwrap();
            let slow = brute_ward(&samples, k);
            assert_eq!(fast.len(), slow.len());
            for (f, s) in fast.iter().zip(&slow) {
                assert_eq!(f.size, s.len(), "{samples:?} k={k}");
                assert_eq!(f.min, s[0]);
                assert_eq!(f.max, *s.last().unwrap());
            }
        }
    }

    #[test]
    fn total_cost_is_non_decreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..500.0)).collect();
        let objective = |k: usize| -> f64 {
            let cs = lw_cluster(&samples, k).unwrap();
            let mut sorted = samples.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut at = 0;
            cs.iter()
                .map(|c| {
                    let s = sse(&sorted[at..at + c.size]);
                    at += c.size;
                    s
                })
                .sum()
        };
        let mut last = 0.0;
        for k in (1..=40).rev() {
            let o = objective(k);
            assert!(o + 1e-9 >= last, "objective fell at k={k}");
            last = o;
        }
    }

    #[test]
    fn distance_merge_dishwasher_top_rows() {
        let a = Cluster { centroid: 1173.0, min: 1115.0, max: 1247.0, size: 50 };
        let b = Cluster { centroid: 1099.0, min: 1078.0, max: 1110.0, size: 50 };
        let m = distance_merge(&[b, a], 0.15);
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].min, m[0].max), (1078.0, 1247.0));
        assert_eq!(m[0].centroid, 1136.0);
    }

    #[test]
    fn distance_merge_threshold_boundary() {
        let at = |c: f64| Cluster { centroid: c, min: c, max: c, size: 1 };
        assert_eq!(distance_merge(&[at(1000.0), at(870.0)], 0.15).len(), 1);
        assert_eq!(distance_merge(&[at(1000.0), at(840.0)], 0.15).len(), 2);
        assert_eq!(distance_merge(&[at(1000.0)], 0.15), vec![at(1000.0)]);
    }

    #[test]
    fn merged_root_is_reused() {
        // 1000 absorbs 900 (root becomes 950), then 820 is 130 < 142.5 away.
        let at = |c: f64| Cluster { centroid: c, min: c, max: c, size: 1 };
        let m = distance_merge(&[at(820.0), at(1000.0), at(900.0)], 0.15);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].size, 3);
    }

    #[test]
    fn off_state_tagging() {
        let cs = vec![
            Cluster { centroid: 2.0, min: 1.9, max: 2.1, size: 100 },
            Cluster { centroid: 200.0, min: 190.0, max: 210.0, size: 10 },
        ];
        let s = StateSet::from_clusters(&cs, 5.0);
        assert_eq!(s.len(), 2);
        assert!(s.off().off && s.off().interval.hi == 2.1);
        let s = StateSet::from_clusters(&cs[1..], 5.0);
        assert_eq!(s.len(), 2);
        assert_eq!(s.off().interval, Interval::point(0.0));
        assert_eq!(s.states[1].mode, 1);
    }

    #[test]
    fn nearest_mode_rule() {
        let cs = vec![
            Cluster { centroid: 0.0, min: 0.0, max: 0.0, size: 10 },
            Cluster { centroid: 230.0, min: 198.0, max: 261.0, size: 10 },
            Cluster { centroid: 1160.0, min: 1078.0, max: 1247.0, size: 10 },
        ];
        let s = StateSet::from_clusters(&cs, 5.0);
        assert_eq!(s.nearest_mode(1070.0), 2);
        assert_eq!(s.nearest_mode(230.0), 1);
        assert_eq!(s.nearest_mode(0.5), 0);
    }

    #[test]
    fn recovers_three_planted_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut v = Vec::new();
        for _ in 0..20 {
            v.extend((0..300).map(|_| 1.5 * (1.0 + rng.random_range(-0.02..0.02))));
            v.extend((0..80).map(|_| 200.0 * (1.0 + rng.random_range(-0.02..0.02))));
            v.extend((0..60).map(|_| 1100.0 * (1.0 + rng.random_range(-0.02..0.02))));
        }
        let s = extract_states_from_samples(&v, 10, 0.15, 5.0).unwrap();
        assert_eq!(s.len(), 3);
        for (st, want) in s.states.iter().zip([1.5f64, 200.0, 1100.0]) {
            assert!((st.centroid - want).abs() <= 0.05 * want);
        }
    }

    proptest! {
        #[test]
        fn ward_cost_is_non_negative_and_zero_iff_same_centroid(
            a in proptest::collection::vec(0.0f64..3000.0, 1..10),
            b in proptest::collection::vec(0.0f64..3000.0, 1..10),
        ) {
            let (ca, cb) = (cl(&a), cl(&b));
            let c = ward_merge_cost(&ca, &cb);
            prop_assert!(c >= 0.0);
            prop_assert_eq!(c == 0.0, ca.centroid == cb.centroid);
        }

        #[test]
        fn distance_merge_conserves_samples_and_ignores_order(
            samples in proptest::collection::vec(0.0f64..3000.0, 10..120),
            seed in any::<u64>(),
        ) {
            let clusters = lw_cluster(&samples, 10).unwrap();
            let merged = distance_merge(&clusters, 0.15);
            prop_assert_eq!(merged.iter().map(|c| c.size).sum::<usize>(), samples.len());
            for w in merged.windows(2) {
                prop_assert!(w[0].max < w[1].min);
            }
            let mut shuffled = clusters.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.random_range(0..=i));
            }
            prop_assert_eq!(distance_merge(&shuffled, 0.15), merged);
        }

        #[test]
        fn watt_bins_are_exact_clusters(samples in proptest::collection::vec(0.0f64..50.0, 1..200)) {
            let bins = watt_bins(&samples);
            prop_assert_eq!(bins.iter().map(|b| b.size).sum::<usize>(), samples.len());
            for w in bins.windows(2) {
                prop_assert!(w[0].max.floor() < w[1].min.floor());
            }
            for b in &bins {
                let members: Vec<f64> = samples.iter().copied().filter(|v| v.floor() == b.min.floor()).collect();
                let exact = Cluster::from_samples(&members).unwrap();
                prop_assert_eq!((b.size, b.min, b.max), (exact.size, exact.min, exact.max));
                prop_assert!((b.centroid - exact.centroid).abs() <= 1e-9);
            }
        }
    }
}
