//! Ground-truthed synthetic households.
//!
//! Each appliance is a mode machine with per-visit power levels. Scheduled
//! appliances are placed first as whole runs, continuous ones afterwards
//! transition by transition; every placement keeps transitions at least
//! `guard` samples apart and large enough, relative to the load already
//! running, to be observable in the aggregate. Noise, a slow common jitter,
//! overshoots and spikes are layered on top of the nominal levels.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::ModeId;
use crate::scalar::Scalar;
use crate::signal::{aggregate, PowerSignal, SECONDS_PER_DAY};

/// 2011-04-18 00:00 UTC.
pub const DEFAULT_START_TIME: f64 = 1_303_084_800.0;
pub const DEFAULT_PERIOD: f64 = 3.0;
/// Overshoot samples shrink by this factor each step.
const OVERSHOOT_DECAY: f64 = 0.3;
/// Spikes are only placed where they stand out this much from the load.
const SPIKE_MIN_RELATIVE: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    /// Range of per-visit levels, watts.
    pub level: [f64; 2],
    /// Range of visit durations, seconds.
    pub dwell: [f64; 2],
}

/// Admissible move between modes; mode 0 is OFF, mode `i` is `modes[i - 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OvershootSpec {
    /// Peak height above the new level, watts.
    pub height: [f64; 2],
    /// Samples the decay lasts, at most 5.
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Usage {
    /// Runs its mode machine around the clock.
    Continuous { off_dwell: [f64; 2] },
    /// Whole runs from OFF back to OFF, started inside a daily window.
    Scheduled {
        day_probability: f64,
        runs_per_day: [u32; 2],
        window_hours: [f64; 2],
        /// Fixed mode sequence of every run, OFF at both ends.
        #[serde(default)]
        program: Option<Vec<usize>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApplianceSpec {
    pub name: String,
    pub off_level: f64,
    pub modes: Vec<ModeSpec>,
    pub transitions: Vec<Edge>,
    pub usage: Usage,
    /// Spike probability per sample.
    #[serde(default)]
    pub spike_rate: f64,
    #[serde(default)]
    pub spike_height: [f64; 2],
    #[serde(default)]
    pub overshoot: Option<OvershootSpec>,
    /// Per-sample noise bound as a fraction of the level.
    #[serde(default)]
    pub noise: f64,
    /// Every run visits every non-OFF mode.
    #[serde(default)]
    pub all_or_none: bool,
}

impl ApplianceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(format!("{}: {msg}", self.name)));
        if !(0.0..=5.0).contains(&self.off_level) {
            return bad(format!("OFF level {} outside [0, 5] W", self.off_level));
        }
        if self.modes.is_empty() {
            return bad("no operating modes".into());
        }
        for (i, m) in self.modes.iter().enumerate() {
            if !(m.level[0] > self.off_level && m.level[0] <= m.level[1]) {
                return bad(format!("mode {} level range {:?} invalid", i + 1, m.level));
            }
            if !(m.dwell[0] > 0.0 && m.dwell[0] <= m.dwell[1]) {
                return bad(format!("mode {} dwell range {:?} must be positive", i + 1, m.dwell));
            }
        }
        let n = self.modes.len() + 1;
        for e in &self.transitions {
            if e.from >= n || e.to >= n || e.from == e.to || !(e.weight > 0.0) {
                return bad(format!("bad transition {}->{} (weight {})", e.from, e.to, e.weight));
            }
        }
        if !self.transitions.iter().any(|e| e.from == 0) || !self.transitions.iter().any(|e| e.to == 0) {
            return bad("transition graph must leave and re-enter OFF".into());
        }
        if !(0.0..0.5).contains(&self.noise) || !(0.0..=1.0).contains(&self.spike_rate) {
            return bad("noise must be in [0, 0.5) and spike rate in [0, 1]".into());
        }
        if self.spike_rate > 0.0 && !(self.spike_height[0] > 0.0 && self.spike_height[0] <= self.spike_height[1]) {
            return bad(format!("spike heights {:?} invalid", self.spike_height));
        }
        if let Some(o) = &self.overshoot {
            if !(1..=5).contains(&o.length) || !(o.height[0] > 0.0 && o.height[0] <= o.height[1]) {
                return bad("overshoot needs 1..=5 samples and a positive height range".into());
            }
        }
        match &self.usage {
            Usage::Continuous { off_dwell } => {
                if !(off_dwell[0] > 0.0 && off_dwell[0] <= off_dwell[1]) {
                    return bad("OFF dwell must be positive".into());
                }
            }
            Usage::Scheduled { day_probability, runs_per_day, window_hours, program } => {
                if !(0.0..=1.0).contains(day_probability) || runs_per_day[0] > runs_per_day[1] {
                    return bad("day probability or runs per day invalid".into());
                }
                if !(0.0 <= window_hours[0] && window_hours[0] < window_hours[1] && window_hours[1] <= 24.0) {
                    return bad(format!("window {:?} invalid", window_hours));
                }
                if let Some(p) = program {
                    if p.len() < 3 || p[0] != 0 || p[p.len() - 1] != 0 || p[1..p.len() - 1].contains(&0) {
                        return bad("program must run OFF, modes..., OFF".into());
                    }
                    if let Some(w) = p.windows(2).find(|w| !self.has_edge(w[0], w[1])) {
                        return bad(format!("program step {}->{} is not in the graph", w[0], w[1]));
                    }
                    if self.all_or_none && (1..n).any(|m| !p.contains(&m)) {
                        return bad("all-or-none program must visit every mode".into());
                    }
                }
            }
        }
        Ok(())
    }

    fn has_edge(&self, from: usize, to: usize) -> bool {
        self.transitions.iter().any(|e| e.from == from && e.to == to)
    }

    fn next_mode(&self, from: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
        let out: Vec<&Edge> = self.transitions.iter().filter(|e| e.from == from).collect();
        let total: f64 = out.iter().map(|e| e.weight).sum();
        let mut x = rng.random::<f64>() * total;
        for e in &out {
            if x < e.weight {
                return Some(e.to);
            }
            x -= e.weight;
        }
        out.last().map(|e| e.to)
    }

    /// Level of one visit: normal around the range's middle, ±3σ spanning
    /// the range, redrawn until inside it.
    fn visit_level(&self, mode: usize, rng: &mut ChaCha8Rng) -> f64 {
        if mode == 0 {
            return self.off_level;
        }
        let [lo, hi] = self.modes[mode - 1].level;
        if hi == lo {
            return lo;
        }
        let dist = Normal::new((lo + hi) / 2.0, (hi - lo) / 6.0).expect("positive sd");
        (0..64).map(|_| dist.sample(rng)).find(|v| (lo..=hi).contains(v)).unwrap_or((lo + hi) / 2.0)
    }

    /// Non-OFF modes of one run, in order.
    fn run_modes(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        if let Usage::Scheduled { program: Some(p), .. } = &self.usage {
            return p[1..p.len() - 1].to_vec();
        }
        let all: BTreeSet<usize> = (1..=self.modes.len()).collect();
        let mut best = Vec::new();
        for _ in 0..100 {
            let mut seq = Vec::new();
            let mut m = 0;
            for _ in 0..64 {
                match self.next_mode(m, rng) {
                    Some(0) | None => break,
                    Some(next) => {
                        seq.push(next);
                        m = next;
                    }
                }
            }
            let closes = self.has_edge(m, 0);
            let covers = seq.iter().copied().collect::<BTreeSet<_>>() == all;
            if closes && (!self.all_or_none || covers) {
                return seq;
            }
            if closes && best.is_empty() {
                best = seq;
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub days: usize,
    /// Seconds between samples.
    pub period: f64,
    pub seed: u64,
    pub start_time: f64,
    /// Bound of the slow multiplicative jitter shared by all appliances.
    pub jitter: f64,
    /// Smallest transition size relative to the aggregate load it lands on.
    pub min_relative_step: f64,
    /// Minimum spacing between any two transitions, samples.
    pub guard: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            days: 28,
            period: DEFAULT_PERIOD,
            seed: 0,
            start_time: DEFAULT_START_TIME,
            jitter: 0.015,
            min_relative_step: 0.08,
            guard: 10,
        }
    }
}

/// A generated mode switch; the level changes between `index` and
/// `index + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthEvent {
    pub index: usize,
    pub appliance: String,
    /// Mode numbers as in the appliance spec (0 = OFF).
    pub from: ModeId,
    pub to: ModeId,
    /// Nominal levels on either side, before noise and jitter.
    pub pre_level: f64,
    pub post_level: f64,
}

#[derive(Clone, Debug)]
pub struct Household<F: Scalar = f64> {
    pub appliances: Vec<PowerSignal<F>>,
    pub aggregate: PowerSignal<F>,
    pub truth: Vec<TruthEvent>,
}

/// Committed nominal load and transition positions.
struct Placement {
    load: Vec<f64>,
    marks: BTreeMap<usize, f64>,
    guard: usize,
    min_rel: f64,
}

impl Placement {
    fn clear_of_marks(&self, s: usize) -> bool {
        self.marks.range(s.saturating_sub(self.guard)..=s + self.guard).next().is_none()
    }

    /// A switch from `before` to `after` (this appliance's own levels) at `s`.
    fn transition_ok(&self, s: usize, before: f64, after: f64) -> bool {
        if s < self.guard || s + 1 + self.guard >= self.load.len() || !self.clear_of_marks(s) {
            return false;
        }
        let total = (self.load[s] + before).max(self.load[s + 1] + after);
        (after - before).abs() >= self.min_rel * total
    }

    /// First committed transition in `from..to` that `extra` watts of load
    /// would make too small to observe.
    fn first_masked(&self, from: usize, to: usize, extra: f64) -> Option<usize> {
        if from >= to {
            return None;
        }
        self.marks
            .range(from..to)
            .find(|&(&s, &delta)| {
                let base = self.load[s].max(self.load[(s + 1).min(self.load.len() - 1)]);
                delta < self.min_rel * (base + extra)
            })
            .map(|(&s, _)| s)
    }

    /// Records switches (sample, level after) of one appliance in `own`; the
    /// last level holds up to `until`. The load picks the appliance up once
    /// it is fully placed.
    fn commit(&mut self, own: &mut [f64], switches: &[(usize, f64)], until: usize) {
        let mut level = own[switches[0].0];
        for (k, &(s, after)) in switches.iter().enumerate() {
            self.marks.insert(s, (after - level).abs());
            let end = switches.get(k + 1).map_or(until, |n| n.0 + 1);
            own[s + 1..end].iter_mut().for_each(|v| *v = after);
            level = after;
        }
    }
}

struct Realized {
    nominal: Vec<f64>,
    /// (sample, from mode, to mode)
    switches: Vec<(usize, usize, usize)>,
}

fn dwell_samples(range: [f64; 2], period: f64, guard: usize, rng: &mut ChaCha8Rng) -> usize {
    let secs = rng.random_range(range[0]..=range[1]);
    ((secs / period).round() as usize).max(guard + 1)
}

fn place_scheduled(
    spec: &ApplianceSpec,
    cfg: &SynthConfig,
    placement: &mut Placement,
    rng: &mut ChaCha8Rng,
) -> Realized {
    let n = placement.load.len();
    let per_day = (SECONDS_PER_DAY / cfg.period).round() as usize;
    let mut own = vec![spec.off_level; n];
    let mut switches = Vec::new();
    let Usage::Scheduled { day_probability, runs_per_day, window_hours, .. } = &spec.usage else {
        unreachable!("scheduled usage")
    };
    for day in 0..cfg.days {
        if rng.random::<f64>() >= *day_probability {
            continue;
        }
        let runs = rng.random_range(runs_per_day[0]..=runs_per_day[1]);
        let day_start = day * per_day;
        let day_end = ((day + 1) * per_day).min(n);
        for _ in 0..runs {
            for _attempt in 0..200 {
                let modes = spec.run_modes(rng);
                if modes.is_empty() {
                    break;
                }
                let hour = rng.random_range(window_hours[0]..window_hours[1]);
                let mut s = day_start + (hour * 3600.0 / cfg.period) as usize;
                let mut plan = Vec::with_capacity(modes.len() + 1);
                let mut path = vec![0];
                for &m in &modes {
                    plan.push((s, spec.visit_level(m, rng)));
                    path.push(m);
                    s += dwell_samples(spec.modes[m - 1].dwell, cfg.period, cfg.guard, rng);
                }
                plan.push((s, spec.off_level));
                path.push(0);
                let end = s;
                if end + 1 + cfg.guard >= day_end {
                    continue;
                }
                let start = plan[0].0;
                if own[start.saturating_sub(cfg.guard)..=end + cfg.guard].iter().any(|&v| v != spec.off_level) {
                    continue;
                }
                let mut before = spec.off_level;
                let mut ok = true;
                for (k, &(t, after)) in plan.iter().enumerate() {
                    if !placement.transition_ok(t, before, after) {
                        ok = false;
                        break;
                    }
                    if let Some(&(next, _)) = plan.get(k + 1) {
                        if placement.first_masked(t + 1, next, after).is_some() {
                            ok = false;
                            break;
                        }
                    }
                    before = after;
                }
                if !ok {
                    continue;
                }
                placement.commit(&mut own, &plan, end + 1);
                for (k, &(t, _)) in plan.iter().enumerate() {
                    switches.push((t, path[k], path[k + 1]));
                }
                break;
            }
        }
    }
    Realized { nominal: own, switches }
}

fn place_continuous(
    spec: &ApplianceSpec,
    cfg: &SynthConfig,
    placement: &mut Placement,
    rng: &mut ChaCha8Rng,
) -> Realized {
    let n = placement.load.len();
    let Usage::Continuous { off_dwell } = spec.usage else { unreachable!("continuous usage") };
    let mut own = vec![spec.off_level; n];
    let mut switches = Vec::new();
    let mut mode = 0usize;
    let mut level = spec.off_level;
    let mut prev = 0usize;
    let first_off = dwell_samples(off_dwell, cfg.period, cfg.guard, rng);
    let mut dwell = rng.random_range(cfg.guard + 1..=first_off);
    while let Some(next) = spec.next_mode(mode, rng) {
        let next_level = spec.visit_level(next, rng);
        // The current level may not run over a transition it would mask.
        if prev + dwell + cfg.guard + 2 > n {
            break;
        }
        let limit = placement
            .first_masked(prev + 1, n, level)
            .map_or(n, |s| s.saturating_sub(cfg.guard + 1));
        let target = (prev + dwell).min(limit);
        let earliest = if switches.is_empty() { 1 } else { prev + cfg.guard + 1 };
        let feasible = |s: usize| {
            placement.transition_ok(s, level, next_level)
                && placement
                    .first_masked(s + 1, (s + 1 + cfg.guard).min(n), next_level)
                    .is_none()
        };
        let chosen = (earliest..=target)
            .rev()
            .find(|&s| feasible(s))
            .or_else(|| (target + 1..n).find(|&s| feasible(s)));
        let Some(s) = chosen else { break };
        placement.commit(&mut own, &[(s, next_level)], n);
        switches.push((s, mode, next));
        prev = s;
        mode = next;
        level = next_level;
        dwell = if mode == 0 {
            dwell_samples(off_dwell, cfg.period, cfg.guard, rng)
        } else {
            dwell_samples(spec.modes[mode - 1].dwell, cfg.period, cfg.guard, rng)
        };
    }
    Realized { nominal: own, switches }
}

/// Clipped Gaussian: σ = bound / 3, truncated at ±bound.
fn clipped_noise(bound: f64, rng: &mut ChaCha8Rng) -> f64 {
    if bound == 0.0 {
        return 0.0;
    }
    let z: f64 = rng.sample(rand_distr::StandardNormal);
    (z * bound / 3.0).clamp(-bound, bound)
}

/// Simulates `cfg.days` days of the given appliances.
pub fn generate<F: Scalar>(specs: &[ApplianceSpec], cfg: &SynthConfig) -> Result<Household<F>> {
    if cfg.days == 0 {
        return Err(Error::InvalidSpec("need at least one day".into()));
    }
    if !(cfg.period > 0.0) || !(0.0..0.5).contains(&cfg.jitter) {
        return Err(Error::InvalidSpec("period must be positive and jitter in [0, 0.5)".into()));
    }
    if specs.is_empty() {
        return Err(Error::InvalidSpec("no appliances".into()));
    }
    for s in specs {
        s.validate()?;
    }
    let names: BTreeSet<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    if names.len() != specs.len() {
        return Err(Error::InvalidSpec("appliance names must be unique".into()));
    }

    let n = (cfg.days as f64 * SECONDS_PER_DAY / cfg.period).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut placement = Placement { load: vec![0.0; n], marks: BTreeMap::new(), guard: cfg.guard, min_rel: cfg.min_relative_step };
    let mut realized: Vec<Option<Realized>> = (0..specs.len()).map(|_| None).collect();
    let scheduled = specs.iter().enumerate().filter(|(_, s)| matches!(s.usage, Usage::Scheduled { .. }));
    let continuous = specs.iter().enumerate().filter(|(_, s)| matches!(s.usage, Usage::Continuous { .. }));
    for (i, spec) in scheduled.chain(continuous) {
        let r = match spec.usage {
            Usage::Scheduled { .. } => place_scheduled(spec, cfg, &mut placement, &mut rng),
            Usage::Continuous { .. } => place_continuous(spec, cfg, &mut placement, &mut rng),
        };
        placement.load.iter_mut().zip(&r.nominal).for_each(|(l, v)| *l += v);
        realized[i] = Some(r);
    }
    let realized: Vec<Realized> = realized.into_iter().map(|r| r.expect("every appliance placed")).collect();

    // Slow common jitter: bounded AR(1).
    let mut jitter = vec![0.0; n];
    if cfg.jitter > 0.0 {
        let step = Normal::new(0.0, cfg.jitter * 0.01).expect("positive sd");
        let mut j = 0.0;
        for v in jitter.iter_mut() {
            j = (0.9995 * j + step.sample(&mut rng)).clamp(-cfg.jitter, cfg.jitter);
            *v = j;
        }
    }

    let mut spiked: BTreeSet<usize> = BTreeSet::new();
    let mut signals = Vec::with_capacity(specs.len());
    let mut truth = Vec::new();
    for (spec, r) in specs.iter().zip(&realized) {
        let mut values: Vec<f64> = r
            .nominal
            .iter()
            .zip(&jitter)
            .map(|(&v, &j)| v * (1.0 + j) * (1.0 + clipped_noise(spec.noise, &mut rng)))
            .collect();
        for &(s, from, to) in &r.switches {
            truth.push(TruthEvent {
                index: s,
                appliance: spec.name.clone(),
                from: from as ModeId,
                to: to as ModeId,
                pre_level: r.nominal[s],
                post_level: r.nominal[s + 1],
            });
            if let Some(o) = &spec.overshoot {
                if r.nominal[s + 1] > r.nominal[s] {
                    let mut h = rng.random_range(o.height[0]..=o.height[1]);
                    for k in 0..o.length.min(n - s - 1) {
                        values[s + 1 + k] += h;
                        h *= OVERSHOOT_DECAY;
                    }
                }
            }
        }
        if spec.spike_rate > 0.0 {
            for s in 1..n - 1 {
                if rng.random::<f64>() >= spec.spike_rate {
                    continue;
                }
                let h = rng.random_range(spec.spike_height[0]..=spec.spike_height[1]);
                let near_spike = spiked.range(s.saturating_sub(cfg.guard)..=s + cfg.guard).next().is_some();
                if near_spike || !placement.clear_of_marks(s) || h < SPIKE_MIN_RELATIVE * placement.load[s] {
                    continue;
                }
                spiked.insert(s);
                values[s] += h;
            }
        }
        let values: Vec<F> = values.into_iter().map(|v| F::of(v.max(0.0))).collect();
        signals.push(PowerSignal::new(values, cfg.start_time, cfg.period, spec.name.clone())?);
    }
    truth.sort_by(|a, b| (a.index, &a.appliance).cmp(&(b.index, &b.appliance)));
    let aggregate = aggregate(&signals)?;
    Ok(Household { appliances: signals, aggregate, truth })
}

fn mode(level: [f64; 2], dwell: [f64; 2]) -> ModeSpec {
    ModeSpec { level, dwell }
}

fn edges(list: &[(usize, usize, f64)]) -> Vec<Edge> {
    list.iter().map(|&(from, to, weight)| Edge { from, to, weight }).collect()
}

fn single_mode(name: &str, level: [f64; 2], dwell: [f64; 2], p: f64, runs: [u32; 2], window: [f64; 2]) -> ApplianceSpec {
    ApplianceSpec {
        name: name.into(),
        off_level: 1.0,
        modes: vec![mode(level, dwell)],
        transitions: edges(&[(0, 1, 1.0), (1, 0, 1.0)]),
        usage: Usage::Scheduled { day_probability: p, runs_per_day: runs, window_hours: window, program: None },
        spike_rate: 1.0 / 20_000.0,
        spike_height: [150.0, 400.0],
        overshoot: None,
        noise: 0.01,
        all_or_none: false,
    }
}

/// Seven-appliance household with the state levels of a measured house:
/// dishwasher, refrigerator, microwave, bathroom outlet, kitchen outlet,
/// washer/dryer and oven.
pub fn reference_household() -> Vec<ApplianceSpec> {
    let dishwasher = ApplianceSpec {
        name: "dishwasher".into(),
        off_level: 0.0,
        modes: vec![
            mode([157.0, 183.0], [600.0, 1200.0]),
            mode([198.0, 261.0], [300.0, 900.0]),
            mode([398.0, 496.0], [300.0, 900.0]),
            mode([643.0, 737.0], [300.0, 600.0]),
            mode([1078.0, 1247.0], [600.0, 1200.0]),
        ],
        transitions: edges(&[(0, 4, 1.0), (4, 5, 1.0), (5, 2, 1.0), (2, 5, 1.0), (2, 3, 1.0), (3, 1, 1.0), (1, 0, 1.0)]),
        usage: Usage::Scheduled {
            day_probability: 0.5,
            runs_per_day: [1, 1],
            window_hours: [19.0, 21.0],
            program: Some(vec![0, 4, 5, 2, 5, 2, 3, 1, 0]),
        },
        spike_rate: 0.0,
        spike_height: [0.0, 0.0],
        overshoot: None,
        noise: 0.01,
        all_or_none: true,
    };
    let refrigerator = ApplianceSpec {
        name: "refrigerator".into(),
        off_level: 2.0,
        modes: vec![
            mode([153.0, 183.0], [600.0, 1200.0]),
            mode([185.0, 260.0], [900.0, 1800.0]),
            mode([415.0, 425.0], [300.0, 600.0]),
        ],
        transitions: edges(&[(0, 2, 0.85), (0, 1, 0.15), (2, 0, 0.9), (2, 3, 0.1), (3, 2, 1.0), (1, 0, 1.0)]),
        usage: Usage::Continuous { off_dwell: [1200.0, 2400.0] },
        spike_rate: 1.0 / 5_000.0,
        spike_height: [100.0, 300.0],
        overshoot: Some(OvershootSpec { height: [500.0, 700.0], length: 4 }),
        noise: 0.01,
        all_or_none: false,
    };
    vec![
        dishwasher,
        refrigerator,
        single_mode("microwave", [1439.0, 1598.0], [60.0, 300.0], 0.8, [1, 3], [11.0, 15.0]),
        single_mode("bathroom_gfi", [1580.0, 1620.0], [120.0, 600.0], 0.6, [1, 2], [6.0, 10.0]),
        single_mode("kitchen_outlets", [1064.0, 1087.0], [60.0, 300.0], 0.9, [1, 3], [6.0, 10.0]),
        single_mode("washer_dryer", [2641.0, 3000.0], [1200.0, 3600.0], 0.3, [1, 1], [13.0, 16.0]),
        single_mode("oven", [4138.0, 4157.0], [900.0, 2700.0], 0.3, [1, 1], [16.0, 18.5]),
    ]
}
