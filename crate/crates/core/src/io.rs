//! File formats: logger channels in the two-column plain-text layout, label
//! files, dataset manifests, run configuration, model files, event reports
//! and tab-separated plot data. Every write goes to a temporary file in the
//! target directory and is renamed into place.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::{Label, Stage};
use crate::error::{Error, Result};
use crate::features::{ApplianceModel, ModePair, Transition};
use crate::modes::ModeId;
use crate::pipeline::{split_days, Disaggregation, RunConfig};
use crate::scalar::Scalar;
use crate::signal::{aggregate, align_raw, EventRecord, GapReport, PowerSignal, RawSeries, DEFAULT_MAX_GAP};
use crate::synth::{Household, TruthEvent};

pub const MODEL_SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const REPORT_MAGIC: &str = "# nilm-report";
pub const DEFAULT_TRAIN_DAYS: usize = 21;
pub const DEFAULT_TEST_DAYS: usize = 7;

const REPORT_COLUMNS: &str = "timestamp\tindex\tmagnitude\tappliance\tfrom_mode\tto_mode\tstage";

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message: message.into() }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::Manifest(format!("{} does not exist", path.display()))
        } else {
            Error::Io(e)
        }
    })
}

/// Parses a channel file of `unix_timestamp watts` lines. Blank lines are
/// skipped; timestamps must increase strictly.
pub fn parse_channel<F: Scalar>(text: &str, path: &Path, source_id: &str) -> Result<RawSeries<F>> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut fields = line.split_whitespace();
        let Some(ts) = fields.next() else { continue };
        let (Some(w), None) = (fields.next(), fields.next()) else {
            return Err(parse_error(path, line_no, "expected two fields: timestamp and watts"));
        };
        let t: f64 = ts.parse().map_err(|_| parse_error(path, line_no, format!("bad timestamp {ts:?}")))?;
        let v: f64 = w.parse().map_err(|_| parse_error(path, line_no, format!("bad power value {w:?}")))?;
        if !t.is_finite() || !v.is_finite() || v < 0.0 {
            return Err(parse_error(path, line_no, "values must be finite and power non-negative"));
        }
        if times.last().is_some_and(|&prev| t <= prev) {
            return Err(parse_error(path, line_no, "timestamps must increase strictly"));
        }
        times.push(t);
        values.push(F::of(v));
    }
    if times.is_empty() {
        return Err(parse_error(path, 1, "channel file is empty"));
    }
    RawSeries::new(source_id, times, values)
}

pub fn read_channel<F: Scalar>(path: &Path, source_id: &str) -> Result<RawSeries<F>> {
    parse_channel(&read_text(path)?, path, source_id)
}

/// One `timestamp watts` line per sample, at full precision.
pub fn format_channel<F: Scalar>(signal: &PowerSignal<F>) -> String {
    let mut out = String::with_capacity(signal.len() * 24);
    for (i, v) in signal.values().iter().enumerate() {
        let _ = writeln!(out, "{} {}", signal.time_at(i), v);
    }
    out
}

pub fn write_channel<F: Scalar>(path: &Path, signal: &PowerSignal<F>) -> Result<()> {
    write_atomic(path, format_channel(signal).as_bytes())
}

/// Parses `channel_number name` lines.
pub fn parse_labels(text: &str, path: &Path) -> Result<BTreeMap<u32, String>> {
    let mut labels = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let Some(ch) = fields.next() else { continue };
        let (Some(name), None) = (fields.next(), fields.next()) else {
            return Err(parse_error(path, i + 1, "expected two fields: channel and name"));
        };
        let ch: u32 = ch.parse().map_err(|_| parse_error(path, i + 1, format!("bad channel number {ch:?}")))?;
        if labels.insert(ch, name.to_string()).is_some() {
            return Err(parse_error(path, i + 1, format!("channel {ch} listed twice")));
        }
    }
    Ok(labels)
}

pub fn read_labels(path: &Path) -> Result<BTreeMap<u32, String>> {
    parse_labels(&read_text(path)?, path)
}

/// Channel files, labels and day split of one house.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    /// Directory holding `channel_<n>.dat` and the labels file. Relative
    /// paths resolve against the manifest's own directory.
    pub root: PathBuf,
    #[serde(default = "default_labels_file")]
    pub labels: PathBuf,
    /// Channels to use; all non-mains channels when absent. Channels sharing
    /// a label are summed into one appliance.
    #[serde(default)]
    pub channels: Option<Vec<u32>>,
    pub sample_period: f64,
    #[serde(default = "default_max_gap")]
    pub max_gap: f64,
    /// Days since the Unix epoch (UTC). When both are absent the first 21
    /// complete days train and the next 7 test.
    #[serde(default)]
    pub train_days: Option<Vec<i64>>,
    #[serde(default)]
    pub test_days: Option<Vec<i64>>,
}

fn default_labels_file() -> PathBuf {
    PathBuf::from("labels.dat")
}

fn default_max_gap() -> f64 {
    DEFAULT_MAX_GAP
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let mut m: DatasetManifest = toml::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        if m.root.is_relative() {
            m.root = path.parent().unwrap_or(Path::new(".")).join(&m.root);
        }
        m.validate_split()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self).map_err(|e| Error::Manifest(e.to_string()))?;
        write_atomic(path, text.as_bytes())
    }

    pub fn channel_path(&self, channel: u32) -> PathBuf {
        self.root.join(format!("channel_{channel}.dat"))
    }

    fn validate_split(&self) -> Result<()> {
        if !(self.sample_period > 0.0) {
            return Err(Error::Manifest(format!("sample_period must be positive, got {}", self.sample_period)));
        }
        match (&self.train_days, &self.test_days) {
            (Some(train), Some(test)) => {
                let train: BTreeSet<_> = train.iter().collect();
                if let Some(d) = test.iter().find(|d| train.contains(d)) {
                    return Err(Error::Manifest(format!("day {d} is in both the train and the test split")));
                }
                Ok(())
            }
            (None, None) => Ok(()),
            _ => Err(Error::Manifest("train_days and test_days must be given together".into())),
        }
    }

    /// Appliance names with their channels, in channel order of first use.
    pub fn appliances(&self, labels: &BTreeMap<u32, String>) -> Result<Vec<(String, Vec<u32>)>> {
        let channels: Vec<u32> = match &self.channels {
            Some(c) => c.clone(),
            None => labels.iter().filter(|(_, n)| n.as_str() != "mains").map(|(&c, _)| c).collect(),
        };
        if channels.is_empty() {
            return Err(Error::Manifest("no appliance channels selected".into()));
        }
        let mut out: Vec<(String, Vec<u32>)> = Vec::new();
        for ch in channels {
            let name = labels.get(&ch).ok_or_else(|| Error::Manifest(format!("channel {ch} has no label")))?;
            match out.iter_mut().find(|(n, _)| n == name) {
                Some((_, list)) if list.contains(&ch) => {
                    return Err(Error::Manifest(format!("channel {ch} selected twice")));
                }
                Some((_, list)) => list.push(ch),
                None => out.push((name.clone(), vec![ch])),
            }
        }
        Ok(out)
    }
}

/// Aligned appliance signals, their sum and the day split.
#[derive(Clone, Debug)]
pub struct Dataset<F: Scalar = f64> {
    pub appliances: Vec<PowerSignal<F>>,
    pub aggregate: PowerSignal<F>,
    pub gaps: GapReport,
    pub train_days: Vec<i64>,
    pub test_days: Vec<i64>,
}

pub fn load_dataset<F: Scalar>(manifest: &DatasetManifest) -> Result<Dataset<F>> {
    manifest.validate_split()?;
    let labels = read_labels(&manifest.root.join(&manifest.labels))?;
    let appliances = manifest.appliances(&labels)?;
    let mut raw = Vec::new();
    let mut owner = Vec::new();
    for (a, (name, channels)) in appliances.iter().enumerate() {
        for &ch in channels {
            let path = manifest.channel_path(ch);
            if !path.exists() {
                return Err(Error::Manifest(format!("channel file {} does not exist", path.display())));
            }
            raw.push(read_channel::<F>(&path, &format!("{name}#{ch}"))?);
            owner.push(a);
        }
    }
    let (aligned, gaps) = align_raw(&raw, manifest.sample_period, manifest.max_gap)?;
    let mut signals = Vec::with_capacity(appliances.len());
    for (a, (name, _)) in appliances.iter().enumerate() {
        let parts: Vec<PowerSignal<F>> = aligned.iter().zip(&owner).filter(|(_, &o)| o == a).map(|(s, _)| s.clone()).collect();
        let summed = aggregate(&parts)?;
        signals.push(PowerSignal::new(summed.values().to_vec(), summed.start_time(), summed.sample_period(), name.clone())?);
    }
    let total = aggregate(&signals)?;

    let (train_days, test_days) = match (&manifest.train_days, &manifest.test_days) {
        (Some(train), Some(test)) => (train.clone(), test.clone()),
        _ => default_split(&total),
    };
    let present: BTreeSet<i64> = total.days().into_iter().collect();
    if let Some(d) = train_days.iter().chain(&test_days).find(|d| !present.contains(d)) {
        return Err(Error::Manifest(format!("day {d} is outside the recorded span")));
    }
    Ok(Dataset { appliances: signals, aggregate: total, gaps, train_days, test_days })
}

/// First 21 complete days for training, the next 7 for testing. Partial first
/// and last days are only used when there are too few complete ones.
fn default_split<F: Scalar>(signal: &PowerSignal<F>) -> (Vec<i64>, Vec<i64>) {
    let all = signal.days();
    let per_day = (crate::signal::SECONDS_PER_DAY / signal.sample_period()).round() as usize;
    let complete: Vec<i64> = all
        .iter()
        .copied()
        .filter(|&d| signal.segments_for_days(&[d]).iter().map(PowerSignal::len).sum::<usize>() >= per_day)
        .collect();
    let days = if complete.len() >= 2 { complete } else { all };
    let days: Vec<i64> = days.into_iter().take(DEFAULT_TRAIN_DAYS + DEFAULT_TEST_DAYS).collect();
    let train = if days.len() >= DEFAULT_TRAIN_DAYS + DEFAULT_TEST_DAYS {
        DEFAULT_TRAIN_DAYS
    } else {
        (days.len() * DEFAULT_TRAIN_DAYS).div_ceil(DEFAULT_TRAIN_DAYS + DEFAULT_TEST_DAYS).min(days.len().saturating_sub(1)).max(1)
    };
    split_days(&days, train)
}

/// Flat key-value configuration; every key is a [`RunConfig`] field.
pub fn parse_config(text: &str, path: &Path) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&read_text(path)?, path)
}

pub fn format_config(config: &RunConfig) -> Result<String> {
    toml::to_string(config).map_err(|e| Error::Config(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct ModelFile<F: Scalar = f64> {
    pub schema_version: u32,
    pub config: RunConfig,
    pub models: Vec<ApplianceModel<F>>,
}

impl<F: Scalar> ModelFile<F> {
    pub fn new(config: RunConfig, models: Vec<ApplianceModel<F>>) -> Self {
        ModelFile { schema_version: MODEL_SCHEMA_VERSION, config, models }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            schema_version: u32,
        }
        let header: Header = serde_json::from_str(text)?;
        if header.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::Schema { what: "model file", found: header.schema_version, expected: MODEL_SCHEMA_VERSION });
        }
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_text(path)?)
    }
}

/// One row of an event report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub timestamp: f64,
    pub index: usize,
    pub magnitude: f64,
    pub appliance: String,
    pub from_mode: ModeId,
    pub to_mode: ModeId,
    pub stage: Stage,
}

impl<F: Scalar> From<&Label<F>> for ReportRow {
    fn from(l: &Label<F>) -> Self {
        ReportRow {
            timestamp: l.time,
            index: l.event.index,
            magnitude: l.event.magnitude.as_f64(),
            appliance: l.transition.appliance.clone(),
            from_mode: l.transition.from,
            to_mode: l.transition.to,
            stage: l.stage,
        }
    }
}

pub fn format_report(rows: &[ReportRow]) -> String {
    let mut out = format!("{REPORT_MAGIC} {REPORT_SCHEMA_VERSION}\n{REPORT_COLUMNS}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.timestamp,
            r.index,
            r.magnitude,
            r.appliance,
            r.from_mode,
            r.to_mode,
            r.stage.as_str()
        );
    }
    out
}

pub fn parse_report(text: &str, path: &Path) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines().enumerate();
    let version = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix(REPORT_MAGIC))
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or_else(|| parse_error(path, 1, format!("expected header \"{REPORT_MAGIC} <version>\"")))?;
    if version != REPORT_SCHEMA_VERSION {
        return Err(Error::Schema { what: "report", found: version, expected: REPORT_SCHEMA_VERSION });
    }
    match lines.next() {
        Some((_, l)) if l == REPORT_COLUMNS => {}
        _ => return Err(parse_error(path, 2, "missing column header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| parse_error(path, i + 1, format!("bad {what}"));
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(parse_error(path, i + 1, format!("expected 7 columns, got {}", f.len())));
        }
        rows.push(ReportRow {
            timestamp: f[0].parse().map_err(|_| bad("timestamp"))?,
            index: f[1].parse().map_err(|_| bad("index"))?,
            magnitude: f[2].parse().map_err(|_| bad("magnitude"))?,
            appliance: f[3].to_string(),
            from_mode: f[4].parse().map_err(|_| bad("from_mode"))?,
            to_mode: f[5].parse().map_err(|_| bad("to_mode"))?,
            stage: f[6].parse().map_err(|_| bad("stage"))?,
        });
    }
    Ok(rows)
}

pub fn write_report<F: Scalar>(path: &Path, labels: &[Label<F>]) -> Result<()> {
    let rows: Vec<ReportRow> = labels.iter().map(ReportRow::from).collect();
    write_atomic(path, format_report(&rows).as_bytes())
}

pub fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    parse_report(&read_text(path)?, path)
}

/// Report rows as labeled events, with transitions looked up in `models`.
pub fn report_labels<F: Scalar>(
    rows: &[ReportRow],
    models: &[ApplianceModel<F>],
) -> Result<Vec<(EventRecord<F>, Transition<F>)>> {
    rows.iter()
        .map(|r| {
            let model = models
                .iter()
                .find(|m| m.appliance == r.appliance)
                .ok_or_else(|| Error::DataConsistency(format!("report names unknown appliance {}", r.appliance)))?;
            let t = model.transition(ModePair::new(r.from_mode, r.to_mode)).ok_or_else(|| {
                Error::DataConsistency(format!("{} has no transition {}->{}", r.appliance, r.from_mode, r.to_mode))
            })?;
            Ok((EventRecord::new(r.index, F::zero(), F::of(r.magnitude)), t.clone()))
        })
        .collect()
}

/// Tab-separated table with a header row.
pub fn format_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join("\t"));
        out.push('\n');
    }
    out
}

/// `time index raw filtered` per sample.
pub fn filtered_plot<F: Scalar>(raw: &PowerSignal<F>, filtered: &PowerSignal<F>) -> Result<String> {
    if raw.len() != filtered.len() {
        return Err(Error::Misaligned(format!("raw has {} samples, filtered {}", raw.len(), filtered.len())));
    }
    let rows = raw
        .values()
        .iter()
        .zip(filtered.values())
        .enumerate()
        .map(|(i, (r, f))| vec![raw.time_at(i).to_string(), i.to_string(), r.to_string(), f.to_string()]);
    Ok(format_table(&["time", "index", "raw", "filtered"], rows))
}

/// One row per event.
pub fn events_plot<F: Scalar>(signal: &PowerSignal<F>, events: &[EventRecord<F>]) -> String {
    let rows = events.iter().map(|e| {
        vec![
            signal.time_at(e.index).to_string(),
            e.index.to_string(),
            e.magnitude.to_string(),
            e.pre_level.to_string(),
            e.post_level.to_string(),
        ]
    });
    format_table(&["time", "index", "magnitude", "pre_level", "post_level"], rows)
}

/// One row per cycle: sample span from the first event's last pre-event
/// sample to the last event's first post-event sample.
pub fn cycles_plot<F: Scalar>(signal: &PowerSignal<F>, result: &Disaggregation<F>) -> String {
    let rows = result.cycles.iter().map(|c| {
        let start = result.labels[c.start_event].event.index;
        let end = result.labels[c.end_event].event.index + 1;
        vec![
            signal.time_at(start).to_string(),
            signal.time_at(end).to_string(),
            start.to_string(),
            end.to_string(),
            c.len().to_string(),
            c.is_closed().to_string(),
        ]
    });
    format_table(&["start_time", "end_time", "start_index", "end_index", "events", "closed"], rows)
}

/// Writes a household in the channel layout: one file per appliance
/// (channels numbered from 1 in list order), a labels file, the generator's
/// truth and a manifest with a `train`/rest day split.
pub fn write_household<F: Scalar>(dir: &Path, household: &Household<F>, train: usize) -> Result<DatasetManifest> {
    let mut labels = String::new();
    for (i, s) in household.appliances.iter().enumerate() {
        let ch = i as u32 + 1;
        write_channel(&dir.join(format!("channel_{ch}.dat")), s)?;
        let _ = writeln!(labels, "{ch} {}", s.source_id());
    }
    write_atomic(&dir.join("labels.dat"), labels.as_bytes())?;
    write_atomic(&dir.join("truth.tsv"), format_truth(&household.truth).as_bytes())?;
    let (train_days, test_days) = split_days(&household.aggregate.days(), train);
    let manifest = DatasetManifest {
        root: PathBuf::from("."),
        labels: default_labels_file(),
        channels: None,
        sample_period: household.aggregate.sample_period(),
        max_gap: DEFAULT_MAX_GAP,
        train_days: Some(train_days),
        test_days: Some(test_days),
    };
    manifest.save(&dir.join("manifest.toml"))?;
    Ok(manifest)
}

pub fn format_truth(truth: &[TruthEvent]) -> String {
    let rows = truth.iter().map(|t| {
        vec![
            t.index.to_string(),
            t.appliance.clone(),
            t.from.to_string(),
            t.to.to_string(),
            t.pre_level.to_string(),
            t.post_level.to_string(),
        ]
    });
    format_table(&["index", "appliance", "from_mode", "to_mode", "pre_level", "post_level"], rows)
}

pub fn parse_truth(text: &str, path: &Path) -> Result<Vec<TruthEvent>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let bad = || parse_error(path, i + 1, "expected index, appliance, from, to, pre and post level");
        if f.len() != 6 {
            return Err(bad());
        }
        out.push(TruthEvent {
            index: f[0].parse().map_err(|_| bad())?,
            appliance: f[1].to_string(),
            from: f[2].parse().map_err(|_| bad())?,
            to: f[3].parse().map_err(|_| bad())?,
            pre_level: f[4].parse().map_err(|_| bad())?,
            post_level: f[5].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}
