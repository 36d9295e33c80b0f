//! `nilm`: batch driver for filtering, training, disaggregation, scoring,
//! synthetic data and plot-data export. Reads and writes files only.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use nilm_core::evaluation::{evaluate, EvaluationReport, ScoreFormula};
use nilm_core::features::ParticipationDays;
use nilm_core::filtering::filter_and_detect;
use nilm_core::io::{self, Dataset, DatasetManifest, ModelFile};
use nilm_core::modes::extract_states;
use nilm_core::pipeline::{self, RunConfig};
use nilm_core::signal::{align_raw, DEFAULT_MAX_GAP};
use nilm_core::synth::{self, ApplianceSpec, SynthConfig};
use nilm_core::{Error, Signal};

#[derive(Parser)]
#[command(name = "nilm", version, about = "Event-based load disaggregation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Remove spikes and overshoots from one channel.
    Filter(ChannelArgs),
    /// List the events of one channel.
    DetectEvents(ChannelArgs),
    /// Cluster one channel's filtered samples into operation-mode states.
    ExtractModes(ModesArgs),
    /// Learn appliance models from the manifest's training days.
    Train(TrainArgs),
    /// Label every event of the test-day aggregate.
    Disaggregate(DisaggregateArgs),
    /// Score a report against per-appliance ground truth.
    Evaluate(EvaluateArgs),
    /// Write a synthetic household in the channel layout.
    Synth(SynthArgs),
    /// Export raw/filtered, event and cycle tables of the test aggregate.
    PlotData(PlotArgs),
}

#[derive(Args)]
struct ChannelArgs {
    /// Two-column `timestamp watts` file.
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Resampling period in seconds.
    #[arg(long, default_value_t = 3.0)]
    period: f64,
}

#[derive(Args)]
struct ModesArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 3.0)]
    period: f64,
    #[command(flatten)]
    config: ConfigArgs,
}

/// Run configuration: an optional file, then per-key flags on top.
#[derive(Args, Default)]
struct ConfigArgs {
    /// Flat `key = value` file with RunConfig keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k_clusters: Option<usize>,
    #[arg(long)]
    merge_ratio: Option<f64>,
    #[arg(long)]
    off_threshold: Option<f64>,
    #[arg(long)]
    all_off_margin: Option<f64>,
    #[arg(long)]
    overshoot_floor: Option<f64>,
    #[arg(long)]
    search_budget: Option<usize>,
    #[arg(long)]
    match_tolerance: Option<usize>,
    /// `occurring` or `all`.
    #[arg(long, value_parser = parse_days_variant)]
    n_days_variant: Option<ParticipationDays>,
    /// `standard` or `literal`.
    #[arg(long, value_parser = parse_formula)]
    score_formula: Option<ScoreFormula>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_days_variant(s: &str) -> std::result::Result<ParticipationDays, String> {
    match s {
        "occurring" => Ok(ParticipationDays::Occurring),
        "all" => Ok(ParticipationDays::All),
        _ => Err("expected `occurring` or `all`".into()),
    }
}

fn parse_formula(s: &str) -> std::result::Result<ScoreFormula, String> {
    match s {
        "standard" => Ok(ScoreFormula::Standard),
        "literal" => Ok(ScoreFormula::Literal),
        _ => Err("expected `standard` or `literal`".into()),
    }
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => io::load_config(p)?,
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { c.$field = v; })* };
        }
        apply!(k_clusters, merge_ratio, off_threshold, all_off_margin, overshoot_floor, search_budget, match_tolerance, n_days_variant, score_formula, seed);
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Model file to write.
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct DisaggregateArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    models: PathBuf,
    /// Event report to write.
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    models: PathBuf,
    #[arg(long)]
    report: PathBuf,
    /// Generator truth (`truth.tsv` of a synthetic household) instead of
    /// per-channel event detection.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Also write the metrics table here.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 28)]
    days: usize,
    #[arg(long, default_value_t = 21)]
    train_days: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 3.0)]
    period: f64,
    /// JSON list of appliance specs; the reference household when absent.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Enables the cycle table.
    #[arg(long)]
    models: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

fn read_signal(path: &Path, period: f64) -> Result<Signal> {
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("channel");
    let raw = io::read_channel(path, id)?;
    let (mut aligned, _) = align_raw(&[raw], period, DEFAULT_MAX_GAP)?;
    Ok(aligned.remove(0))
}

fn load(manifest: &Path) -> Result<Dataset> {
    let m = DatasetManifest::load(manifest)?;
    Ok(io::load_dataset(&m)?)
}

fn load_models(path: &Path) -> Result<ModelFile> {
    ModelFile::load(path).with_context(|| format!("reading models from {}", path.display()))
}

fn metrics_table(report: &EvaluationReport) -> String {
    let rows = report
        .appliances
        .iter()
        .map(|s| {
            vec![
                s.appliance.clone(),
                s.counts.tp.to_string(),
                s.counts.fp.to_string(),
                s.counts.fn_.to_string(),
                s.counts.tn.to_string(),
                format!("{:.4}", s.f_measure),
            ]
        })
        .chain(std::iter::once(vec![
            "average".into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            format!("{:.4}", report.average),
        ]));
    io::format_table(&["appliance", "tp", "fp", "fn", "tn", "f_measure"], rows)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Filter(a) => {
            let s = read_signal(&a.input, a.period)?;
            let d = filter_and_detect(&s)?;
            io::write_channel(&a.output, &d.filtered)?;
            eprintln!("{} samples, {} outlier samples replaced", s.len(), d.outliers.sample_marks.len());
        }
        Command::DetectEvents(a) => {
            let s = read_signal(&a.input, a.period)?;
            let d = filter_and_detect(&s)?;
            io::write_atomic(&a.output, io::events_plot(&d.filtered, &d.events).as_bytes())?;
            eprintln!("{} events", d.events.len());
        }
        Command::ExtractModes(a) => {
            let c = a.config.resolve()?;
            let s = read_signal(&a.input, a.period)?;
            let d = filter_and_detect(&s)?;
            let states = extract_states(&d.filtered, c.k_clusters, c.merge_ratio, c.off_threshold)?;
            let mut json = serde_json::to_string_pretty(&states)?;
            json.push('\n');
            io::write_atomic(&a.output, json.as_bytes())?;
            for st in &states.states {
                println!("{}\t{:.1}\t{:.1}\t{:.1}", st.mode, st.interval.lo, st.interval.hi, st.centroid);
            }
        }
        Command::Train(a) => {
            let c = a.config.resolve()?;
            let d = load(&a.manifest)?;
            let models = pipeline::train(&d.appliances, &d.aggregate, &d.train_days, &c)?;
            for m in &models {
                eprintln!("{}: {} states, {} transitions{}", m.appliance, m.states.len(), m.transitions.len(), if m.inactive { " (inactive)" } else { "" });
            }
            ModelFile::new(c, models).save(&a.output)?;
        }
        Command::Disaggregate(a) => {
            let c = a.config.resolve()?;
            let d = load(&a.manifest)?;
            let file = load_models(&a.models)?;
            let r = pipeline::disaggregate(&d.aggregate, &file.models, &d.test_days, &c)?;
            io::write_report(&a.output, &r.labels)?;
            eprintln!("{} events in {} cycles, {} cycles left unrefined", r.labels.len(), r.cycles.len(), r.diagnostics.len());
        }
        Command::Evaluate(a) => {
            let c = a.config.resolve()?;
            let d = load(&a.manifest)?;
            let file = load_models(&a.models)?;
            let rows = io::read_report(&a.report)?;
            let predicted = io::report_labels(&rows, &file.models)?;
            let truth = match &a.truth {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    let events = io::parse_truth(&text, p)?;
                    pipeline::synthetic_truth(&events, &file.models, &d.aggregate, &d.test_days)
                }
                None => pipeline::ground_truth(&d.appliances, &file.models, &d.test_days)?,
            };
            let report = evaluate(&predicted, &truth, c.match_tolerance, c.score_formula);
            let table = metrics_table(&report);
            print!("{table}");
            if let Some(out) = &a.output {
                io::write_atomic(out, table.as_bytes())?;
            }
        }
        Command::Synth(a) => {
            let specs: Vec<ApplianceSpec> = match &a.spec {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str(&text).map_err(Error::from)?
                }
                None => synth::reference_household(),
            };
            let cfg = SynthConfig { days: a.days, seed: a.seed, period: a.period, ..SynthConfig::default() };
            let h: nilm_core::synth::Household = synth::generate(&specs, &cfg)?;
            io::write_household(&a.output, &h, a.train_days)?;
            eprintln!("{} appliances, {} samples, {} transitions", h.appliances.len(), h.aggregate.len(), h.truth.len());
        }
        Command::PlotData(a) => {
            let c = a.config.resolve()?;
            let d = load(&a.manifest)?;
            let models = a.models.as_deref().map(load_models).transpose()?;
            let mut raw = String::new();
            let mut events = String::new();
            for piece in d.aggregate.segments_for_days(&d.test_days) {
                if piece.len() < 2 {
                    continue;
                }
                let det = filter_and_detect(&piece)?;
                let r = io::filtered_plot(&piece, &det.filtered)?;
                let e = io::events_plot(&det.filtered, &det.events);
                // Keep one header per table.
                let skip = |t: &str, first: bool| if first { t.to_string() } else { t.split_once('\n').map_or(String::new(), |x| x.1.to_string()) };
                raw.push_str(&skip(&r, raw.is_empty()));
                events.push_str(&skip(&e, events.is_empty()));
            }
            io::write_atomic(&a.output.join("raw_filtered.tsv"), raw.as_bytes())?;
            io::write_atomic(&a.output.join("events.tsv"), events.as_bytes())?;
            if let Some(file) = models {
                let r = pipeline::disaggregate(&d.aggregate, &file.models, &d.test_days, &c)?;
                io::write_atomic(&a.output.join("cycles.tsv"), io::cycles_plot(&d.aggregate, &r).as_bytes())?;
                io::write_report(&a.output.join("labels.tsv"), &r.labels)?;
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_data_error() => 2,
        Some(_) => 3,
        None if err.downcast_ref::<serde_json::Error>().is_some() => 2,
        None if err.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::NotFound) => 2,
        None => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
