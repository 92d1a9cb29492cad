use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use evdisagg_core::pipeline::{disaggregate_windows, stitch, BoundaryPolicy, WindowKind, WindowSpec};
use evdisagg_core::synth::{generate_mixed_month, generate_month, Preset, ScenarioSpec};
use evdisagg_core::{PipelineParams, Timestamp};

use crate::csvio::{read_series_file, write_series_file, ReadOptions};
use crate::error::{CliError, Result};
use crate::plot::{render_svg, Panel};
use crate::report::{disaggregation_report, evaluation_report, to_json};

#[derive(Debug, Parser)]
#[command(name = "evdisagg", version, about = "Disaggregate EV charging load from whole-house power traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the EV charging load of a trace.
    Disaggregate(DisaggregateArgs),
    /// Score an estimated EV series against ground truth, month by month.
    Evaluate(EvaluateArgs),
    /// Write a synthetic household trace and its per-appliance truth.
    Synth(SynthArgs),
    /// Draw traces as stacked SVG panels.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Window {
    Day,
    Month,
    Whole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Boundary {
    Midpoint,
    Clip,
}

#[derive(Debug, Args)]
pub struct DisaggregateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `key = value` file overriding pipeline defaults.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Window::Day)]
    pub window: Window,
    #[arg(long, value_enum, default_value_t = Boundary::Midpoint)]
    pub boundary: Boundary,
    /// Interpolate gaps of up to this many missing minutes.
    #[arg(long, default_value_t = 0)]
    pub gap_fill: usize,
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the estimated EV series as CSV.
    #[arg(long)]
    pub emit_series: Option<PathBuf>,
    /// EV ground truth; adds monthly errors to the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub estimate: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub gap_fill: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// clean-ev, spike-train, lump-overlap, dryer-overlap, fig2 or mixed.
    #[arg(long, default_value = "clean-ev")]
    pub preset: String,
    /// Scenario file; replaces the preset.
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub days: usize,
    /// First minute, e.g. 2013-07-01T00:00.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Further traces, one panel each.
    #[arg(long)]
    pub overlay: Vec<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1200)]
    pub width: usize,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Disaggregate(a) => run_disaggregate(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Synth(a) => run_synth(a),
        Command::Plot(a) => run_plot(a),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn load_params(path: &Path) -> Result<PipelineParams> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    PipelineParams::from_config(&text).map_err(|e| CliError::from_config(path, e))
}

fn run_disaggregate(a: DisaggregateArgs) -> Result<()> {
    let params = match &a.params {
        Some(p) => load_params(p)?,
        None => PipelineParams::default(),
    };
    let opts = ReadOptions { gap_fill: a.gap_fill };
    let x = read_series_file(&a.input, opts)?;
    let truth = a.truth.as_deref().map(|p| read_series_file(p, opts)).transpose()?;

    let (kind, window) = match a.window {
        Window::Day => (WindowKind::Day, "day"),
        Window::Month => (WindowKind::Month, "month"),
        Window::Whole => (WindowKind::Whole, "whole"),
    };
    let (boundary, boundary_name) = match a.boundary {
        Boundary::Midpoint => (BoundaryPolicy::Midpoint, "midpoint"),
        Boundary::Clip => (BoundaryPolicy::Clip, "clip"),
    };
    let results = disaggregate_windows(&x, WindowSpec { kind, boundary }, &params)?;
    let estimate = stitch(&results, &x);
    log::info!(
        "{} samples, {} windows, {} events, {:.3} kWh",
        x.len(),
        results.len(),
        results.iter().map(|r| r.events.len()).sum::<usize>(),
        estimate.energy_kwh()
    );

    let evaluation = truth.as_ref().map(|t| evaluation_report(t, &estimate)).transpose()?;
    let report = disaggregation_report(&x, &results, &estimate, window, boundary_name, evaluation);
    write_text(&a.output, &to_json(&report))?;
    if let Some(path) = &a.emit_series {
        write_series_file(path, &estimate)?;
    }
    Ok(())
}

fn run_evaluate(a: EvaluateArgs) -> Result<()> {
    let opts = ReadOptions { gap_fill: a.gap_fill };
    let estimate = read_series_file(&a.estimate, opts)?;
    let truth = read_series_file(&a.truth, opts)?;
    let report = evaluation_report(&truth, &estimate)?;
    write_text(&a.output, &to_json(&report))?;
    println!("{}", report.table_row);
    Ok(())
}

fn run_synth(a: SynthArgs) -> Result<()> {
    let start = match &a.start {
        Some(s) => s.parse::<Timestamp>().map_err(|e| CliError::Usage(format!("--start: {e}")))?,
        None => ScenarioSpec::default().start,
    };
    let scenario = if let Some(path) = &a.spec {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut spec = ScenarioSpec::from_config(&text).map_err(|e| CliError::from_config(path, e))?;
        if a.start.is_some() {
            spec.start = start;
        }
        generate_month(&spec, a.days)?
    } else if a.preset == "mixed" {
        generate_mixed_month(a.seed, a.days, start)?
    } else {
        let preset = Preset::from_name(&a.preset).ok_or_else(|| {
            let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
            CliError::Usage(format!("unknown preset `{}`; expected one of {}, mixed", a.preset, names.join(", ")))
        })?;
        generate_month(&ScenarioSpec { start, ..preset.spec(a.seed) }, a.days)?
    };

    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::io(&a.out_dir, e))?;
    write_series_file(&a.out_dir.join("aggregate.csv"), &scenario.aggregate)?;
    for (name, series) in scenario.channels() {
        write_series_file(&a.out_dir.join(format!("truth_{name}.csv")), series)?;
    }
    log::info!(
        "{} days, {} EV sessions, {:.3} kWh EV energy",
        a.days,
        scenario.ev_sessions.len(),
        scenario.ev.energy_kwh()
    );
    Ok(())
}

fn run_plot(a: PlotArgs) -> Result<()> {
    let mut loaded = vec![(a.input.clone(), read_series_file(&a.input, ReadOptions::default())?)];
    for p in &a.overlay {
        loaded.push((p.clone(), read_series_file(p, ReadOptions::default())?));
    }
    let panels: Vec<Panel<'_>> = loaded
        .iter()
        .map(|(p, s)| Panel {
            title: p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned()),
            series: s,
        })
        .collect();
    write_text(&a.output, &render_svg(&panels, a.width))
}
