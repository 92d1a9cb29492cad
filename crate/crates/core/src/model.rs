//! Shared data types and the parameter set for the pipeline.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::time::Timestamp;

/// Sampling period of every series handled by the crate.
pub const PERIOD_SECS: u32 = 60;

/// Uniformly sampled real-power trace in kW, one sample per minute.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    start: Timestamp,
    values: Vec<f64>,
}

impl PowerSeries {
    pub fn new(start: Timestamp, values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) =
            values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidSample { index, value });
        }
        Ok(PowerSeries { start, values })
    }

    pub fn zeros(start: Timestamp, len: usize) -> Self {
        PowerSeries { start, values: vec![0.0; len] }
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    /// Timestamp of sample `index`.
    pub fn time_at(&self, index: usize) -> Timestamp {
        self.start.plus_minutes(index as i64)
    }

    /// One past the last sample.
    pub fn end(&self) -> Timestamp {
        self.time_at(self.values.len())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sub-series over `[from, to)` sample indices.
    pub fn slice(&self, from: usize, to: usize) -> PowerSeries {
        PowerSeries { start: self.time_at(from), values: self.values[from..to].to_vec() }
    }

    /// Energy in kWh (each sample covers one minute).
    pub fn energy_kwh(&self) -> f64 {
        self.values.iter().sum::<f64>() / 60.0
    }
}

/// Maximal run of consecutive nonzero samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub samples: Vec<f64>,
}

impl Segment {
    pub fn new(start: usize, samples: Vec<f64>) -> Self {
        debug_assert!(!samples.is_empty());
        Segment { start, end: start + samples.len() - 1, samples }
    }

    /// Duration in minutes.
    pub fn duration(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Midpoint index, rounded down.
    pub fn midpoint(&self) -> usize {
        (self.start + self.end) / 2
    }

    pub fn overlaps(&self, start: usize, end_inclusive: usize) -> bool {
        self.start <= end_inclusive && start <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentType {
    /// No amplitude level of interest: dryer/oven, possibly hiding an EV.
    Type0,
    /// One level: EV, AC lump, or either with short foreign loads on top.
    Type1,
    /// Two stacked levels: EV overlapped by AC.
    Type2,
}

/// Reconstructed EV charging session as an ideal square wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvEvent {
    pub start: usize,
    pub duration: usize,
    /// kW.
    pub amplitude: f64,
}

impl EvEvent {
    /// Inclusive last index.
    pub fn end(&self) -> usize {
        self.start + self.duration - 1
    }

    pub fn energy_kwh(&self) -> f64 {
        self.amplitude * self.duration as f64 / 60.0
    }
}

/// Which duration the spike filter's gap test scales with while a
/// propagation chain advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapReference {
    /// The segment the chain currently stands on.
    Current,
    /// The seed that started the chain.
    Seed,
}

/// Width of the reference rectangle in the area test of the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaBase {
    /// `[min(S), max(S)]`, the support of the gradient.
    SampleRange,
    /// `[0, max(S)]`, the whole amplitude axis.
    FromZero,
}

/// Every tunable of the pipeline. Defaults are the published values.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    /// Floor of the adaptive low threshold, kW.
    pub t_low_floor: f64,
    /// Samples above this level feed the adaptive low threshold, kW.
    pub t_low_mass_cut: f64,
    /// Segments strictly shorter than this seed the spike filter, minutes.
    pub t_seed: usize,
    pub eta: f64,
    pub gap_factor: f64,
    /// Longest segment the spike filter may remove, minutes.
    pub t_spike: usize,
    pub gap_reference: GapReference,
    pub n_before: usize,
    pub n_after: usize,
    pub c_grid_step: f64,
    /// Half-width, in grid steps, of the centered difference used for the
    /// gradient of the counting function. 0 selects a plain forward difference.
    pub gradient_half_span: usize,
    pub peak_min_distance: f64,
    pub peak_min_height_frac: f64,
    pub area_frac: f64,
    pub area_base: AreaBase,
    pub effective_height_width_frac: f64,
    pub dryer_ev_cut: f64,
    pub ev_min_amplitude: f64,
    /// Upper end of the typical EV amplitude band, kW.
    pub ev_typical_max: f64,
    pub max_ev_width: usize,
    pub t_high_offset: f64,
    pub min_subsegment_duration: usize,
    /// Removed spikes needed on each side to call a Type1 candidate an AC lump.
    pub census_min_spikes: usize,
    pub census_window: usize,
    /// Keep the EV height memory across calendar months.
    pub memory_across_months: bool,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            t_low_floor: 2.5,
            t_low_mass_cut: 2.0,
            t_seed: 20,
            eta: 1.2,
            gap_factor: 3.0,
            t_spike: 90,
            gap_reference: GapReference::Current,
            n_before: 5,
            n_after: 5,
            c_grid_step: 0.05,
            gradient_half_span: 3,
            peak_min_distance: 2.0,
            peak_min_height_frac: 0.2,
            area_frac: 0.35,
            area_base: AreaBase::SampleRange,
            effective_height_width_frac: 0.80,
            dryer_ev_cut: 5.5,
            ev_min_amplitude: 3.0,
            ev_typical_max: 4.0,
            max_ev_width: 250,
            t_high_offset: 2.5,
            min_subsegment_duration: 20,
            census_min_spikes: 3,
            census_window: 60,
            memory_across_months: false,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_low_floor", self.t_low_floor),
            ("t_low_mass_cut", self.t_low_mass_cut),
            ("eta", self.eta),
            ("gap_factor", self.gap_factor),
            ("c_grid_step", self.c_grid_step),
            ("peak_min_distance", self.peak_min_distance),
            ("peak_min_height_frac", self.peak_min_height_frac),
            ("area_frac", self.area_frac),
            ("effective_height_width_frac", self.effective_height_width_frac),
            ("dryer_ev_cut", self.dryer_ev_cut),
            ("ev_min_amplitude", self.ev_min_amplitude),
            ("ev_typical_max", self.ev_typical_max),
            ("t_high_offset", self.t_high_offset),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    message: alloc::format!("must be finite and positive, got {v}"),
                });
            }
        }
        let counts = [
            ("t_seed", self.t_seed),
            ("t_spike", self.t_spike),
            ("n_before", self.n_before),
            ("n_after", self.n_after),
            ("max_ev_width", self.max_ev_width),
            ("census_window", self.census_window),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidParameter { name, message: "must be at least 1".into() });
            }
        }
        if self.effective_height_width_frac > 1.0 {
            return Err(Error::InvalidParameter {
                name: "effective_height_width_frac",
                message: "must not exceed 1".into(),
            });
        }
        Ok(())
    }
}

/// What the pipeline did with one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    /// Dropped by the spike-train filter.
    SpikeRemoved,
    /// Nothing left after residual-noise removal.
    Vanished,
    /// Type0 below the dryer/EV cut: a dryer or oven.
    DryerDiscarded,
    /// Type0 above the cut, EV height borrowed from memory.
    OverlapFromMemory,
    /// Type0 above the cut with empty memory; low confidence.
    OverlapFallback,
    Accepted,
    TooWide,
    TooLow,
    SurroundedBySpikes,
    /// Type2 over a long AC lump; EV sessions taken from the top part.
    TopOverLump { events: usize },
    /// Type2 whose top part is an AC spike train; EV is the bottom.
    BottomUnderSpikes,
    TopCloserToReference { events: usize },
    BottomCloserToReference,
    /// Type2 where neither level is a plausible EV height.
    Ambiguous,
    /// Type2 with no sample above the high threshold; handled as Type1.
    NoTopPart,
}

impl Decision {
    /// Stable snake_case label for reports.
    pub fn name(&self) -> &'static str {
        match self {
            Decision::SpikeRemoved => "spike_removed",
            Decision::Vanished => "vanished",
            Decision::DryerDiscarded => "dryer_discarded",
            Decision::OverlapFromMemory => "overlap_from_memory",
            Decision::OverlapFallback => "overlap_fallback",
            Decision::Accepted => "accepted",
            Decision::TooWide => "too_wide",
            Decision::TooLow => "too_low",
            Decision::SurroundedBySpikes => "surrounded_by_spikes",
            Decision::TopOverLump { .. } => "top_over_lump",
            Decision::BottomUnderSpikes => "bottom_under_spikes",
            Decision::TopCloserToReference { .. } => "top_closer_to_reference",
            Decision::BottomCloserToReference => "bottom_closer_to_reference",
            Decision::Ambiguous => "ambiguous",
            Decision::NoTopPart => "no_top_part",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRecord {
    pub start: usize,
    pub end: usize,
    pub kind: Option<SegmentType>,
    pub decision: Decision,
}

/// Output of one pipeline run over one window.
#[derive(Debug, Clone, PartialEq)]
pub struct DisaggregationResult {
    /// Index of the window's first sample in the input series.
    pub offset: usize,
    pub t_low: f64,
    /// Events in input-series indices, ordered by start.
    pub events: Vec<EvEvent>,
    /// Reconstructed EV load over the window, clipped to it. Under
    /// `disaggregate_windows` this also shows the part of a neighbouring
    /// window's event that reaches into this one.
    pub estimated_series: PowerSeries,
    pub diagnostics: Vec<SegmentRecord>,
}

impl DisaggregationResult {
    pub fn energy_kwh(&self) -> f64 {
        self.events.iter().map(EvEvent::energy_kwh).sum()
    }
}

/// Renders square waves onto an all-zero grid of `len` samples.
pub fn render_events(events: &[EvEvent], start: Timestamp, len: usize) -> Result<PowerSeries> {
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by_key(|&i| events[i].start);
    for pair in order.windows(2) {
        if events[pair[1]].start <= events[pair[0]].end() {
            return Err(Error::OverlappingEvents { first: pair[0], second: pair[1] });
        }
    }
    let mut values = vec![0.0; len];
    for ev in events {
        if ev.duration == 0 || ev.start + ev.duration > len {
            return Err(Error::EventOutOfRange { start: ev.start, duration: ev.duration, len });
        }
        values[ev.start..ev.start + ev.duration].fill(ev.amplitude);
    }
    PowerSeries::new(start, values)
}
