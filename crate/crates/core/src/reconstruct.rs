//! Square-wave reconstruction of EV sessions from classified segments.
//!
//! Every decision works on two summary numbers of a segment: its effective
//! width (the bottom width) and its effective height (the level at which
//! the width has shrunk to 80 % of the bottom width).

use alloc::vec::Vec;

use crate::model::{Decision, EvEvent, PipelineParams, Segment};
use crate::segmentation::runs;
use crate::spike::split_spike_train;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveShape {
    /// Minutes.
    pub width: usize,
    /// kW.
    pub height: f64,
}

/// Width is the sample count; height is the largest `h` such that at least
/// `width_frac * width` samples are `>= h`, i.e. the k-th largest sample
/// with `k = ceil(width_frac * width)`.
pub fn effective_shape(samples: &[f64], width_frac: f64) -> EffectiveShape {
    assert!(!samples.is_empty(), "effective shape of an empty segment");
    let width = samples.len();
    let k = (libm::ceil(width_frac * width as f64 - 1e-9) as usize).clamp(1, width);
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    EffectiveShape { width, height: sorted[k - 1] }
}

/// Run above the high threshold inside a Type2 segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSegment {
    pub segment: Segment,
    pub parent_start: usize,
    pub shape: EffectiveShape,
    /// Own effective height minus the parent's, floored at 0.
    pub actual_height: f64,
}

/// Heights of confidently reconstructed EVs (clean single-level segments).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvHeightMemory {
    heights: Vec<f64>,
}

impl EvHeightMemory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `height` if it is a plausible EV amplitude; returns whether it did.
    pub fn record(&mut self, height: f64, min_amplitude: f64) -> bool {
        if height >= min_amplitude {
            self.heights.push(height);
            true
        } else {
            false
        }
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    pub fn clear(&mut self) {
        self.heights.clear();
    }

    /// Median of stored heights.
    pub fn representative(&self) -> Option<f64> {
        if self.heights.is_empty() {
            return None;
        }
        let mut h = self.heights.clone();
        h.sort_by(f64::total_cmp);
        let n = h.len();
        Some(if n % 2 == 1 { h[n / 2] } else { 0.5 * (h[n / 2 - 1] + h[n / 2]) })
    }
}

/// True when at least `census_min_spikes` removed spikes lie within
/// `census_window` minutes on each side of `seg`.
pub fn surrounded_by_spikes(seg: &Segment, removed: &[Segment], params: &PipelineParams) -> bool {
    if params.census_min_spikes == 0 {
        return false;
    }
    let w = params.census_window;
    let left = removed
        .iter()
        .filter(|r| r.end < seg.start && r.end + w >= seg.start)
        .count();
    let right = removed
        .iter()
        .filter(|r| r.start > seg.end && r.start <= seg.end + w)
        .count();
    left >= params.census_min_spikes && right >= params.census_min_spikes
}

pub fn reconstruct_type0(
    seg: &Segment,
    shape: EffectiveShape,
    memory: &EvHeightMemory,
    params: &PipelineParams,
) -> (Option<EvEvent>, Decision) {
    if shape.height < params.dryer_ev_cut {
        return (None, Decision::DryerDiscarded);
    }
    if shape.width > params.max_ev_width {
        return (None, Decision::TooWide);
    }
    let (amplitude, decision) = match memory.representative() {
        Some(h) => (h, Decision::OverlapFromMemory),
        None => (shape.height - params.dryer_ev_cut, Decision::OverlapFallback),
    };
    (Some(EvEvent { start: seg.start, duration: shape.width, amplitude }), decision)
}

/// Width, height and spike-census checks for a single-level candidate.
fn judge_single_level(
    seg: &Segment,
    shape: EffectiveShape,
    removed: &[Segment],
    params: &PipelineParams,
) -> (Option<EvEvent>, Decision) {
    if shape.width > params.max_ev_width {
        (None, Decision::TooWide)
    } else if shape.height < params.ev_min_amplitude {
        (None, Decision::TooLow)
    } else if surrounded_by_spikes(seg, removed, params) {
        (None, Decision::SurroundedBySpikes)
    } else {
        let ev = EvEvent { start: seg.start, duration: shape.width, amplitude: shape.height };
        (Some(ev), Decision::Accepted)
    }
}

/// Accepted Type1 heights are appended to `memory`.
pub fn reconstruct_type1(
    seg: &Segment,
    shape: EffectiveShape,
    removed: &[Segment],
    memory: &mut EvHeightMemory,
    params: &PipelineParams,
) -> (Option<EvEvent>, Decision) {
    let out = judge_single_level(seg, shape, removed, params);
    if let (Some(ev), _) = &out {
        memory.record(ev.amplitude, params.ev_min_amplitude);
    }
    out
}

/// Runs of samples `>= t_high` and the parent's bottom shape.
pub fn split_type2(
    seg: &Segment,
    t_high: f64,
    params: &PipelineParams,
) -> (Vec<SubSegment>, EffectiveShape) {
    let frac = params.effective_height_width_frac;
    let bottom = effective_shape(&seg.samples, frac);
    let top = runs(&seg.samples, seg.start, |v| v >= t_high)
        .into_iter()
        .map(|segment| {
            let shape = effective_shape(&segment.samples, frac);
            SubSegment {
                parent_start: seg.start,
                actual_height: (shape.height - bottom.height).max(0.0),
                shape,
                segment,
            }
        })
        .collect();
    (top, bottom)
}

fn bottom_event(seg: &Segment, bottom: EffectiveShape) -> EvEvent {
    EvEvent { start: seg.start, duration: bottom.width, amplitude: bottom.height }
}

fn top_event(sub: &SubSegment) -> EvEvent {
    EvEvent {
        start: sub.segment.start,
        duration: sub.shape.width,
        amplitude: sub.actual_height,
    }
}

/// Decides whether the EV sits in the top or the bottom part of a Type2
/// segment.
///
/// * bottom wider than `max_ev_width`: the bottom is an AC lump and every
///   long enough sub-segment on top is an EV session;
/// * spike filter eats every sub-segment: the top is an AC spike train and
///   the bottom is the EV;
/// * otherwise each surviving sub-segment votes for whichever of its actual
///   height and the parent's effective height is closer to the remembered
///   EV height (or, with no memory, lies in the typical EV band). Any vote
///   for the bottom yields one bottom event; else one event per top vote.
pub fn reconstruct_type2(
    seg: &Segment,
    top: &[SubSegment],
    bottom: EffectiveShape,
    memory: &EvHeightMemory,
    removed: &[Segment],
    params: &PipelineParams,
) -> (Vec<EvEvent>, Decision) {
    if top.is_empty() {
        let (ev, decision) = judge_single_level(seg, bottom, removed, params);
        let decision = if ev.is_some() { Decision::NoTopPart } else { decision };
        return (ev.into_iter().collect(), decision);
    }

    let plausible_top = |s: &SubSegment| {
        s.actual_height >= params.ev_min_amplitude && s.shape.width <= params.max_ev_width
    };

    if bottom.width > params.max_ev_width {
        let events: Vec<EvEvent> = top
            .iter()
            .filter(|s| s.segment.duration() > params.min_subsegment_duration && plausible_top(s))
            .map(top_event)
            .collect();
        let n = events.len();
        return (events, Decision::TopOverLump { events: n });
    }

    let sub_segments: Vec<Segment> = top.iter().map(|s| s.segment.clone()).collect();
    let (kept, _) = split_spike_train(&sub_segments, params);
    if kept.is_empty() {
        return if bottom.height >= params.ev_min_amplitude {
            (alloc::vec![bottom_event(seg, bottom)], Decision::BottomUnderSpikes)
        } else {
            (Vec::new(), Decision::TooLow)
        };
    }

    let in_band = |h: f64| h >= params.ev_min_amplitude && h <= params.ev_typical_max;
    let reference = memory.representative();
    let mut bottom_votes = 0;
    let mut top_votes: Vec<&SubSegment> = Vec::new();
    for k in &kept {
        let Some(sub) = top.iter().find(|s| s.segment.start == k.start) else {
            continue;
        };
        match reference {
            Some(r) => {
                if (sub.actual_height - r).abs() < (bottom.height - r).abs() {
                    top_votes.push(sub);
                } else {
                    bottom_votes += 1;
                }
            }
            None => {
                if in_band(bottom.height) {
                    bottom_votes += 1;
                } else if in_band(sub.actual_height) {
                    top_votes.push(sub);
                }
            }
        }
    }

    if bottom_votes > 0 {
        return if bottom.height >= params.ev_min_amplitude {
            (alloc::vec![bottom_event(seg, bottom)], Decision::BottomCloserToReference)
        } else {
            (Vec::new(), Decision::TooLow)
        };
    }
    let events: Vec<EvEvent> =
        top_votes.into_iter().filter(|s| plausible_top(s)).map(top_event).collect();
    if events.is_empty() {
        log::debug!("type2 segment at {} left without a plausible EV level", seg.start);
        (events, Decision::Ambiguous)
    } else {
        let n = events.len();
        (events, Decision::TopCloserToReference { events: n })
    }
}
