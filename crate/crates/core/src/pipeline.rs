//! End-to-end composition of the five stages over processing windows.

use alloc::vec::Vec;

use crate::classifier::classify;
use crate::error::Result;
use crate::model::{
    Decision, DisaggregationResult, EvEvent, PipelineParams, PowerSeries, Segment, SegmentRecord,
    SegmentType,
};
use crate::reconstruct::{
    effective_shape, reconstruct_type0, reconstruct_type1, reconstruct_type2, split_type2,
    EvHeightMemory,
};
use crate::segmentation::{
    apply_threshold, compute_low_threshold, extract_segments, remove_residual_noise,
};
use crate::spike::split_spike_train;
use crate::time::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    /// Calendar days, split at midnight.
    Day,
    /// Calendar months.
    Month,
    /// Fixed-length chunks from the first sample.
    Custom { minutes: usize },
    /// The whole series as one window.
    Whole,
}

/// How a segment crossing a window edge is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPolicy {
    /// Extend the window to the segment's natural ends and process the
    /// segment in the window that holds its midpoint.
    Midpoint,
    /// Cut segments at the window edge.
    Clip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub boundary: BoundaryPolicy,
}

impl WindowSpec {
    pub fn days() -> Self {
        WindowSpec { kind: WindowKind::Day, boundary: BoundaryPolicy::Midpoint }
    }

    pub fn months() -> Self {
        WindowSpec { kind: WindowKind::Month, boundary: BoundaryPolicy::Midpoint }
    }
}

/// Runs the pipeline with the whole series as one window.
pub fn disaggregate(x: &PowerSeries, params: &PipelineParams) -> Result<DisaggregationResult> {
    params.validate()?;
    let mut memory = EvHeightMemory::new();
    let mut result =
        run_window(x.values(), 0, x.len(), params, &mut memory, BoundaryPolicy::Clip);
    result.estimated_series = render_clipped(&result.events, x.start(), 0, x.len());
    Ok(result)
}

/// Per-window results, in time order.
///
/// The EV height memory carries over between windows of the same calendar
/// month (or of the whole run with `memory_across_months`). Each window's
/// `estimated_series` renders every event overlapping it, including events
/// reported by a neighbouring window, so the series concatenate to the full
/// estimate.
pub fn disaggregate_windows(
    x: &PowerSeries,
    spec: WindowSpec,
    params: &PipelineParams,
) -> Result<Vec<DisaggregationResult>> {
    params.validate()?;
    let bounds = window_bounds(x, spec.kind);
    let mut memory = EvHeightMemory::new();
    let mut month = None;
    let mut results = Vec::with_capacity(bounds.len());
    for &(lo, hi) in &bounds {
        let key = x.time_at(lo).month_key();
        if !params.memory_across_months && month != Some(key) {
            memory.clear();
        }
        month = Some(key);
        results.push(run_window(x.values(), lo, hi, params, &mut memory, spec.boundary));
    }
    let all: Vec<EvEvent> = results.iter().flat_map(|r| r.events.iter().copied()).collect();
    for r in &mut results {
        let hi = r.offset + r.estimated_series.len();
        r.estimated_series = render_clipped(&all, x.time_at(r.offset), r.offset, hi);
    }
    Ok(results)
}

/// Every event of every result rendered on the input's time grid.
pub fn stitch(results: &[DisaggregationResult], x: &PowerSeries) -> PowerSeries {
    let all: Vec<EvEvent> = results.iter().flat_map(|r| r.events.iter().copied()).collect();
    render_clipped(&all, x.start(), 0, x.len())
}

/// `[lo, hi)` index ranges covering the series.
pub fn window_bounds(x: &PowerSeries, kind: WindowKind) -> Vec<(usize, usize)> {
    let n = x.len();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let next_edge = |lo: usize| -> usize {
        let t = x.time_at(lo);
        let edge = match kind {
            WindowKind::Day => t.start_of_day().plus_minutes(crate::time::MINUTES_PER_DAY),
            WindowKind::Month => t.start_of_next_month(),
            WindowKind::Custom { minutes } => t.plus_minutes(minutes.max(1) as i64),
            WindowKind::Whole => return n,
        };
        ((edge.0 - x.start().0) as usize).min(n)
    };
    let mut lo = 0;
    while lo < n {
        let hi = next_edge(lo);
        out.push((lo, hi));
        lo = hi;
    }
    out
}

fn render_clipped(events: &[EvEvent], start: Timestamp, lo: usize, hi: usize) -> PowerSeries {
    let mut values = alloc::vec![0.0; hi - lo];
    for ev in events {
        let a = ev.start.max(lo);
        let b = (ev.start + ev.duration).min(hi);
        if a < b {
            values[a - lo..b - lo].fill(ev.amplitude);
        }
    }
    PowerSeries::new(start, values).expect("event amplitudes are finite and non-negative")
}

fn shifted(seg: &Segment, by: usize, forward: bool) -> Segment {
    let start = if forward { seg.start + by } else { seg.start - by };
    Segment::new(start, seg.samples.clone())
}

fn record(seg: &Segment, kind: Option<SegmentType>, decision: Decision) -> SegmentRecord {
    SegmentRecord { start: seg.start, end: seg.end, kind, decision }
}

fn run_window(
    raw: &[f64],
    lo: usize,
    hi: usize,
    params: &PipelineParams,
    memory: &mut EvHeightMemory,
    boundary: BoundaryPolicy,
) -> DisaggregationResult {
    let start = Timestamp::default();
    let empty = |t_low| DisaggregationResult {
        offset: lo,
        t_low,
        events: Vec::new(),
        estimated_series: PowerSeries::zeros(start, hi - lo),
        diagnostics: Vec::new(),
    };
    if lo >= hi {
        return empty(params.t_low_floor);
    }
    let t_low = compute_low_threshold(&raw[lo..hi], params).unwrap_or(params.t_low_floor);

    // Step 1
    let (ext_lo, ext_hi) = match boundary {
        BoundaryPolicy::Clip => (lo, hi),
        BoundaryPolicy::Midpoint => {
            let mut a = lo;
            while a > 0 && raw[a] >= t_low && raw[a - 1] >= t_low {
                a -= 1;
            }
            let mut b = hi;
            while b < raw.len() && raw[b - 1] >= t_low && raw[b] >= t_low {
                b += 1;
            }
            (a, b)
        }
    };
    let segments = extract_segments(&apply_threshold(&raw[ext_lo..ext_hi], ext_lo, t_low));
    let owned = |s: &Segment| boundary == BoundaryPolicy::Clip || (lo..hi).contains(&s.midpoint());

    // Step 2
    let (kept, removed) = split_spike_train(&segments, params);
    let mut diagnostics: Vec<SegmentRecord> = removed
        .iter()
        .filter(|s| owned(s))
        .map(|s| record(s, None, Decision::SpikeRemoved))
        .collect();

    // Step 3
    // Clipped windows only look at their own samples for the noise floor.
    let cleaned = match boundary {
        BoundaryPolicy::Midpoint => {
            remove_residual_noise(raw, &kept, params.n_before, params.n_after)
        }
        BoundaryPolicy::Clip => {
            let local: Vec<Segment> = kept.iter().map(|s| shifted(s, lo, false)).collect();
            remove_residual_noise(&raw[lo..hi], &local, params.n_before, params.n_after)
                .iter()
                .map(|s| shifted(s, lo, true))
                .collect()
        }
    };
    for k in kept.iter().filter(|s| owned(s)) {
        if !cleaned.iter().any(|c| k.start <= c.start && c.end <= k.end) {
            diagnostics.push(record(k, None, Decision::Vanished));
        }
    }
    let cleaned: Vec<Segment> = cleaned.into_iter().filter(|s| owned(s)).collect();

    // Step 4
    let kinds: Vec<SegmentType> = cleaned.iter().map(|s| classify(s, params).0).collect();

    // Step 5, Type1 first so that their heights are remembered before the
    // memory-dependent types are decided.
    let frac = params.effective_height_width_frac;
    let t_high = t_low + params.t_high_offset;
    let mut events = Vec::new();
    for (seg, _) in cleaned.iter().zip(&kinds).filter(|(_, k)| **k == SegmentType::Type1) {
        let shape = effective_shape(&seg.samples, frac);
        let (ev, decision) = reconstruct_type1(seg, shape, &removed, memory, params);
        events.extend(ev);
        diagnostics.push(record(seg, Some(SegmentType::Type1), decision));
    }
    for (seg, &kind) in cleaned.iter().zip(&kinds) {
        match kind {
            SegmentType::Type1 => {}
            SegmentType::Type0 => {
                let shape = effective_shape(&seg.samples, frac);
                let (ev, decision) = reconstruct_type0(seg, shape, memory, params);
                events.extend(ev);
                diagnostics.push(record(seg, Some(kind), decision));
            }
            SegmentType::Type2 => {
                let (top, bottom) = split_type2(seg, t_high, params);
                let (evs, decision) =
                    reconstruct_type2(seg, &top, bottom, memory, &removed, params);
                events.extend(evs);
                diagnostics.push(record(seg, Some(kind), decision));
            }
        }
    }
    events.sort_by_key(|e| e.start);
    diagnostics.sort_by_key(|d| d.start);
    log::debug!(
        "window [{lo}, {hi}): t_low {t_low:.3}, {} segments, {} removed as spikes, {} events",
        segments.len(),
        removed.len(),
        events.len()
    );

    DisaggregationResult {
        offset: lo,
        t_low,
        events,
        estimated_series: PowerSeries::zeros(start, hi - lo),
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    fn series(values: Vec<f64>) -> PowerSeries {
        PowerSeries::new(Timestamp::from_civil(2013, 7, 1, 0, 0), values).unwrap()
    }

    #[test]
    fn all_zero_day_is_empty() {
        let r = disaggregate(&series(vec![0.0; 1440]), &PipelineParams::default()).unwrap();
        assert!(r.events.is_empty());
        assert_eq!(r.estimated_series.energy_kwh(), 0.0);
        assert_eq!(r.t_low, 2.5);
    }

    #[test]
    fn empty_series_is_empty_result() {
        let r = disaggregate(&series(vec![]), &PipelineParams::default()).unwrap();
        assert!(r.events.is_empty());
        assert!(r.estimated_series.is_empty());
    }

    #[test]
    fn clean_square_wave_is_recovered() {
        let mut v = vec![0.2; 1440];
        for x in &mut v[600..720] {
            *x = 3.5;
        }
        let r = disaggregate(&series(v), &PipelineParams::default()).unwrap();
        assert_eq!(r.events.len(), 1);
        let ev = r.events[0];
        assert_eq!((ev.start, ev.duration), (600, 120));
        assert!((ev.amplitude - 3.3).abs() < 1e-9);
        assert_eq!(r.diagnostics[0].decision, Decision::Accepted);
    }

    #[test]
    fn full_day_segment_is_too_wide() {
        let r = disaggregate(&series(vec![4.0; 1440]), &PipelineParams::default()).unwrap();
        assert!(r.events.is_empty());
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].kind, Some(SegmentType::Type1));
        assert_eq!(r.diagnostics[0].decision, Decision::TooWide);
    }

    #[test]
    fn single_sample_spikes_are_removed() {
        let mut v = vec![0.1; 1440];
        for i in (100..1400).step_by(37) {
            v[i] = 4.0;
        }
        let r = disaggregate(&series(v), &PipelineParams::default()).unwrap();
        assert!(r.events.is_empty());
        assert!(r.diagnostics.iter().all(|d| d.decision == Decision::SpikeRemoved));
    }

    #[test]
    fn day_windows_partition_the_series() {
        let x = series(vec![0.0; 3 * 1440]);
        let b = window_bounds(&x, WindowKind::Day);
        assert_eq!(b, vec![(0, 1440), (1440, 2880), (2880, 4320)]);
        let r = disaggregate_windows(&x, WindowSpec::days(), &PipelineParams::default()).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.iter().map(|w| w.estimated_series.len()).sum::<usize>(), 3 * 1440);
    }

    #[test]
    fn partial_first_day_and_months() {
        let x = PowerSeries::new(Timestamp::from_civil(2013, 7, 30, 12, 0), vec![0.0; 3 * 1440])
            .unwrap();
        let b = window_bounds(&x, WindowKind::Day);
        assert_eq!(b[0], (0, 720));
        assert_eq!(b.len(), 4);
        let m = window_bounds(&x, WindowKind::Month);
        assert_eq!(m, vec![(0, 720 + 1440), (720 + 1440, 3 * 1440)]);
    }

    #[test]
    fn straddling_event_goes_to_midpoint_window() {
        // 3.5 kW from 23:00 on day 1 to 01:40 on day 2; midpoint on day 2.
        let mut v = vec![0.2; 2 * 1440];
        for x in &mut v[1380..1540] {
            *x = 3.5;
        }
        let x = series(v);
        let r = disaggregate_windows(&x, WindowSpec::days(), &PipelineParams::default()).unwrap();
        assert!(r[0].events.is_empty());
        assert_eq!(r[1].events.len(), 1);
        assert_eq!((r[1].events[0].start, r[1].events[0].duration), (1380, 160));
        // Day one's estimate still shows the evening part.
        assert!(r[0].estimated_series.values()[1400] > 0.0);
        let full = stitch(&r, &x);
        let concat: Vec<f64> =
            r.iter().flat_map(|w| w.estimated_series.values().iter().copied()).collect();
        assert_eq!(full.values(), &concat[..]);
    }

    #[test]
    fn clip_policy_cuts_at_midnight() {
        let mut v = vec![0.2; 2 * 1440];
        for x in &mut v[1380..1540] {
            *x = 3.5;
        }
        let spec = WindowSpec { kind: WindowKind::Day, boundary: BoundaryPolicy::Clip };
        let r = disaggregate_windows(&series(v), spec, &PipelineParams::default()).unwrap();
        assert_eq!(r[0].events[0].duration, 60);
        assert_eq!(r[1].events[0].duration, 100);
    }

    #[test]
    fn memory_resets_at_month_boundary() {
        // Clean EV on July 31st, EV fully covered by a dryer ramp on Aug 1st.
        let start = Timestamp::from_civil(2013, 7, 31, 0, 0);
        let mut v = vec![0.1; 2 * 1440];
        for x in &mut v[600..700] {
            *x = 3.4;
        }
        for (k, x) in v[1440 + 600..1440 + 645].iter_mut().enumerate() {
            *x = 3.4 + 2.0 + 5.0 * k as f64 / 44.0;
        }
        let x = PowerSeries::new(start, v).unwrap();
        let params = PipelineParams::default();
        let r = disaggregate_windows(&x, WindowSpec::days(), &params).unwrap();
        let d = r[1].diagnostics.last().unwrap();
        assert_eq!(d.kind, Some(SegmentType::Type0));
        assert_eq!(d.decision, Decision::OverlapFallback);

        let across = PipelineParams { memory_across_months: true, ..params };
        let r = disaggregate_windows(&x, WindowSpec::days(), &across).unwrap();
        assert_eq!(r[1].diagnostics.last().unwrap().decision, Decision::OverlapFromMemory);
        assert!((r[1].events[0].amplitude - 3.3).abs() < 1e-9);
    }

    #[test]
    fn deterministic() {
        let v: Vec<f64> = (0..1440).map(|i| if (i / 13) % 3 == 0 { 3.1 } else { 0.2 }).collect();
        let x = series(v);
        let a = disaggregate(&x, &PipelineParams::default()).unwrap();
        let b = disaggregate(&x, &PipelineParams::default()).unwrap();
        assert_eq!(a, b);
    }
}
