//! Adaptive thresholding, segment extraction and local residual-noise removal.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{PipelineParams, Segment};

/// Aggregate power with every sample under `t_low` set to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdedSeries {
    /// Index of `values[0]` in the raw series.
    pub offset: usize,
    pub values: Vec<f64>,
    pub t_low: f64,
}

/// `max(floor, mean of samples above mass_cut / 2)`; the floor wins when no
/// sample exceeds `mass_cut`.
pub fn compute_low_threshold(x: &[f64], params: &PipelineParams) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty("power series"));
    }
    let (count, sum) = x
        .iter()
        .filter(|&&v| v > params.t_low_mass_cut)
        .fold((0usize, 0.0), |(n, s), &v| (n + 1, s + v));
    let half_mean = if count == 0 { 0.0 } else { sum / (2.0 * count as f64) };
    Ok(params.t_low_floor.max(half_mean))
}

/// Keeps samples `>= t_low`, zeroes the rest.
pub fn apply_threshold(x: &[f64], offset: usize, t_low: f64) -> ThresholdedSeries {
    let values = x.iter().map(|&v| if v >= t_low { v } else { 0.0 }).collect();
    ThresholdedSeries { offset, values, t_low }
}

/// Maximal runs of nonzero samples, in time order, indexed in raw-series
/// coordinates.
pub fn extract_segments(xt: &ThresholdedSeries) -> Vec<Segment> {
    runs(&xt.values, xt.offset, |v| v > 0.0)
}

/// Maximal runs of samples satisfying `keep`, offset by `offset`.
pub(crate) fn runs(values: &[f64], offset: usize, keep: impl Fn(f64) -> bool) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < values.len() {
        if keep(values[i]) {
            let j = (i..values.len()).find(|&j| !keep(values[j])).unwrap_or(values.len());
            out.push(Segment::new(offset + i, values[i..j].to_vec()));
            i = j;
        } else {
            i += 1;
        }
    }
    out
}

/// Local noise level around a segment: the mean of the minimum of up to
/// `n_before` raw samples before it and up to `n_after` raw samples after
/// it. A side with no samples is left out; with neither side the level is 0.
pub fn local_noise_level(raw: &[f64], seg: &Segment, n_before: usize, n_after: usize) -> f64 {
    let before = &raw[seg.start.saturating_sub(n_before)..seg.start];
    let after_end = (seg.end + 1 + n_after).min(raw.len());
    let after = &raw[(seg.end + 1).min(raw.len())..after_end];
    let min_of = |s: &[f64]| s.iter().copied().reduce(f64::min);
    match (min_of(before), min_of(after)) {
        (Some(b), Some(a)) => (b + a) / 2.0,
        (Some(b), None) => b,
        (None, Some(a)) => a,
        (None, None) => 0.0,
    }
}

/// Subtracts each segment's local noise level. Samples that reach zero are
/// dropped and the remainder is re-split into maximal positive runs.
///
/// `raw` is the unthresholded aggregate in the same index space as the
/// segments.
pub fn remove_residual_noise(
    raw: &[f64],
    segments: &[Segment],
    n_before: usize,
    n_after: usize,
) -> Vec<Segment> {
    let mut out = Vec::with_capacity(segments.len());
    for seg in segments {
        let noise = local_noise_level(raw, seg, n_before, n_after);
        if noise == 0.0 {
            out.push(seg.clone());
            continue;
        }
        let lowered: Vec<f64> = seg.samples.iter().map(|&v| (v - noise).max(0.0)).collect();
        out.extend(runs(&lowered, seg.start, |v| v > 0.0));
    }
    out
}
