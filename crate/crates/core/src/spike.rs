//! Spike-train filter.
//!
//! Short segments ("seeds") are removed unconditionally. From every seed the
//! filter walks to the nearest segment forward, then backward, and removes
//! it too when its duration grows by less than `1 + eta` over the current
//! one, the gap to it is small, and it is no longer than `t_spike`. The
//! removed segment becomes the new current segment and the walk continues.
//! AC spike durations drift slowly over the day, so a whole train is eaten
//! from its short end while a segment that is much longer than its
//! neighbours stops the walk.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{GapReference, PipelineParams, Segment};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeLabeling {
    /// `true` = spike to remove, per input segment.
    pub remove: Vec<bool>,
    pub seeds: Vec<usize>,
    /// Seed whose chain labeled each removed segment.
    pub origin: Vec<Option<usize>>,
}

impl SpikeLabeling {
    pub fn removed_count(&self) -> usize {
        self.remove.iter().filter(|&&r| r).count()
    }
}

/// Indices of segments strictly shorter than `t_seed` minutes.
pub fn find_seeds(segments: &[Segment], t_seed: usize) -> Vec<usize> {
    segments
        .iter()
        .enumerate()
        .filter(|(_, s)| s.duration() < t_seed)
        .map(|(i, _)| i)
        .collect()
}

/// Zero-valued minutes strictly between two time-ordered segments.
fn gap_between(earlier: &Segment, later: &Segment) -> usize {
    later.start.saturating_sub(earlier.end + 1)
}

pub fn propagate(segments: &[Segment], seeds: &[usize], params: &PipelineParams) -> SpikeLabeling {
    let n = segments.len();
    let mut remove = vec![false; n];
    let mut origin = vec![None; n];
    for &s in seeds {
        remove[s] = true;
        origin[s] = Some(s);
    }

    let grows_slowly = |cur: usize, cand: usize, seed: usize| -> bool {
        let d_cur = segments[cur].duration() as f64;
        let d_cand = segments[cand].duration();
        let gap_ref = match params.gap_reference {
            GapReference::Current => d_cur,
            GapReference::Seed => segments[seed].duration() as f64,
        };
        let gap = if cand > cur {
            gap_between(&segments[cur], &segments[cand])
        } else {
            gap_between(&segments[cand], &segments[cur])
        };
        (d_cand as f64) < (1.0 + params.eta) * d_cur
            && gap as f64 <= params.gap_factor * gap_ref
            && d_cand <= params.t_spike
    };

    for &seed in seeds {
        let mut cur = seed;
        for next in seed + 1..n {
            if remove[next] {
                cur = next;
                continue;
            }
            if !grows_slowly(cur, next, seed) {
                break;
            }
            remove[next] = true;
            origin[next] = Some(seed);
            cur = next;
        }

        let mut cur = seed;
        for next in (0..seed).rev() {
            if remove[next] {
                cur = next;
                continue;
            }
            if !grows_slowly(cur, next, seed) {
                break;
            }
            remove[next] = true;
            origin[next] = Some(seed);
            cur = next;
        }
    }

    SpikeLabeling { remove, seeds: seeds.to_vec(), origin }
}

pub fn label_spike_train(segments: &[Segment], params: &PipelineParams) -> SpikeLabeling {
    let seeds = find_seeds(segments, params.t_seed);
    propagate(segments, &seeds, params)
}

/// Kept segments, in order.
pub fn filter_spike_train(segments: &[Segment], params: &PipelineParams) -> Vec<Segment> {
    split_spike_train(segments, params).0
}

/// `(kept, removed)`, both in time order.
pub fn split_spike_train(
    segments: &[Segment],
    params: &PipelineParams,
) -> (Vec<Segment>, Vec<Segment>) {
    let labels = label_spike_train(segments, params);
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for (seg, &r) in segments.iter().zip(&labels.remove) {
        if r {
            removed.push(seg.clone());
        } else {
            kept.push(seg.clone());
        }
    }
    (kept, removed)
}

/// Baseline: drop every segment shorter than a fixed duration.
pub fn filter_fixed_duration(segments: &[Segment], min_duration: usize) -> Vec<Segment> {
    segments.iter().filter(|s| s.duration() >= min_duration).cloned().collect()
}
