//! Segment classification from the cumulative counting function
//! `f(c) = #{t : S(t) > c}` and the prominent peaks of its gradient.
//!
//! A square wave of height `h` makes `f` drop sharply at `c = h`, so the
//! number of prominent gradient peaks counts the stacked rectangular loads
//! in a segment. Diffuse shapes (ramps, heater cycling) spread the drop
//! over many levels; the area under the normalized gradient separates them
//! from genuinely two-level segments.

use alloc::vec::Vec;

use crate::model::{AreaBase, PipelineParams, Segment, SegmentType};

#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeProfile {
    pub step: f64,
    /// Amplitude thresholds `i * step`, ascending from 0 to at least `max(S)`.
    pub grid: Vec<f64>,
    pub f: Vec<usize>,
    /// Negated gradient of `f` per kW, non-negative.
    pub g: Vec<f64>,
    /// `g / max(g)`, all zeros when `g` is.
    pub g_n: Vec<f64>,
    pub min_sample: f64,
    pub max_sample: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// kW.
    pub position: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }
}

/// Counting function and its gradient on a `step`-spaced grid.
///
/// With `half_span = k > 0` the gradient is the centered difference
/// `(f[i-k] - f[i+k]) / (2 k step)`, which is the count of samples in a
/// `2 k step` wide amplitude window per kW; `k = 0` is the plain forward
/// difference. The grid runs `k` steps past `max(S)` so a drop at the very
/// top stays inside it.
pub fn cumulative_profile(seg: &Segment, step: f64, half_span: usize) -> CumulativeProfile {
    assert!(step > 0.0, "grid step must be positive");
    let mut sorted = seg.samples.clone();
    sorted.sort_by(f64::total_cmp);
    let n_samples = sorted.len();
    let min_sample = sorted.first().copied().unwrap_or(0.0);
    let max_sample = sorted.last().copied().unwrap_or(0.0);

    let top = libm::ceil(max_sample / step) as usize;
    let last = top + half_span;
    let grid: Vec<f64> = (0..=last).map(|i| i as f64 * step).collect();
    let f: Vec<usize> =
        grid.iter().map(|&c| n_samples - sorted.partition_point(|&v| v <= c)).collect();

    // f outside the grid: every sample is above a negative threshold and
    // none is above the last grid point.
    let f_at = |i: isize| -> f64 {
        if i < 0 {
            n_samples as f64
        } else if i as usize > last {
            0.0
        } else {
            f[i as usize] as f64
        }
    };
    let g: Vec<f64> = (0..=last as isize)
        .map(|i| {
            if half_span == 0 {
                (f_at(i) - f_at(i + 1)) / step
            } else {
                let k = half_span as isize;
                (f_at(i - k) - f_at(i + k)) / (2.0 * half_span as f64 * step)
            }
        })
        .collect();
    let g_max = g.iter().copied().fold(0.0, f64::max);
    let g_n = if g_max > 0.0 { g.iter().map(|v| v / g_max).collect() } else { g.clone() };

    CumulativeProfile { step, grid, f, g, g_n, min_sample, max_sample }
}

/// Local maxima of `g`, plateaus reported at their midpoint. A plateau that
/// runs into either end of the grid still counts.
fn local_maxima(g: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < g.len() {
        let rises = i == 0 || g[i] > g[i - 1];
        let mut j = i;
        while j + 1 < g.len() && g[j + 1] == g[i] {
            j += 1;
        }
        let falls = j + 1 == g.len() || g[j + 1] < g[i];
        if rises && falls && g[i] > 0.0 {
            out.push((i + j) / 2);
        }
        i = j + 1;
    }
    out
}

/// Prominent peaks: local maxima above `peak_min_height_frac * max(g)`,
/// taken greedily by height and suppressed within `peak_min_distance` kW of
/// an already chosen one.
pub fn find_prominent_peaks(profile: &CumulativeProfile, params: &PipelineParams) -> PeakSet {
    let g = &profile.g;
    let g_max = g.iter().copied().fold(0.0, f64::max);
    if g_max <= 0.0 {
        return PeakSet::default();
    }
    let cut = params.peak_min_height_frac * g_max;
    let mut candidates: Vec<Peak> = local_maxima(g)
        .into_iter()
        .filter(|&i| g[i] > cut)
        .map(|i| Peak { position: profile.grid[i], height: g[i] })
        .collect();
    candidates.sort_by(|a, b| {
        b.height.total_cmp(&a.height).then(a.position.total_cmp(&b.position))
    });
    let mut chosen: Vec<Peak> = Vec::new();
    for c in candidates {
        if chosen.iter().all(|p| (p.position - c.position).abs() > params.peak_min_distance) {
            chosen.push(c);
        }
    }
    chosen.sort_by(|a, b| a.position.total_cmp(&b.position));
    PeakSet { peaks: chosen }
}

/// Trapezoid-rule area under `g_n`, in kW.
pub fn normalized_area(profile: &CumulativeProfile) -> f64 {
    profile.g_n.windows(2).map(|w| 0.5 * (w[0] + w[1]) * profile.step).sum()
}

pub fn classify_segment(
    profile: &CumulativeProfile,
    peaks: &PeakSet,
    params: &PipelineParams,
) -> SegmentType {
    match peaks.len() {
        0 => SegmentType::Type0,
        1 => SegmentType::Type1,
        _ => {
            let width = match params.area_base {
                AreaBase::SampleRange => profile.max_sample - profile.min_sample,
                AreaBase::FromZero => profile.max_sample,
            };
            if normalized_area(profile) > params.area_frac * width {
                SegmentType::Type0
            } else {
                SegmentType::Type2
            }
        }
    }
}

/// Profile, peaks and type in one call.
pub fn classify(seg: &Segment, params: &PipelineParams) -> (SegmentType, PeakSet) {
    let profile = cumulative_profile(seg, params.c_grid_step, params.gradient_half_span);
    let peaks = find_prominent_peaks(&profile, params);
    (classify_segment(&profile, &peaks, params), peaks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::vec;

    fn p() -> PipelineParams {
        PipelineParams::default()
    }

    fn seg(samples: Vec<f64>) -> Segment {
        Segment::new(0, samples)
    }

    /// f(c) by direct counting.
    fn brute_f(samples: &[f64], c: f64) -> usize {
        let mut n = 0;
        for &s in samples {
            if s > c {
                n += 1;
            }
        }
        n
    }

    /// Deterministic small jitter in [0, amp).
    fn jitter(i: usize, amp: f64) -> f64 {
        ((i * 7919 + 13) % 97) as f64 / 97.0 * amp
    }

    #[test]
    fn square_wave_profile() {
        let s = seg(vec![3.3; 60]);
        let prof = cumulative_profile(&s, 0.05, 0);
        for (c, &f) in prof.grid.iter().zip(&prof.f) {
            assert_eq!(f, if *c < 3.3 { 60 } else { 0 }, "c = {c}");
        }
        assert_eq!(prof.f[0], 60);
        let nonzero: Vec<usize> = (0..prof.g.len()).filter(|&i| prof.g[i] > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((prof.grid[nonzero[0]] - 3.3).abs() <= 0.05 + 1e-12);
        for span in [0, 1, 3] {
            let prof = cumulative_profile(&s, 0.05, span);
            let peaks = find_prominent_peaks(&prof, &p());
            assert_eq!(peaks.len(), 1, "span {span}");
            assert_eq!(classify_segment(&prof, &peaks, &p()), SegmentType::Type1);
        }
    }

    #[test]
    fn endpoints_of_f() {
        let s = seg(vec![2.7, 3.1, 5.9, 4.4]);
        let prof = cumulative_profile(&s, 0.05, 3);
        assert_eq!(prof.f[0], 4);
        let i_max = (0..prof.grid.len()).find(|&i| prof.grid[i] >= 5.9).unwrap();
        assert_eq!(prof.f[i_max], 0);
        assert!(prof.f.windows(2).all(|w| w[0] >= w[1]));
        assert!(prof.g.iter().all(|&v| v >= 0.0));
        let gmax = prof.g_n.iter().copied().fold(0.0, f64::max);
        assert!((gmax - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stacked_levels_show_two_drops() {
        // EV 3.3 kW over 100 minutes with an AC lump adding 2.0 kW for 40.
        let mut v = vec![3.3; 100];
        for x in &mut v[30..70] {
            *x += 2.0;
        }
        let prof = cumulative_profile(&seg(v.clone()), 0.05, 0);
        // Oracle: brute-force drops of f between consecutive grid points.
        let drops: Vec<f64> = prof
            .grid
            .windows(2)
            .filter(|w| brute_f(&v, w[0]) > brute_f(&v, w[1]))
            .map(|w| w[1])
            .collect();
        assert_eq!(drops.len(), 2);
        assert!((drops[0] - 3.3).abs() <= 0.05 + 1e-9);
        assert!((drops[1] - 5.3).abs() <= 0.05 + 1e-9);
        for &d in &drops {
            let i = prof.grid.iter().position(|&c| c == d).unwrap() - 1;
            assert!(prof.g[i] > 0.0);
        }
    }

    #[test]
    fn two_distant_levels_give_two_peaks() {
        let mut v: Vec<f64> = (0..90).map(|i| 3.3 + jitter(i, 0.2)).collect();
        for (k, x) in v[20..50].iter_mut().enumerate() {
            *x = 6.0 + jitter(k + 500, 0.2);
        }
        let prof = cumulative_profile(&seg(v.clone()), 0.05, 3);
        for (c, &f) in prof.grid.iter().zip(&prof.f) {
            assert_eq!(f, brute_f(&v, *c));
        }
        let peaks = find_prominent_peaks(&prof, &p());
        assert_eq!(peaks.len(), 2);
        assert!((peaks.peaks[0].position - 3.4).abs() < 0.3);
        assert!((peaks.peaks[1].position - 6.1).abs() < 0.3);
        assert_eq!(classify_segment(&prof, &peaks, &p()), SegmentType::Type2);
    }

    #[test]
    fn close_levels_merge() {
        let mut v = vec![3.3; 90];
        for x in &mut v[20..50] {
            *x = 4.3;
        }
        let prof = cumulative_profile(&seg(v), 0.05, 3);
        assert_eq!(find_prominent_peaks(&prof, &p()).len(), 1);
    }

    #[test]
    fn ev_under_spike_train_is_type2() {
        // 150 minutes at 3.3 kW, 8-minute AC spikes of 3.0 kW every 20.
        let v: Vec<f64> = (0..150)
            .map(|i| {
                let base = 3.3 + jitter(i, 0.15);
                if i % 20 < 8 { base + 3.0 } else { base }
            })
            .collect();
        let (kind, peaks) = classify(&seg(v), &p());
        assert_eq!(peaks.len(), 2);
        assert_eq!(kind, SegmentType::Type2);
    }

    #[test]
    fn ramping_dryer_is_type0() {
        // Heater ramp from 2.5 kW to 7 kW over 40 minutes.
        let v: Vec<f64> = (0..40).map(|i| 2.5 + 4.5 * i as f64 / 39.0 + jitter(i, 0.2)).collect();
        let (kind, peaks) = classify(&seg(v), &p());
        assert!(peaks.len() >= 2);
        assert_eq!(kind, SegmentType::Type0);
    }

    #[test]
    fn area_base_from_zero_is_stricter() {
        // EV at 3.3 kW fully covered by a dryer ramping from 2.0 to 5.2 kW.
        let v: Vec<f64> = (0..45).map(|i| 5.3 + 3.2 * i as f64 / 44.0 + jitter(i, 0.2)).collect();
        let s = seg(v);
        assert_eq!(classify(&s, &p()).0, SegmentType::Type0);
        let from_zero = PipelineParams { area_base: AreaBase::FromZero, ..p() };
        assert_eq!(classify(&s, &from_zero).0, SegmentType::Type2);
    }

    #[test]
    fn plateau_maxima() {
        assert_eq!(local_maxima(&[0.0, 1.0, 1.0, 1.0, 0.0]), vec![2]);
        assert_eq!(local_maxima(&[0.0, 1.0, 2.0, 2.0]), vec![2]);
        assert_eq!(local_maxima(&[3.0, 1.0, 2.0, 0.0]), vec![0, 2]);
        assert!(local_maxima(&[0.0, 0.0]).is_empty());
        // A shoulder is not a peak.
        assert_eq!(local_maxima(&[0.0, 1.0, 1.0, 2.0, 0.0]), vec![3]);
    }

    proptest! {
        #[test]
        fn f_matches_brute_force(
            v in prop::collection::vec(0.01f64..12.0, 1..150),
            step in 0.01f64..0.5,
            span in 0usize..5,
        ) {
            let prof = cumulative_profile(&seg(v.clone()), step, span);
            prop_assert_eq!(prof.grid.len(), prof.f.len());
            for (c, &f) in prof.grid.iter().zip(&prof.f) {
                prop_assert_eq!(f, brute_f(&v, *c));
            }
            prop_assert_eq!(prof.f[0], v.len());
            prop_assert_eq!(*prof.f.last().unwrap(), 0);
            prop_assert!(prof.g.iter().all(|&x| x >= 0.0));
        }

        #[test]
        fn classification_ignores_time_order(v in prop::collection::vec(2.5f64..10.0, 1..120)) {
            let fwd = classify(&seg(v.clone()), &p());
            let mut r = v.clone();
            r.reverse();
            prop_assert_eq!(fwd, classify(&seg(r), &p()));
        }

        #[test]
        fn peaks_respect_distance_and_height(v in prop::collection::vec(2.5f64..10.0, 1..120)) {
            let prof = cumulative_profile(&seg(v), 0.05, 3);
            let peaks = find_prominent_peaks(&prof, &p());
            let gmax = prof.g.iter().copied().fold(0.0, f64::max);
            for (i, a) in peaks.peaks.iter().enumerate() {
                prop_assert!(a.height > 0.2 * gmax);
                for b in &peaks.peaks[i + 1..] {
                    prop_assert!((a.position - b.position).abs() > 2.0);
                }
            }
        }

        #[test]
        fn small_shift_keeps_peak_count(delta in 0.0f64..0.05) {
            let mut v = vec![3.3; 80];
            for x in &mut v[10..40] {
                *x = 6.5;
            }
            let base = find_prominent_peaks(&cumulative_profile(&seg(v.clone()), 0.05, 3), &p());
            let shifted: Vec<f64> = v.iter().map(|x| x + delta).collect();
            let moved = find_prominent_peaks(&cumulative_profile(&seg(shifted), 0.05, 3), &p());
            prop_assert_eq!(base.len(), moved.len());
            for (a, b) in base.peaks.iter().zip(&moved.peaks) {
                prop_assert!((b.position - a.position).abs() <= 0.05 + 1e-9);
            }
        }
    }
}
