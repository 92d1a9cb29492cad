//! Seeded synthetic households with per-appliance ground truth.
//!
//! A day is the sum of four channels: EV charging (ideal square waves),
//! air conditioning (a spike train whose spike length swells towards late
//! afternoon, plus slowly fluctuating lumps), a dryer/oven and a noise
//! floor. All randomness comes from one `u64` seed: ChaCha stream 0 draws
//! month-level values, stream `d + 1` draws day `d`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{parse_bool, parse_entries, parse_value, unknown_key, Entry};
use crate::error::{Error, Result};
use crate::model::{EvEvent, PowerSeries};
use crate::time::Timestamp;

pub const DAY: usize = 1440;

/// Closed interval, written `lo..hi` in config text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    pub lo: T,
    pub hi: T,
}

impl<T> Bounds<T> {
    pub const fn new(lo: T, hi: T) -> Self {
        Bounds { lo, hi }
    }
}

impl<T: FromStr> FromStr for Bounds<T> {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        let (a, b) = s.split_once("..").ok_or(())?;
        Ok(Bounds { lo: a.trim().parse().map_err(|_| ())?, hi: b.trim().parse().map_err(|_| ())? })
    }
}

impl<T: fmt::Display> fmt::Display for Bounds<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// `(start minute within the day, duration)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub duration: usize,
}

impl Span {
    pub fn end(&self) -> usize {
        self.start + self.duration
    }
}

fn parse_spans(entry: &Entry<'_>) -> Result<Vec<Span>> {
    let bad = || Error::Config {
        line: entry.line,
        message: format!("invalid span list `{}` for `{}`, expected start:duration,...", entry.value, entry.key),
    };
    entry
        .value
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(bad)?;
            Ok(Span {
                start: a.trim().parse().map_err(|_| bad())?,
                duration: b.trim().parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

fn spans_to_string(spans: &[Span]) -> String {
    spans.iter().map(|s| format!("{}:{}", s.start, s.duration)).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    CleanEv,
    SpikeTrain,
    LumpOverlap,
    DryerOverlap,
    Fig2,
}

impl Preset {
    pub const ALL: [Preset; 5] =
        [Preset::CleanEv, Preset::SpikeTrain, Preset::LumpOverlap, Preset::DryerOverlap, Preset::Fig2];

    pub fn name(self) -> &'static str {
        match self {
            Preset::CleanEv => "clean-ev",
            Preset::SpikeTrain => "spike-train",
            Preset::LumpOverlap => "lump-overlap",
            Preset::DryerOverlap => "dryer-overlap",
            Preset::Fig2 => "fig2",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn spec(self, seed: u64) -> ScenarioSpec {
        let base = ScenarioSpec { seed, ..ScenarioSpec::default() };
        match self {
            Preset::CleanEv => base,
            Preset::SpikeTrain => ScenarioSpec {
                ev_fixed: vec![Span { start: 510, duration: 40 }, Span { start: 1150, duration: 120 }],
                ev_start_jitter: 20,
                ac_train: true,
                ac_spike_amp: Bounds::new(2.8, 4.0),
                ..base
            },
            Preset::LumpOverlap => ScenarioSpec {
                ev_duration: Bounds::new(60, 120),
                ev_on_lump: true,
                ac_train: true,
                ac_train_span: Bounds::new(0, 360),
                ac_spike_amp: Bounds::new(2.8, 4.0),
                ac_lumps: 1,
                ac_lump_amp: Bounds::new(2.6, 3.0),
                ac_lump_duration: Bounds::new(300, 400),
                ac_lump_start: Bounds::new(420, 1040),
                ..base
            },
            Preset::DryerOverlap => ScenarioSpec {
                ev_fixed: vec![Span { start: 480, duration: 90 }, Span { start: 1140, duration: 45 }],
                ev_start_jitter: 30,
                ev_duration_jitter: 15,
                dryers: 1,
                dryer_on_ev: true,
                ..base
            },
            Preset::Fig2 => ScenarioSpec {
                ev_amp: Bounds::new(3.6, 3.6),
                ev_fixed: vec![Span { start: 300, duration: 80 }, Span { start: 820, duration: 120 }],
                ev_start_jitter: 15,
                ac_train: true,
                ac_train_span: Bounds::new(0, 700),
                ac_spike_amp: Bounds::new(2.8, 4.0),
                ac_lump_fixed: vec![Span { start: 700, duration: 300 }, Span { start: 1030, duration: 170 }],
                ac_lump_amp: Bounds::new(2.6, 2.9),
                dryers: 1,
                dryer_start: Bounds::new(1250, 1300),
                ..base
            },
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scenario description. Minute fields are offsets within a day.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub start: Timestamp,
    /// Noise is i.i.d. uniform on `[0, noise_max]` kW.
    pub noise_max: f64,

    pub ev_enabled: bool,
    /// Amplitude drawn once per generated month.
    pub ev_amp: Bounds<f64>,
    /// Random sessions per day, used when `ev_fixed` is empty.
    pub ev_sessions: usize,
    pub ev_duration: Bounds<usize>,
    pub ev_start: Bounds<usize>,
    /// Fixed sessions; overrides the random ones.
    pub ev_fixed: Vec<Span>,
    pub ev_start_jitter: usize,
    pub ev_duration_jitter: usize,
    /// Place random sessions inside the first lump of the day.
    pub ev_on_lump: bool,

    pub ac_train: bool,
    pub ac_train_span: Bounds<usize>,
    /// Range of the compressor level, drawn once per day.
    pub ac_spike_amp: Bounds<f64>,
    /// Per-spike deviation from the day's level, uniform in `±spread`.
    pub ac_spike_amp_spread: f64,
    /// Spike length at night and early morning.
    pub ac_spike_dur_base: f64,
    /// Spike length at `ac_peak_minute`.
    pub ac_spike_dur_peak: f64,
    pub ac_rise_minute: usize,
    pub ac_peak_minute: usize,
    /// Off time after a spike as a multiple of its length.
    pub ac_off_ratio: Bounds<f64>,
    /// Relative spread of individual spike lengths.
    pub ac_dur_jitter: f64,

    pub ac_lumps: usize,
    pub ac_lump_fixed: Vec<Span>,
    pub ac_lump_amp: Bounds<f64>,
    pub ac_lump_duration: Bounds<usize>,
    pub ac_lump_start: Bounds<usize>,
    /// Amplitude of the slow sinusoidal wobble on a lump.
    pub ac_lump_fluct: f64,

    pub dryers: usize,
    pub dryer_base: Bounds<f64>,
    pub dryer_peak: Bounds<f64>,
    pub dryer_duration: Bounds<usize>,
    pub dryer_start: Bounds<usize>,
    /// Linear ramp from base to peak; otherwise flat at peak.
    pub dryer_ramp: bool,
    /// The last EV session of the day gets a dryer of identical span.
    pub dryer_on_ev: bool,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            seed: 0,
            start: Timestamp::from_civil(2013, 7, 1, 0, 0),
            noise_max: 0.3,
            ev_enabled: true,
            ev_amp: Bounds::new(3.0, 4.0),
            ev_sessions: 1,
            ev_duration: Bounds::new(30, 200),
            ev_start: Bounds::new(0, DAY),
            ev_fixed: Vec::new(),
            ev_start_jitter: 0,
            ev_duration_jitter: 0,
            ev_on_lump: false,
            ac_train: false,
            ac_train_span: Bounds::new(0, DAY),
            ac_spike_amp: Bounds::new(2.0, 4.0),
            ac_spike_amp_spread: 0.2,
            ac_spike_dur_base: 3.0,
            ac_spike_dur_peak: 30.0,
            ac_rise_minute: 360,
            ac_peak_minute: 1020,
            ac_off_ratio: Bounds::new(0.8, 1.5),
            ac_dur_jitter: 0.15,
            ac_lumps: 0,
            ac_lump_fixed: Vec::new(),
            ac_lump_amp: Bounds::new(1.0, 3.0),
            ac_lump_duration: Bounds::new(100, 400),
            ac_lump_start: Bounds::new(600, 1000),
            ac_lump_fluct: 0.1,
            dryers: 0,
            dryer_base: Bounds::new(1.5, 2.5),
            dryer_peak: Bounds::new(6.0, 7.5),
            dryer_duration: Bounds::new(15, 60),
            dryer_start: Bounds::new(0, DAY),
            dryer_ramp: true,
            dryer_on_ev: false,
        }
    }
}

fn bad_bounds(entry: &Entry<'_>) -> Error {
    Error::Config {
        line: entry.line,
        message: format!("invalid range `{}` for `{}`, expected lo..hi", entry.value, entry.key),
    }
}

fn bounds<T: FromStr>(entry: &Entry<'_>) -> Result<Bounds<T>> {
    entry.value.parse().map_err(|_| bad_bounds(entry))
}

impl ScenarioSpec {
    /// Applies one entry. `preset = name` replaces every field except the
    /// seed, so it belongs on the first line.
    pub fn apply(&mut self, entry: &Entry<'_>) -> Result<()> {
        match entry.key {
            "preset" => {
                let p = Preset::from_name(entry.value).ok_or_else(|| Error::Config {
                    line: entry.line,
                    message: format!("unknown preset `{}`", entry.value),
                })?;
                *self = p.spec(self.seed);
            }
            "seed" => self.seed = parse_value(entry)?,
            "start" => {
                self.start = entry.value.parse().map_err(|e: crate::time::ParseTimestampError| {
                    Error::Config { line: entry.line, message: e.to_string() }
                })?
            }
            "noise_max" => self.noise_max = parse_value(entry)?,
            "ev_enabled" => self.ev_enabled = parse_bool(entry)?,
            "ev_amp" => self.ev_amp = bounds(entry)?,
            "ev_sessions" => self.ev_sessions = parse_value(entry)?,
            "ev_duration" => self.ev_duration = bounds(entry)?,
            "ev_start" => self.ev_start = bounds(entry)?,
            "ev_fixed" => self.ev_fixed = parse_spans(entry)?,
            "ev_start_jitter" => self.ev_start_jitter = parse_value(entry)?,
            "ev_duration_jitter" => self.ev_duration_jitter = parse_value(entry)?,
            "ev_on_lump" => self.ev_on_lump = parse_bool(entry)?,
            "ac_train" => self.ac_train = parse_bool(entry)?,
            "ac_train_span" => self.ac_train_span = bounds(entry)?,
            "ac_spike_amp" => self.ac_spike_amp = bounds(entry)?,
            "ac_spike_amp_spread" => self.ac_spike_amp_spread = parse_value(entry)?,
            "ac_spike_dur_base" => self.ac_spike_dur_base = parse_value(entry)?,
            "ac_spike_dur_peak" => self.ac_spike_dur_peak = parse_value(entry)?,
            "ac_rise_minute" => self.ac_rise_minute = parse_value(entry)?,
            "ac_peak_minute" => self.ac_peak_minute = parse_value(entry)?,
            "ac_off_ratio" => self.ac_off_ratio = bounds(entry)?,
            "ac_dur_jitter" => self.ac_dur_jitter = parse_value(entry)?,
            "ac_lumps" => self.ac_lumps = parse_value(entry)?,
            "ac_lump_fixed" => self.ac_lump_fixed = parse_spans(entry)?,
            "ac_lump_amp" => self.ac_lump_amp = bounds(entry)?,
            "ac_lump_duration" => self.ac_lump_duration = bounds(entry)?,
            "ac_lump_start" => self.ac_lump_start = bounds(entry)?,
            "ac_lump_fluct" => self.ac_lump_fluct = parse_value(entry)?,
            "dryers" => self.dryers = parse_value(entry)?,
            "dryer_base" => self.dryer_base = bounds(entry)?,
            "dryer_peak" => self.dryer_peak = bounds(entry)?,
            "dryer_duration" => self.dryer_duration = bounds(entry)?,
            "dryer_start" => self.dryer_start = bounds(entry)?,
            "dryer_ramp" => self.dryer_ramp = parse_bool(entry)?,
            "dryer_on_ev" => self.dryer_on_ev = parse_bool(entry)?,
            _ => return Err(unknown_key(entry)),
        }
        Ok(())
    }

    pub fn from_config(text: &str) -> Result<Self> {
        let mut spec = ScenarioSpec::default();
        for entry in parse_entries(text)? {
            spec.apply(&entry)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_config(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        put("seed", self.seed.to_string());
        put("start", self.start.to_string());
        put("noise_max", self.noise_max.to_string());
        put("ev_enabled", self.ev_enabled.to_string());
        put("ev_amp", self.ev_amp.to_string());
        put("ev_sessions", self.ev_sessions.to_string());
        put("ev_duration", self.ev_duration.to_string());
        put("ev_start", self.ev_start.to_string());
        put("ev_fixed", spans_to_string(&self.ev_fixed));
        put("ev_start_jitter", self.ev_start_jitter.to_string());
        put("ev_duration_jitter", self.ev_duration_jitter.to_string());
        put("ev_on_lump", self.ev_on_lump.to_string());
        put("ac_train", self.ac_train.to_string());
        put("ac_train_span", self.ac_train_span.to_string());
        put("ac_spike_amp", self.ac_spike_amp.to_string());
        put("ac_spike_amp_spread", self.ac_spike_amp_spread.to_string());
        put("ac_spike_dur_base", self.ac_spike_dur_base.to_string());
        put("ac_spike_dur_peak", self.ac_spike_dur_peak.to_string());
        put("ac_rise_minute", self.ac_rise_minute.to_string());
        put("ac_peak_minute", self.ac_peak_minute.to_string());
        put("ac_off_ratio", self.ac_off_ratio.to_string());
        put("ac_dur_jitter", self.ac_dur_jitter.to_string());
        put("ac_lumps", self.ac_lumps.to_string());
        put("ac_lump_fixed", spans_to_string(&self.ac_lump_fixed));
        put("ac_lump_amp", self.ac_lump_amp.to_string());
        put("ac_lump_duration", self.ac_lump_duration.to_string());
        put("ac_lump_start", self.ac_lump_start.to_string());
        put("ac_lump_fluct", self.ac_lump_fluct.to_string());
        put("dryers", self.dryers.to_string());
        put("dryer_base", self.dryer_base.to_string());
        put("dryer_peak", self.dryer_peak.to_string());
        put("dryer_duration", self.dryer_duration.to_string());
        put("dryer_start", self.dryer_start.to_string());
        put("dryer_ramp", self.dryer_ramp.to_string());
        put("dryer_on_ev", self.dryer_on_ev.to_string());
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, message: &str| {
            Err(Error::InvalidParameter { name, message: message.into() })
        };
        let ordered_f = |b: Bounds<f64>| b.lo.is_finite() && b.hi.is_finite() && 0.0 <= b.lo && b.lo <= b.hi;
        let ordered_m = |b: Bounds<usize>| b.lo <= b.hi && b.hi <= DAY;
        if !(self.noise_max.is_finite() && self.noise_max >= 0.0) {
            return bad("noise_max", "must be finite and non-negative");
        }
        for (name, b) in [
            ("ev_amp", self.ev_amp),
            ("ac_spike_amp", self.ac_spike_amp),
            ("ac_lump_amp", self.ac_lump_amp),
            ("ac_off_ratio", self.ac_off_ratio),
            ("dryer_base", self.dryer_base),
            ("dryer_peak", self.dryer_peak),
        ] {
            if !ordered_f(b) {
                return bad(name, "needs finite 0 <= lo <= hi");
            }
        }
        for (name, b) in [
            ("ev_duration", self.ev_duration),
            ("ev_start", self.ev_start),
            ("ac_train_span", self.ac_train_span),
            ("ac_lump_duration", self.ac_lump_duration),
            ("ac_lump_start", self.ac_lump_start),
            ("dryer_duration", self.dryer_duration),
            ("dryer_start", self.dryer_start),
        ] {
            if !ordered_m(b) {
                return bad(name, "needs lo <= hi <= 1440");
            }
        }
        if self.ev_duration.lo == 0 {
            return bad("ev_duration", "must be at least one minute");
        }
        if self.ev_fixed.iter().chain(&self.ac_lump_fixed).any(|s| s.duration == 0 || s.end() > DAY) {
            return bad("ev_fixed", "fixed spans must be non-empty and end within the day");
        }
        if !(self.ac_spike_dur_base >= 1.0 && self.ac_spike_dur_peak >= self.ac_spike_dur_base) {
            return bad("ac_spike_dur_peak", "needs 1 <= base <= peak");
        }
        if !(self.ac_rise_minute < self.ac_peak_minute && self.ac_peak_minute < DAY) {
            return bad("ac_peak_minute", "needs rise < peak < 1440");
        }
        if !(0.0..1.0).contains(&self.ac_dur_jitter) {
            return bad("ac_dur_jitter", "must be in [0, 1)");
        }
        if !(self.ac_spike_amp_spread.is_finite() && self.ac_spike_amp_spread >= 0.0) {
            return bad("ac_spike_amp_spread", "must be finite and non-negative");
        }
        if !(self.ac_lump_fluct.is_finite() && self.ac_lump_fluct >= 0.0) {
            return bad("ac_lump_fluct", "must be finite and non-negative");
        }
        Ok(())
    }

    /// Spike length the train aims for at `minute` of the day: flat at the
    /// base overnight, rising smoothly to the peak, then easing back by
    /// midnight.
    pub fn spike_duration_profile(&self, minute: usize) -> f64 {
        let (rise, peak) = (self.ac_rise_minute as f64, self.ac_peak_minute as f64);
        let t = minute as f64;
        let w = if t <= rise {
            0.0
        } else if t <= peak {
            0.5 * (1.0 - libm::cos(core::f64::consts::PI * (t - rise) / (peak - rise)))
        } else {
            0.5 * (1.0 + libm::cos(core::f64::consts::PI * (t - peak) / (DAY as f64 - peak)))
        };
        self.ac_spike_dur_base + (self.ac_spike_dur_peak - self.ac_spike_dur_base) * w
    }
}

/// Generated trace with every channel and the ground-truth annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub aggregate: PowerSeries,
    pub ev: PowerSeries,
    pub ac: PowerSeries,
    pub dryer: PowerSeries,
    pub noise: PowerSeries,
    /// Sample indices relative to the start of the scenario.
    pub ev_sessions: Vec<EvEvent>,
    pub ac_spikes: Vec<Span>,
    pub ac_lumps: Vec<Span>,
    /// Preset used for each day, when the scenario mixes presets.
    pub day_presets: Vec<Preset>,
}

impl Scenario {
    pub fn channels(&self) -> [(&'static str, &PowerSeries); 4] {
        [("ev", &self.ev), ("ac", &self.ac), ("dryer", &self.dryer), ("noise", &self.noise)]
    }
}

#[derive(Default)]
struct Buffers {
    ev: Vec<f64>,
    ac: Vec<f64>,
    dryer: Vec<f64>,
    noise: Vec<f64>,
    ev_sessions: Vec<EvEvent>,
    ac_spikes: Vec<Span>,
    ac_lumps: Vec<Span>,
    day_presets: Vec<Preset>,
}

impl Buffers {
    fn finish(self, start: Timestamp) -> Scenario {
        let aggregate: Vec<f64> = (0..self.ev.len())
            .map(|i| self.ev[i] + self.ac[i] + self.dryer[i] + self.noise[i])
            .collect();
        let series = |v: Vec<f64>| PowerSeries::new(start, v).expect("generated channels are valid");
        Scenario {
            aggregate: series(aggregate),
            ev: series(self.ev),
            ac: series(self.ac),
            dryer: series(self.dryer),
            noise: series(self.noise),
            ev_sessions: self.ev_sessions,
            ac_spikes: self.ac_spikes,
            ac_lumps: self.ac_lumps,
            day_presets: self.day_presets,
        }
    }
}

fn stream(seed: u64, n: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n);
    rng
}

fn uniform(rng: &mut ChaCha8Rng, b: Bounds<f64>) -> f64 {
    if b.hi > b.lo {
        rng.gen_range(b.lo..b.hi)
    } else {
        b.lo
    }
}

fn uniform_int(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

fn jitter(rng: &mut ChaCha8Rng, value: usize, by: usize) -> usize {
    if by == 0 {
        value
    } else {
        (value + uniform_int(rng, 0, 2 * by)).saturating_sub(by)
    }
}

/// One day of channels appended to `out`; `base` is the day's first index.
fn generate_day_into(spec: &ScenarioSpec, ev_amp: f64, rng: &mut ChaCha8Rng, out: &mut Buffers) {
    let base = out.ev.len();
    let mut ev = vec![0.0; DAY];
    let mut ac = vec![0.0; DAY];
    let mut dryer = vec![0.0; DAY];

    // Lumps come first so that EV sessions can sit on them and the spike
    // train can avoid them.
    let mut lumps: Vec<Span> = spec.ac_lump_fixed.clone();
    for _ in 0..spec.ac_lumps {
        let duration = uniform_int(rng, spec.ac_lump_duration.lo, spec.ac_lump_duration.hi);
        let latest = spec.ac_lump_start.hi.min(DAY - duration.min(DAY));
        let start = uniform_int(rng, spec.ac_lump_start.lo.min(latest), latest);
        lumps.push(Span { start, duration });
    }
    for lump in &lumps {
        let amp = uniform(rng, spec.ac_lump_amp);
        let period = rng.gen_range(60.0..120.0);
        let phase = rng.gen_range(0.0..core::f64::consts::TAU);
        for t in lump.start..lump.end().min(DAY) {
            let wobble = libm::sin(core::f64::consts::TAU * t as f64 / period + phase);
            ac[t] = (amp + spec.ac_lump_fluct * wobble).max(0.0);
        }
    }

    let mut sessions: Vec<Span> = Vec::new();
    if spec.ev_enabled {
        if !spec.ev_fixed.is_empty() {
            for s in &spec.ev_fixed {
                let duration = jitter(rng, s.duration, spec.ev_duration_jitter).max(1);
                let start = jitter(rng, s.start, spec.ev_start_jitter).min(DAY - duration.min(DAY));
                sessions.push(Span { start, duration });
            }
        } else if spec.ev_on_lump && !lumps.is_empty() {
            let lump = lumps[0];
            let duration = uniform_int(rng, spec.ev_duration.lo, spec.ev_duration.hi)
                .min(lump.duration.saturating_sub(20))
                .max(1);
            let lo = lump.start + 10;
            let hi = (lump.end().min(DAY)).saturating_sub(duration + 10).max(lo);
            sessions.push(Span { start: uniform_int(rng, lo, hi), duration });
        } else if spec.ev_sessions > 0 {
            // One session per equal slot keeps sessions disjoint.
            let width = (spec.ev_start.hi - spec.ev_start.lo) / spec.ev_sessions;
            for k in 0..spec.ev_sessions {
                let slot_lo = spec.ev_start.lo + k * width;
                let duration =
                    uniform_int(rng, spec.ev_duration.lo, spec.ev_duration.hi).min(width).max(1);
                let start = uniform_int(rng, slot_lo, slot_lo + width - duration);
                sessions.push(Span { start, duration });
            }
        }
        sessions.sort_by_key(|s| s.start);
        // Jitter may push fixed sessions into each other.
        for i in 1..sessions.len() {
            let prev_end = sessions[i - 1].end();
            if sessions[i].start < prev_end {
                let shift = prev_end - sessions[i].start;
                sessions[i].start = prev_end;
                sessions[i].duration = sessions[i].duration.saturating_sub(shift).max(1);
            }
        }
        sessions.retain(|s| s.end() <= DAY);
        for s in &sessions {
            ev[s.start..s.end()].fill(ev_amp);
            out.ev_sessions.push(EvEvent { start: base + s.start, duration: s.duration, amplitude: ev_amp });
        }
    }

    if spec.ac_train {
        let in_lump = |t: usize| lumps.iter().any(|l| (l.start..l.end()).contains(&t));
        let level = uniform(rng, spec.ac_spike_amp);
        let spread = spec.ac_spike_amp_spread;
        let mut t = spec.ac_train_span.lo;
        let end = spec.ac_train_span.hi;
        while t < end {
            let target = spec.spike_duration_profile(t);
            let scale = 1.0 + spec.ac_dur_jitter * rng.gen_range(-1.0..1.0);
            let d = (libm::round(target * scale) as usize).max(1);
            let amp = (level + uniform(rng, Bounds::new(-spread, spread))).max(0.0);
            let off = (libm::round(d as f64 * uniform(rng, spec.ac_off_ratio)) as usize).max(1);
            let stop = (t + d).min(end);
            if !(t..stop).any(in_lump) {
                ac[t..stop].fill(amp);
                out.ac_spikes.push(Span { start: base + t, duration: stop - t });
            }
            t = stop + off;
        }
    }
    out.ac_lumps.extend(lumps.iter().map(|l| Span { start: base + l.start, duration: l.duration }));

    let mut dryer_spans = Vec::new();
    if spec.dryer_on_ev {
        if let Some(s) = sessions.last() {
            dryer_spans.push(*s);
        }
    }
    while dryer_spans.len() < spec.dryers {
        let duration = uniform_int(rng, spec.dryer_duration.lo, spec.dryer_duration.hi).max(1);
        let latest = spec.dryer_start.hi.min(DAY - duration.min(DAY));
        let start = uniform_int(rng, spec.dryer_start.lo.min(latest), latest);
        dryer_spans.push(Span { start, duration });
    }
    for s in &dryer_spans {
        let lo = uniform(rng, spec.dryer_base);
        let hi = uniform(rng, spec.dryer_peak);
        let n = s.duration.max(2) - 1;
        for (k, t) in (s.start..s.end().min(DAY)).enumerate() {
            let level = if spec.dryer_ramp { lo + (hi - lo) * k as f64 / n as f64 } else { hi };
            dryer[t] += level;
        }
    }

    let noise: Vec<f64> = (0..DAY)
        .map(|_| if spec.noise_max > 0.0 { rng.gen_range(0.0..=spec.noise_max) } else { 0.0 })
        .collect();

    out.ev.extend(ev);
    out.ac.extend(ac);
    out.dryer.extend(dryer);
    out.noise.extend(noise);
}

pub fn generate_day(spec: &ScenarioSpec) -> Result<Scenario> {
    generate_month(spec, 1)
}

/// `days` consecutive days sharing one EV amplitude.
pub fn generate_month(spec: &ScenarioSpec, days: usize) -> Result<Scenario> {
    spec.validate()?;
    let ev_amp = uniform(&mut stream(spec.seed, 0), spec.ev_amp);
    let mut out = Buffers::default();
    for d in 0..days {
        generate_day_into(spec, ev_amp, &mut stream(spec.seed, d as u64 + 1), &mut out);
    }
    Ok(out.finish(spec.start))
}

/// Days drawn uniformly from every preset, with one shared EV amplitude
/// from the default 3–4 kW range.
pub fn generate_mixed_month(seed: u64, days: usize, start: Timestamp) -> Result<Scenario> {
    let mut month_rng = stream(seed, 0);
    let ev_amp = uniform(&mut month_rng, ScenarioSpec::default().ev_amp);
    let mut out = Buffers::default();
    for d in 0..days {
        let preset = Preset::ALL[month_rng.gen_range(0..Preset::ALL.len())];
        let spec = preset.spec(seed);
        generate_day_into(&spec, ev_amp, &mut stream(seed, d as u64 + 1), &mut out);
        out.day_presets.push(preset);
    }
    Ok(out.finish(start))
}
