//! Plain-text `key = value` configuration shared by pipeline parameter
//! files and synthetic scenario specs.
//!
//! One entry per line; `#` starts a comment; blank lines are ignored.
//! Later entries override earlier ones.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{AreaBase, GapReference, PipelineParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry<'a> {
    /// 1-based line number.
    pub line: usize,
    pub key: &'a str,
    pub value: &'a str,
}

pub fn parse_entries(text: &str) -> Result<Vec<Entry<'_>>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config { line, message: "empty key".into() });
        }
        out.push(Entry { line, key, value: value.trim() });
    }
    Ok(out)
}

pub(crate) fn parse_value<T: FromStr>(entry: &Entry<'_>) -> Result<T> {
    entry.value.parse().map_err(|_| Error::Config {
        line: entry.line,
        message: format!("invalid value `{}` for `{}`", entry.value, entry.key),
    })
}

pub(crate) fn parse_bool(entry: &Entry<'_>) -> Result<bool> {
    match entry.value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config {
            line: entry.line,
            message: format!("invalid boolean `{}` for `{}`", entry.value, entry.key),
        }),
    }
}

pub(crate) fn unknown_key(entry: &Entry<'_>) -> Error {
    Error::Config { line: entry.line, message: format!("unknown key `{}`", entry.key) }
}

impl PipelineParams {
    /// Applies one entry; unknown keys are an error.
    pub fn apply(&mut self, entry: &Entry<'_>) -> Result<()> {
        match entry.key {
            "t_low_floor" => self.t_low_floor = parse_value(entry)?,
            "t_low_mass_cut" => self.t_low_mass_cut = parse_value(entry)?,
            "t_seed" => self.t_seed = parse_value(entry)?,
            "eta" => self.eta = parse_value(entry)?,
            "gap_factor" => self.gap_factor = parse_value(entry)?,
            "t_spike" => self.t_spike = parse_value(entry)?,
            "gap_reference" => {
                self.gap_reference = match entry.value {
                    "current" => GapReference::Current,
                    "seed" => GapReference::Seed,
                    _ => return Err(bad_choice(entry, "current|seed")),
                }
            }
            "n_before" => self.n_before = parse_value(entry)?,
            "n_after" => self.n_after = parse_value(entry)?,
            "c_grid_step" => self.c_grid_step = parse_value(entry)?,
            "gradient_half_span" => self.gradient_half_span = parse_value(entry)?,
            "peak_min_distance" => self.peak_min_distance = parse_value(entry)?,
            "peak_min_height_frac" => self.peak_min_height_frac = parse_value(entry)?,
            "area_frac" => self.area_frac = parse_value(entry)?,
            "area_base" => {
                self.area_base = match entry.value {
                    "sample_range" => AreaBase::SampleRange,
                    "from_zero" => AreaBase::FromZero,
                    _ => return Err(bad_choice(entry, "sample_range|from_zero")),
                }
            }
            "effective_height_width_frac" => self.effective_height_width_frac = parse_value(entry)?,
            "dryer_ev_cut" => self.dryer_ev_cut = parse_value(entry)?,
            "ev_min_amplitude" => self.ev_min_amplitude = parse_value(entry)?,
            "ev_typical_max" => self.ev_typical_max = parse_value(entry)?,
            "max_ev_width" => self.max_ev_width = parse_value(entry)?,
            "t_high_offset" => self.t_high_offset = parse_value(entry)?,
            "min_subsegment_duration" => self.min_subsegment_duration = parse_value(entry)?,
            "census_min_spikes" => self.census_min_spikes = parse_value(entry)?,
            "census_window" => self.census_window = parse_value(entry)?,
            "memory_across_months" => self.memory_across_months = parse_bool(entry)?,
            _ => return Err(unknown_key(entry)),
        }
        Ok(())
    }

    /// Defaults overridden by every entry of `text`, then validated.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut params = PipelineParams::default();
        for entry in parse_entries(text)? {
            params.apply(&entry)?;
        }
        params.validate()?;
        Ok(params)
    }

    /// Serializes every key, in declaration order.
    pub fn to_config(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        put("t_low_floor", self.t_low_floor.to_string());
        put("t_low_mass_cut", self.t_low_mass_cut.to_string());
        put("t_seed", self.t_seed.to_string());
        put("eta", self.eta.to_string());
        put("gap_factor", self.gap_factor.to_string());
        put("t_spike", self.t_spike.to_string());
        put(
            "gap_reference",
            match self.gap_reference {
                GapReference::Current => "current",
                GapReference::Seed => "seed",
            }
            .into(),
        );
        put("n_before", self.n_before.to_string());
        put("n_after", self.n_after.to_string());
        put("c_grid_step", self.c_grid_step.to_string());
        put("gradient_half_span", self.gradient_half_span.to_string());
        put("peak_min_distance", self.peak_min_distance.to_string());
        put("peak_min_height_frac", self.peak_min_height_frac.to_string());
        put("area_frac", self.area_frac.to_string());
        put(
            "area_base",
            match self.area_base {
                AreaBase::SampleRange => "sample_range",
                AreaBase::FromZero => "from_zero",
            }
            .into(),
        );
        put("effective_height_width_frac", self.effective_height_width_frac.to_string());
        put("dryer_ev_cut", self.dryer_ev_cut.to_string());
        put("ev_min_amplitude", self.ev_min_amplitude.to_string());
        put("ev_typical_max", self.ev_typical_max.to_string());
        put("max_ev_width", self.max_ev_width.to_string());
        put("t_high_offset", self.t_high_offset.to_string());
        put("min_subsegment_duration", self.min_subsegment_duration.to_string());
        put("census_min_spikes", self.census_min_spikes.to_string());
        put("census_window", self.census_window.to_string());
        put("memory_across_months", self.memory_across_months.to_string());
        s
    }
}

fn bad_choice(entry: &Entry<'_>, choices: &str) -> Error {
    Error::Config {
        line: entry.line,
        message: format!("`{}` must be one of {choices}, got `{}`", entry.key, entry.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\n eta = 1.5  # inline\nt_seed=25\n";
        let entries = parse_entries(text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0], Entry { line: 3, key: "eta", value: "1.5" });
        let p = PipelineParams::from_config(text).unwrap();
        assert_eq!(p.eta, 1.5);
        assert_eq!(p.t_seed, 25);
        assert_eq!(p.t_spike, 90);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = PipelineParams::from_config("eta = 1.2\nbogus = 3\n").unwrap_err();
        assert_eq!(err, Error::Config { line: 2, message: "unknown key `bogus`".into() });
        let err = PipelineParams::from_config("\n\nt_seed = abc").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }));
        assert!(matches!(
            PipelineParams::from_config("no equals sign").unwrap_err(),
            Error::Config { line: 1, .. }
        ));
    }

    #[test]
    fn to_config_round_trips() {
        let mut p = PipelineParams::default();
        p.gap_reference = GapReference::Seed;
        p.area_base = AreaBase::FromZero;
        p.memory_across_months = true;
        p.eta = 1.37;
        assert_eq!(PipelineParams::from_config(&p.to_config()).unwrap(), p);
    }
}
