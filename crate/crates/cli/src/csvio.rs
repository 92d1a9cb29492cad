//! `timestamp,power_kw` trace files.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use evdisagg_core::{PowerSeries, Timestamp};

use crate::error::{CliError, Result};

pub const HEADER: [&str; 2] = ["timestamp", "power_kw"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Fill gaps of up to this many missing minutes by linear interpolation.
    pub gap_fill: usize,
}

pub fn read_series_file(path: &Path, opts: ReadOptions) -> Result<PowerSeries> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_series(file, path, opts)
}

/// `path` only labels error messages.
pub fn read_series<R: Read>(input: R, path: &Path, opts: ReadOptions) -> Result<PowerSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() != 2 || headers.iter().zip(HEADER).any(|(h, want)| h != want) {
        return Err(CliError::parse(path, 1, "header must be `timestamp,power_kw`"));
    }

    let mut start: Option<Timestamp> = None;
    let mut last: Option<Timestamp> = None;
    let mut values: Vec<f64> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let ts: Timestamp = record[0]
            .parse()
            .map_err(|e| CliError::parse(path, line, format!("bad timestamp `{}`: {e}", &record[0])))?;
        let value: f64 = record[1]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| {
                CliError::parse(path, line, format!("power `{}` is not a finite number >= 0", &record[1]))
            })?;
        if let Some(prev) = last {
            let step = ts.0 - prev.0;
            if step <= 0 {
                return Err(CliError::parse(
                    path,
                    line,
                    format!("timestamp {ts} does not follow {prev}; rows must increase by one minute"),
                ));
            }
            let missing = (step - 1) as usize;
            if missing > opts.gap_fill {
                return Err(CliError::parse(
                    path,
                    line,
                    format!("{missing} missing minute(s) before {ts} (gap fill allows {})", opts.gap_fill),
                ));
            }
            let before = *values.last().expect("previous row");
            for k in 1..=missing {
                values.push(before + (value - before) * k as f64 / step as f64);
            }
        } else {
            start = Some(ts);
        }
        values.push(value);
        last = Some(ts);
    }
    let start = start.ok_or_else(|| CliError::parse(path, 1, "no data rows"))?;
    Ok(PowerSeries::new(start, values)?)
}

fn csv_error(path: &Path, err: csv::Error) -> CliError {
    let line = err.position().map_or(0, |p| p.line() as usize);
    CliError::parse(path, line, err.to_string())
}

/// Six decimal places, one row per minute.
pub fn write_series<W: Write>(out: W, series: &PowerSeries) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for (i, v) in series.values().iter().enumerate() {
        w.write_record([series.time_at(i).to_string(), format!("{v:.6}")])?;
    }
    w.flush()
}

pub fn write_series_file(path: &Path, series: &PowerSeries) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_series(std::io::BufWriter::new(file), series).map_err(|e| CliError::io(path, e))
}
