//! Minute-resolution calendar timestamps.
//!
//! Time inside the pipeline is a sample index; the calendar only matters for
//! window boundaries (midnight, first of the month) and for file IO. No time
//! zones: a timestamp is a naive local wall-clock minute.

use core::fmt;
use core::str::FromStr;

pub const MINUTES_PER_DAY: i64 = 1440;

/// Minutes since 1970-01-01T00:00 (naive, proleptic Gregorian).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Timestamp(pub i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Civil {
    pub year: i32,
    pub month: u32,
    pub day: u32,
    pub hour: u32,
    pub minute: u32,
}

impl Timestamp {
    pub fn from_civil(year: i32, month: u32, day: u32, hour: u32, minute: u32) -> Self {
        let days = days_from_civil(year, month, day);
        Timestamp(days * MINUTES_PER_DAY + i64::from(hour) * 60 + i64::from(minute))
    }

    pub fn civil(self) -> Civil {
        let days = self.0.div_euclid(MINUTES_PER_DAY);
        let rem = self.0.rem_euclid(MINUTES_PER_DAY);
        let (year, month, day) = civil_from_days(days);
        Civil { year, month, day, hour: (rem / 60) as u32, minute: (rem % 60) as u32 }
    }

    pub fn plus_minutes(self, minutes: i64) -> Self {
        Timestamp(self.0 + minutes)
    }

    /// The most recent midnight at or before `self`.
    pub fn start_of_day(self) -> Self {
        Timestamp(self.0.div_euclid(MINUTES_PER_DAY) * MINUTES_PER_DAY)
    }

    pub fn start_of_month(self) -> Self {
        let c = self.civil();
        Timestamp::from_civil(c.year, c.month, 1, 0, 0)
    }

    pub fn start_of_next_month(self) -> Self {
        let c = self.civil();
        if c.month == 12 {
            Timestamp::from_civil(c.year + 1, 1, 1, 0, 0)
        } else {
            Timestamp::from_civil(c.year, c.month + 1, 1, 0, 0)
        }
    }

    /// `YYYY-MM` label of the calendar month containing `self`.
    pub fn month_key(self) -> (i32, u32) {
        let c = self.civil();
        (c.year, c.month)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.civil();
        write!(f, "{:04}-{:02}-{:02}T{:02}:{:02}", c.year, c.month, c.day, c.hour, c.minute)
    }
}

// Howard Hinnant's days_from_civil / civil_from_days.
fn days_from_civil(y: i32, m: u32, d: u32) -> i64 {
    let y = i64::from(y) - i64::from(m <= 2);
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let m = i64::from(m);
    let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + i64::from(d) - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn civil_from_days(z: i64) -> (i32, u32, u32) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    ((y + i64::from(m <= 2)) as i32, m, d)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTimestampError;

impl fmt::Display for ParseTimestampError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected a timestamp like 2013-07-01T00:00 (seconds, if present, must be 00)")
    }
}

impl core::error::Error for ParseTimestampError {}

/// Accepts `YYYY-MM-DDTHH:MM`, optionally with `:00` seconds and a space in
/// place of the `T`.
impl FromStr for Timestamp {
    type Err = ParseTimestampError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (date, time) = s
            .split_once('T')
            .or_else(|| s.split_once(' '))
            .ok_or(ParseTimestampError)?;
        let mut d = date.split('-');
        let year: i32 = field(d.next(), 4)?;
        let month: u32 = field(d.next(), 2)?;
        let day: u32 = field(d.next(), 2)?;
        let mut t = time.split(':');
        let hour: u32 = field(t.next(), 2)?;
        let minute: u32 = field(t.next(), 2)?;
        if let Some(sec) = t.next() {
            if field::<u32>(Some(sec), 2)? != 0 {
                return Err(ParseTimestampError);
            }
        }
        if d.next().is_some()
            || t.next().is_some()
            || !(1..=12).contains(&month)
            || day == 0
            || day > days_in_month(year, month)
            || hour > 23
            || minute > 59
        {
            return Err(ParseTimestampError);
        }
        Ok(Timestamp::from_civil(year, month, day, hour, minute))
    }
}

fn field<T: FromStr>(part: Option<&str>, width: usize) -> Result<T, ParseTimestampError> {
    match part {
        Some(p) if p.len() == width && p.bytes().all(|b| b.is_ascii_digit()) => {
            p.parse().map_err(|_| ParseTimestampError)
        }
        _ => Err(ParseTimestampError),
    }
}

fn days_in_month(year: i32, month: u32) -> u32 {
    let next = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
    (days_from_civil(next.0, next.1, 1) - days_from_civil(year, month, 1)) as u32
}
