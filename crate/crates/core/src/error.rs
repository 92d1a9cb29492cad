use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A sample was negative, NaN or infinite.
    InvalidSample { index: usize, value: f64 },
    /// An operation that needs data was handed none.
    Empty(&'static str),
    /// Two events passed to the renderer share at least one sample.
    OverlappingEvents { first: usize, second: usize },
    /// An event extends past the end of the target series.
    EventOutOfRange { start: usize, duration: usize, len: usize },
    /// Ratio metric with a zero denominator; carries the offending month labels.
    UndefinedDenominator { metric: &'static str, months: Vec<String> },
    /// Two series that must share a time grid do not.
    Misaligned(String),
    /// Bad key or value in a key/value config text.
    Config { line: usize, message: String },
    /// A parameter outside its valid domain.
    InvalidParameter { name: &'static str, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSample { index, value } => {
                write!(f, "sample {index} is {value}; power must be finite and non-negative")
            }
            Error::Empty(what) => write!(f, "{what} is empty"),
            Error::OverlappingEvents { first, second } => {
                write!(f, "events {first} and {second} overlap in time")
            }
            Error::EventOutOfRange { start, duration, len } => write!(
                f,
                "event starting at {start} with duration {duration} does not fit in {len} samples"
            ),
            Error::UndefinedDenominator { metric, months } => {
                write!(f, "{metric} is undefined for months with zero ground truth: ")?;
                for (i, m) in months.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(m)?;
                }
                Ok(())
            }
            Error::Misaligned(msg) => write!(f, "series are misaligned: {msg}"),
            Error::Config { line, message } => write!(f, "line {line}: {message}"),
            Error::InvalidParameter { name, message } => write!(f, "parameter {name}: {message}"),
        }
    }
}

impl core::error::Error for Error {}
