//! Monthly energy and waveform errors of an estimate against ground truth.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::PowerSeries;

pub fn energy_kwh(x: &PowerSeries) -> f64 {
    x.energy_kwh()
}

/// Per-month comparison terms.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyEval {
    /// `YYYY-MM`.
    pub month: String,
    pub e_true: f64,
    pub e_est: f64,
    /// Relative energy error, `None` when the month has no true energy.
    pub err1_term: Option<f64>,
    /// Absolute energy error in kWh.
    pub err2_term: f64,
    /// Normalized squared waveform error, `None` when truth is all zero.
    pub mse_term: Option<f64>,
}

impl MonthlyEval {
    pub fn from_samples(month: String, truth: &[f64], est: &[f64]) -> Result<Self> {
        if truth.len() != est.len() {
            return Err(Error::Misaligned(format!(
                "{month}: {} truth samples against {} estimated",
                truth.len(),
                est.len()
            )));
        }
        let e_true = truth.iter().sum::<f64>() / 60.0;
        let e_est = est.iter().sum::<f64>() / 60.0;
        let mut num = 0.0;
        let mut den = 0.0;
        for (t, e) in truth.iter().zip(est) {
            num += (t - e) * (t - e);
            den += t * t;
        }
        let diff = (e_true - e_est).abs();
        Ok(MonthlyEval {
            month,
            e_true,
            e_est,
            err1_term: (e_true > 0.0).then(|| diff / e_true),
            err2_term: diff,
            mse_term: (den > 0.0).then(|| num / den),
        })
    }
}

/// Splits two aligned series at calendar-month boundaries and scores each
/// month.
pub fn monthly_evals(truth: &PowerSeries, est: &PowerSeries) -> Result<Vec<MonthlyEval>> {
    if truth.start() != est.start() || truth.len() != est.len() {
        return Err(Error::Misaligned(format!(
            "truth starts {} with {} samples, estimate starts {} with {}",
            truth.start(),
            truth.len(),
            est.start(),
            est.len()
        )));
    }
    let mut out = Vec::new();
    let mut lo = 0;
    while lo < truth.len() {
        let t = truth.time_at(lo);
        let edge = (t.start_of_next_month().0 - truth.start().0) as usize;
        let hi = edge.min(truth.len());
        let (y, m) = t.month_key();
        out.push(MonthlyEval::from_samples(
            format!("{y:04}-{m:02}"),
            &truth.values()[lo..hi],
            &est.values()[lo..hi],
        )?);
        lo = hi;
    }
    Ok(out)
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::Empty("month list"));
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Ok(MeanStd { mean, std: libm::sqrt(var) })
    }

    fn scaled(self, k: f64) -> Self {
        MeanStd { mean: self.mean * k, std: self.std * k }
    }
}

fn defined(
    months: &[MonthlyEval],
    metric: &'static str,
    term: impl Fn(&MonthlyEval) -> Option<f64>,
) -> Result<Vec<f64>> {
    let bad: Vec<String> =
        months.iter().filter(|m| term(m).is_none()).map(|m| m.month.clone()).collect();
    if !bad.is_empty() {
        return Err(Error::UndefinedDenominator { metric, months: bad });
    }
    Ok(months.iter().filter_map(term).collect())
}

/// Relative monthly energy error in percent.
pub fn err1_stats(months: &[MonthlyEval]) -> Result<MeanStd> {
    Ok(MeanStd::of(&defined(months, "err1", |m| m.err1_term)?)?.scaled(100.0))
}

/// Absolute monthly energy error in kWh.
pub fn err2_stats(months: &[MonthlyEval]) -> Result<MeanStd> {
    MeanStd::of(&months.iter().map(|m| m.err2_term).collect::<Vec<_>>())
}

pub fn mse_stats(months: &[MonthlyEval]) -> Result<MeanStd> {
    MeanStd::of(&defined(months, "mse", |m| m.mse_term)?)
}

pub fn err1(months: &[MonthlyEval]) -> Result<f64> {
    err1_stats(months).map(|s| s.mean)
}

pub fn err2(months: &[MonthlyEval]) -> Result<f64> {
    err2_stats(months).map(|s| s.mean)
}

pub fn mse(months: &[MonthlyEval]) -> Result<f64> {
    mse_stats(months).map(|s| s.mean)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub months: usize,
    pub err1: MeanStd,
    pub err2: MeanStd,
    pub mse: MeanStd,
}

impl Summary {
    pub fn of(months: &[MonthlyEval]) -> Result<Self> {
        Ok(Summary {
            months: months.len(),
            err1: err1_stats(months)?,
            err2: err2_stats(months)?,
            mse: mse_stats(months)?,
        })
    }

    /// One table row, e.g.
    /// `Total | 12 months | Err1 7.50% ± 1.20% | Err2 15.700 ± 2.100 kWh | MSE 0.190 ± 0.050`.
    pub fn table_row(&self, label: &str) -> String {
        format!(
            "{label} | {} months | Err1 {:.2}% ± {:.2}% | Err2 {:.3} ± {:.3} kWh | MSE {:.3} ± {:.3}",
            self.months,
            self.err1.mean,
            self.err1.std,
            self.err2.mean,
            self.err2.std,
            self.mse.mean,
            self.mse.std
        )
    }
}
