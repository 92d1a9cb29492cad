//! JSON reports. Field order is fixed by the struct definitions and every
//! kW/kWh figure is printed with exactly six decimals, so identical inputs
//! give byte-identical files.

use std::collections::BTreeMap;

use evdisagg_core::metrics::{monthly_evals, MeanStd, MonthlyEval, Summary};
use evdisagg_core::model::SegmentType;
use evdisagg_core::{DisaggregationResult, PowerSeries};
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{CliError, Result};

/// A number printed with six decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed(pub f64);

pub fn fixed6(x: f64) -> String {
    // Avoid "-0.000000".
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom("non-finite number in report"));
        }
        RawValue::from_string(fixed6(self.0)).map_err(S::Error::custom)?.serialize(s)
    }
}

#[derive(Debug, Serialize)]
pub struct EventReport {
    pub start: String,
    pub start_index: usize,
    pub duration_min: usize,
    pub amplitude_kw: Fixed,
    pub energy_kwh: Fixed,
}

#[derive(Debug, Serialize)]
pub struct WindowReport {
    pub start: String,
    pub samples: usize,
    pub t_low_kw: Fixed,
    /// Energy of the events reported by this window.
    pub energy_kwh: Fixed,
    pub events: Vec<EventReport>,
    pub segment_types: BTreeMap<&'static str, usize>,
    pub decisions: BTreeMap<&'static str, usize>,
}

#[derive(Debug, Serialize)]
pub struct MonthReport {
    pub month: String,
    pub e_true_kwh: Fixed,
    pub e_est_kwh: Fixed,
    pub err1_pct: Option<Fixed>,
    pub err2_kwh: Fixed,
    pub mse: Option<Fixed>,
}

#[derive(Debug, Serialize)]
pub struct Spread {
    pub mean: Fixed,
    pub std: Fixed,
}

impl From<MeanStd> for Spread {
    fn from(m: MeanStd) -> Self {
        Spread { mean: Fixed(m.mean), std: Fixed(m.std) }
    }
}

#[derive(Debug, Serialize)]
pub struct TotalReport {
    pub months: usize,
    pub err1_pct: Spread,
    pub err2_kwh: Spread,
    pub mse: Spread,
}

#[derive(Debug, Serialize)]
pub struct EvaluationReport {
    pub months: Vec<MonthReport>,
    pub total: TotalReport,
    /// One line in the layout of a results table row.
    pub table_row: String,
}

#[derive(Debug, Serialize)]
pub struct DisaggregationReport {
    pub start: String,
    pub samples: usize,
    pub window: String,
    pub boundary: String,
    pub event_count: usize,
    pub total_energy_kwh: Fixed,
    pub segment_types: BTreeMap<&'static str, usize>,
    pub decisions: BTreeMap<&'static str, usize>,
    pub windows: Vec<WindowReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<EvaluationReport>,
}

fn type_name(t: Option<SegmentType>) -> &'static str {
    match t {
        Some(SegmentType::Type0) => "type0",
        Some(SegmentType::Type1) => "type1",
        Some(SegmentType::Type2) => "type2",
        None => "unclassified",
    }
}

fn window_report(x: &PowerSeries, r: &DisaggregationResult) -> WindowReport {
    let mut segment_types = BTreeMap::new();
    let mut decisions = BTreeMap::new();
    for d in &r.diagnostics {
        *segment_types.entry(type_name(d.kind)).or_insert(0) += 1;
        *decisions.entry(d.decision.name()).or_insert(0) += 1;
    }
    WindowReport {
        start: x.time_at(r.offset).to_string(),
        samples: r.estimated_series.len(),
        t_low_kw: Fixed(r.t_low),
        energy_kwh: Fixed(r.energy_kwh()),
        events: r
            .events
            .iter()
            .map(|e| EventReport {
                start: x.time_at(e.start).to_string(),
                start_index: e.start,
                duration_min: e.duration,
                amplitude_kw: Fixed(e.amplitude),
                energy_kwh: Fixed(e.energy_kwh()),
            })
            .collect(),
        segment_types,
        decisions,
    }
}

pub fn disaggregation_report(
    x: &PowerSeries,
    results: &[DisaggregationResult],
    estimate: &PowerSeries,
    window: &str,
    boundary: &str,
    evaluation: Option<EvaluationReport>,
) -> DisaggregationReport {
    let windows: Vec<WindowReport> = results.iter().map(|r| window_report(x, r)).collect();
    let mut segment_types = BTreeMap::new();
    let mut decisions = BTreeMap::new();
    for w in &windows {
        for (k, v) in &w.segment_types {
            *segment_types.entry(*k).or_insert(0) += v;
        }
        for (k, v) in &w.decisions {
            *decisions.entry(*k).or_insert(0) += v;
        }
    }
    DisaggregationReport {
        start: x.start().to_string(),
        samples: x.len(),
        window: window.into(),
        boundary: boundary.into(),
        event_count: results.iter().map(|r| r.events.len()).sum(),
        total_energy_kwh: Fixed(estimate.energy_kwh()),
        segment_types,
        decisions,
        windows,
        evaluation,
    }
}

fn month_report(m: &MonthlyEval) -> MonthReport {
    MonthReport {
        month: m.month.clone(),
        e_true_kwh: Fixed(m.e_true),
        e_est_kwh: Fixed(m.e_est),
        err1_pct: m.err1_term.map(|t| Fixed(t * 100.0)),
        err2_kwh: Fixed(m.err2_term),
        mse: m.mse_term.map(Fixed),
    }
}

/// Scores `estimate` against `truth` month by month.
pub fn evaluation_report(truth: &PowerSeries, estimate: &PowerSeries) -> Result<EvaluationReport> {
    if truth.is_empty() {
        return Err(CliError::Invariant("truth series is empty".into()));
    }
    let months = monthly_evals(truth, estimate)?;
    let summary = Summary::of(&months)?;
    Ok(EvaluationReport {
        months: months.iter().map(month_report).collect(),
        total: TotalReport {
            months: summary.months,
            err1_pct: summary.err1.into(),
            err2_kwh: summary.err2.into(),
            mse: summary.mse.into(),
        },
        table_row: summary.table_row("Total"),
    })
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports hold only finite numbers");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use evdisagg_core::Timestamp;

    #[test]
    fn fixed_formatting() {
        assert_eq!(fixed6(3.3), "3.300000");
        assert_eq!(fixed6(-0.0), "0.000000");
        assert_eq!(fixed6(-1e-9), "0.000000");
        assert_eq!(fixed6(-2.5), "-2.500000");
        assert_eq!(serde_json::to_string(&vec![Fixed(1.0), Fixed(0.1234567)]).unwrap(), "[1.000000,0.123457]");
        assert!(serde_json::to_string(&Fixed(f64::NAN)).is_err());
    }

    #[test]
    fn identity_evaluation() {
        let x = PowerSeries::new(Timestamp(0), vec![3.0; 120]).unwrap();
        let e = evaluation_report(&x, &x).unwrap();
        assert_eq!(e.total.err1_pct.mean, Fixed(0.0));
        assert_eq!(e.total.mse.mean, Fixed(0.0));
        let zero = PowerSeries::zeros(Timestamp(0), 120);
        let e = evaluation_report(&x, &zero).unwrap();
        assert_eq!(e.total.mse.mean, Fixed(1.0));
        assert_eq!(e.total.err1_pct.mean, Fixed(100.0));
        assert!(matches!(evaluation_report(&zero, &x), Err(CliError::Invariant(_))));
    }
}
