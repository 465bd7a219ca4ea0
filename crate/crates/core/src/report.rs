//! Structured results of verification runs.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Running statistics of one named residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualStat {
    pub max: f64,
    pub l2: f64,
    pub count: usize,
    pub tolerance: f64,
}

impl ResidualStat {
    pub fn new(tolerance: f64) -> Self {
        ResidualStat { max: 0.0, l2: 0.0, count: 0, tolerance }
    }

    /// Records one non-negative residual. NaN is kept as NaN so it can never pass.
    pub fn push(&mut self, value: f64) {
        let v = value.abs();
        if v.is_nan() || self.max.is_nan() {
            self.max = f64::NAN;
        } else {
            self.max = self.max.max(v);
        }
        self.l2 = (self.l2 * self.l2 + v * v).sqrt();
        self.count += 1;
    }

    pub fn extend<I: IntoIterator<Item = f64>>(&mut self, values: I) {
        for v in values {
            self.push(v);
        }
    }

    /// Combines two statistics of the same quantity.
    pub fn merge(&mut self, other: &ResidualStat) {
        self.max = if self.max.is_nan() || other.max.is_nan() { f64::NAN } else { self.max.max(other.max) };
        self.l2 = self.l2.hypot(other.l2);
        self.count += other.count;
    }

    pub fn passes(&self) -> bool {
        self.max.is_finite() && self.max <= self.tolerance
    }

    /// `max / tolerance`, the quantity used to pick a headline residual.
    pub fn ratio(&self) -> f64 {
        if self.max.is_nan() {
            f64::INFINITY
        } else if self.max == 0.0 {
            0.0
        } else {
            self.max / self.tolerance
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A hypothesis of the claim does not hold; the claim was not tested.
    NotApplicable,
    Skipped,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not_applicable",
            Status::Skipped => "skipped",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn parse(s: &str) -> Option<Status> {
        Some(match s {
            "pass" => Status::Pass,
            "fail" => Status::Fail,
            "not_applicable" => Status::NotApplicable,
            "skipped" => Status::Skipped,
            "inconclusive" => Status::Inconclusive,
            _ => return None,
        })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A small numeric table attached to a report (convergence studies, per-level data).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DataTable {
    pub fn new(columns: &[&str]) -> Self {
        DataTable { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment_id: String,
    pub residuals: BTreeMap<String, ResidualStat>,
    /// Hypotheses checked before the conclusion, `true` when satisfied.
    pub hypotheses: BTreeMap<String, bool>,
    pub conclusion: Status,
    /// Residual that summarizes the report; defaults to the worst ratio.
    pub headline: Option<String>,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tables: BTreeMap<String, DataTable>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.conclusion == Status::Pass
    }

    pub fn residual(&self, name: &str) -> Option<&ResidualStat> {
        self.residuals.get(name)
    }

    pub fn max_of(&self, name: &str) -> f64 {
        self.residuals.get(name).map(|r| r.max).unwrap_or(f64::NAN)
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.values().all(|&h| h)
    }

    /// The headline residual, falling back to the one with the largest
    /// `max / tolerance` ratio.
    pub fn headline_stat(&self) -> Option<(&str, &ResidualStat)> {
        if let Some(name) = &self.headline {
            if let Some(stat) = self.residuals.get(name) {
                return Some((name.as_str(), stat));
            }
        }
        self.residuals
            .iter()
            .max_by(|a, b| a.1.ratio().total_cmp(&b.1.ratio()))
            .map(|(k, v)| (k.as_str(), v))
    }

    pub fn hypothesis_summary(&self) -> &'static str {
        if self.hypotheses.is_empty() {
            "none"
        } else if self.hypotheses_hold() {
            "hold"
        } else {
            "violated"
        }
    }
}

/// Accumulates residuals and hypotheses, then decides the conclusion.
#[derive(Debug)]
pub struct ReportBuilder {
    id: String,
    residuals: BTreeMap<String, ResidualStat>,
    hypotheses: BTreeMap<String, bool>,
    headline: Option<String>,
    notes: Vec<String>,
    tables: BTreeMap<String, DataTable>,
    forced: Option<Status>,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(id: impl Into<String>) -> Self {
        ReportBuilder {
            id: id.into(),
            residuals: BTreeMap::new(),
            hypotheses: BTreeMap::new(),
            headline: None,
            notes: Vec::new(),
            tables: BTreeMap::new(),
            forced: None,
            started: Instant::now(),
        }
    }

    /// Returns the named residual, creating it with `tolerance` if needed.
    pub fn residual(&mut self, name: &str, tolerance: f64) -> &mut ResidualStat {
        self.residuals
            .entry(name.to_string())
            .or_insert_with(|| ResidualStat::new(tolerance))
    }

    pub fn record(&mut self, name: &str, tolerance: f64, value: f64) {
        self.residual(name, tolerance).push(value);
    }

    pub fn hypothesis(&mut self, name: &str, holds: bool) {
        let entry = self.hypotheses.entry(name.to_string()).or_insert(true);
        *entry &= holds;
    }

    pub fn headline(&mut self, name: &str) {
        self.headline = Some(name.to_string());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn table(&mut self, name: &str, table: DataTable) {
        self.tables.insert(name.to_string(), table);
    }

    /// Overrides the computed conclusion (skipped or inconclusive runs).
    pub fn force(&mut self, status: Status) {
        self.forced = Some(status);
    }

    pub fn finish(self) -> VerificationReport {
        let conclusion = match self.forced {
            Some(s) => s,
            None if !self.hypotheses.values().all(|&h| h) => Status::NotApplicable,
            None if self.residuals.values().all(ResidualStat::passes) => Status::Pass,
            None => Status::Fail,
        };
        VerificationReport {
            experiment_id: self.id,
            residuals: self.residuals,
            hypotheses: self.hypotheses,
            conclusion,
            headline: self.headline,
            runtime_ms: self.started.elapsed().as_millis() as u64,
            notes: self.notes,
            tables: self.tables,
        }
    }
}
