//! Report types and output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use selfdual::Complex64;

#[derive(Clone, Debug, Serialize)]
pub struct FamilyInfo {
    pub id: String,
    pub params: BTreeMap<String, Value>,
}

impl FamilyInfo {
    pub fn new(id: &str, params: &[(&str, f64)]) -> Self {
        Self {
            id: id.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), json!(v))).collect(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub name: String,
    pub paper_value: Value,
    pub derived_value: Value,
}

impl Discrepancy {
    pub fn new(name: &str, paper_value: impl Into<Value>, derived_value: impl Into<Value>) -> Self {
        Self {
            name: name.to_string(),
            paper_value: paper_value.into(),
            derived_value: derived_value.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub equation: String,
    pub family: FamilyInfo,
    pub grid: String,
    pub max_abs: f64,
    pub rms: f64,
    pub worst_point: Vec<f64>,
    pub mode: String,
    pub mode_variant: String,
    pub tolerance: f64,
    pub pass: bool,
    pub discrepancies: Vec<Discrepancy>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub fits: BTreeMap<String, Value>,
}

/// Running max/RMS of absolute residuals with the worst point kept.
#[derive(Clone, Debug, Default)]
pub struct Sweep {
    max_abs: f64,
    sum_sq: f64,
    count: usize,
    worst: Vec<f64>,
}

impl Sweep {
    pub fn add(&mut self, at: &[f64], residual: f64) {
        let r = residual.abs();
        if self.count == 0 || r > self.max_abs || r.is_nan() {
            self.max_abs = if r.is_nan() { f64::INFINITY } else { r };
            self.worst = at.to_vec();
        }
        self.sum_sq += r * r;
        self.count += 1;
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn rms(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.sum_sq / self.count as f64).sqrt()
        }
    }

    pub fn worst(&self) -> Vec<f64> {
        self.worst.clone()
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// A finished command: the report, any CSV series, and the verdict.
pub struct Outcome {
    pub report: ResidualReport,
    pub csv: Vec<(String, Csv)>,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    PaperMismatch,
    /// The run finished with a report but was cut short numerically.
    Domain,
    /// The run finished with a report but was cut short by a guard.
    Guard,
}

impl Status {
    /// Failing in a paper-variant run is a detected misprint, not a plain
    /// tolerance failure.
    pub fn from_check(pass: bool, paper_variant: bool) -> Self {
        match (pass, paper_variant) {
            (true, _) => Self::Pass,
            (false, true) => Self::PaperMismatch,
            (false, false) => Self::Fail,
        }
    }

    pub fn code(self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
            Self::PaperMismatch => 3,
            Self::Domain => 4,
            Self::Guard => 5,
        }
    }
}

/// A CSV series with a one-line header.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        let mut line = String::new();
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let _ = write!(line, "{v:e}");
        }
        line.push('\n');
        self.text.push_str(&line);
    }
}

pub fn to_json(report: &ResidualReport) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize") + "\n"
}

/// `report.json` plus one file per series under `dir`.
pub fn write_all(dir: &Path, outcome: &Outcome) -> std::io::Result<()> {
    fs::write(dir.join("report.json"), to_json(&outcome.report))?;
    for (name, csv) in &outcome.csv {
        fs::write(dir.join(name), &csv.text)?;
    }
    Ok(())
}
