use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::error::{Error, Result};
use crate::format::fmt_f64;

/// A cell of a report row.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Value {
    /// Text used in CSV and as the JSON number literal.
    pub fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => fmt_f64(*x),
            Value::Bool(b) => b.to_string(),
            Value::Text(t) => t.clone(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Int(i) => Json::from(*i),
            Value::Float(x) if x.is_finite() => Json::Number(
                fmt_f64(*x)
                    .parse()
                    .expect("formatted float is a JSON number"),
            ),
            Value::Float(x) => Json::String(fmt_f64(*x)),
            Value::Bool(b) => Json::Bool(*b),
            Value::Text(t) => Json::String(t.clone()),
        }
    }
}

macro_rules! value_from {
    ($($t:ty => $v:ident),*) => {$(
        impl From<$t> for Value {
            fn from(x: $t) -> Self {
                Value::$v(x.into())
            }
        }
    )*};
}
value_from!(i64 => Int, u32 => Int, i32 => Int, f64 => Float, bool => Bool, String => Text);

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

/// One report row: ordered column/value pairs. Every row carries a `check`
/// column naming the property it belongs to.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record(pub Vec<(String, Value)>);

impl Record {
    pub fn new(check: &str) -> Self {
        Record(vec![(String::from("check"), Value::from(check))])
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.0.push((key.to_string(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn check(&self) -> &str {
        match self.get("check") {
            Some(Value::Text(t)) => t,
            _ => "",
        }
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, &v.to_json())?;
        }
        map.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    Min,
    Max,
    /// Every value is `true`.
    All,
    /// Number of selected rows.
    Count,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Comparator {
    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Comparator::Lt => a < b,
            Comparator::Le => a <= b,
            Comparator::Gt => a > b,
            Comparator::Ge => a >= b,
            Comparator::Eq => a == b,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Eq => "==",
        })
    }
}

/// A verdict recomputable from the rows: aggregate `column` over the rows
/// whose `check` equals `check` and whose `column` cell is non-empty, then
/// compare against `threshold`.
/// An empty selection fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub check: String,
    pub column: String,
    pub aggregate: Aggregate,
    pub comparator: Comparator,
    pub threshold: f64,
}

impl Rule {
    pub fn new(
        name: &str,
        check: &str,
        column: &str,
        aggregate: Aggregate,
        comparator: Comparator,
        threshold: f64,
    ) -> Self {
        Rule {
            name: name.to_string(),
            check: check.to_string(),
            column: column.to_string(),
            aggregate,
            comparator,
            threshold,
        }
    }

    pub fn all_true(name: &str, check: &str, column: &str) -> Self {
        Rule::new(name, check, column, Aggregate::All, Comparator::Eq, 1.0)
    }

    /// Evaluates the rule on rendered cell text, so CSV rows and in-memory
    /// rows give the same answer.
    pub fn evaluate_text<'a>(&self, rows: impl Iterator<Item = (&'a str, Option<&'a str>)>) -> Verdict {
        let mut selected = 0usize;
        let mut acc: Option<f64> = None;
        let mut malformed = false;
        for (check, cell) in rows {
            let Some(cell) = cell.filter(|_| check == self.check) else {
                continue;
            };
            selected += 1;
            let v = match self.aggregate {
                Aggregate::All => match cell {
                    "true" => 1.0,
                    "false" => 0.0,
                    _ => {
                        malformed = true;
                        continue;
                    }
                },
                Aggregate::Count => 0.0,
                _ => match parse_float(cell) {
                    Some(x) => x,
                    None => {
                        malformed = true;
                        continue;
                    }
                },
            };
            acc = Some(match (self.aggregate, acc) {
                (_, None) => v,
                (Aggregate::Max, Some(a)) => a.max(v),
                (Aggregate::Min | Aggregate::All, Some(a)) => a.min(v),
                (Aggregate::Count, Some(a)) => a,
            });
        }
        let value = match self.aggregate {
            Aggregate::Count => selected as f64,
            _ => acc.unwrap_or(f64::NAN),
        };
        let passed = selected > 0 && !malformed && self.comparator.holds(value, self.threshold);
        Verdict {
            rule: self.name.clone(),
            value,
            rows: selected,
            passed,
        }
    }

    pub fn evaluate(&self, records: &[Record]) -> Verdict {
        let rendered: Vec<(String, Option<String>)> = records
            .iter()
            .map(|r| (r.check().to_string(), r.get(&self.column).map(Value::render)))
            .collect();
        self.evaluate_text(rendered.iter().map(|(c, v)| (c.as_str(), v.as_deref())))
    }
}

pub fn parse_float(cell: &str) -> Option<f64> {
    match cell {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ => cell.parse().ok(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub rule: String,
    #[serde(serialize_with = "ser_float", deserialize_with = "de_float")]
    pub value: f64,
    pub rows: usize,
    pub passed: bool,
}

fn ser_float<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Value::Float(*x).to_json().serialize(s)
}

fn de_float<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let v = Json::deserialize(d)?;
    match &v {
        Json::Number(n) => n.to_string().parse().map_err(serde::de::Error::custom),
        Json::String(s) => parse_float(s).ok_or_else(|| serde::de::Error::custom("bad float")),
        _ => Err(serde::de::Error::custom("expected a float")),
    }
}

/// Min and max of a dimensionless quantity over the rows of one check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremes {
    pub check: String,
    pub column: String,
    #[serde(serialize_with = "ser_float")]
    pub min: f64,
    #[serde(serialize_with = "ser_float")]
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fitted {
    pub name: String,
    #[serde(serialize_with = "ser_float")]
    pub value: f64,
    /// How the constant was obtained (calibration split, margins).
    pub source: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub resolutions: Vec<usize>,
    pub refinement_history: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub provenance: Provenance,
    pub rules: Vec<Rule>,
    pub verdicts: Vec<Verdict>,
    pub fitted: Vec<Fitted>,
    pub extremes: Vec<Extremes>,
    pub record_count: usize,
    pub records: Vec<Record>,
}

impl SuiteReport {
    pub fn new(suite: &str, provenance: Provenance) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            provenance,
            rules: Vec::new(),
            verdicts: Vec::new(),
            fitted: Vec::new(),
            extremes: Vec::new(),
            record_count: 0,
            records: Vec::new(),
        }
    }

    /// Evaluates the rules and the extremes of the listed columns.
    pub fn finish(mut self, rules: Vec<Rule>, extremes: &[(&str, &str)]) -> Self {
        self.verdicts = rules.iter().map(|r| r.evaluate(&self.records)).collect();
        self.rules = rules;
        self.extremes = extremes
            .iter()
            .map(|&(check, column)| {
                let vals = self
                    .records
                    .iter()
                    .filter(|r| r.check() == check)
                    .filter_map(|r| match r.get(column) {
                        Some(Value::Float(x)) => Some(*x),
                        Some(Value::Int(i)) => Some(*i as f64),
                        _ => None,
                    });
                let (min, max) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                    (a.min(v), b.max(v))
                });
                Extremes {
                    check: check.to_string(),
                    column: column.to_string(),
                    min,
                    max,
                }
            })
            .collect();
        self.record_count = self.records.len();
        self
    }

    pub fn passed(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.passed)
    }

    /// Union of record columns in order of first appearance.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for r in &self.records {
            for (k, _) in &r.0 {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
        cols
    }

    pub fn to_csv(&self) -> String {
        let cols = self.columns();
        let mut out = cols.join(",");
        out.push('\n');
        for r in &self.records {
            let row: Vec<String> = cols
                .iter()
                .map(|c| r.get(c).map(Value::render).unwrap_or_default())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// The report without its rows.
    pub fn summary_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Json::Object(map) = &mut v {
            map.remove("records");
        }
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    pub fn full_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Writes `<suite>.csv` and `<suite>.summary.json`, or `<suite>.json`.
pub fn emit_report(report: &SuiteReport, format: Format, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    match format {
        Format::Csv => {
            let csv = out_dir.join(format!("{}.csv", report.suite));
            fs::write(&csv, report.to_csv())?;
            let summary = out_dir.join(format!("{}.summary.json", report.suite));
            fs::write(&summary, report.summary_json()?)?;
            written.extend([csv, summary]);
        }
        Format::Json => {
            let path = out_dir.join(format!("{}.json", report.suite));
            fs::write(&path, report.full_json()?)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Recomputes rule verdicts from CSV text alone.
pub fn recheck_csv(csv: &str, rules: &[Rule]) -> Result<Vec<Verdict>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Invalid(String::from("empty CSV")))?
        .split(',')
        .collect();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let check_col = header
        .iter()
        .position(|h| *h == "check")
        .ok_or_else(|| Error::Invalid(String::from("CSV lacks a check column")))?;
    Ok(rules
        .iter()
        .map(|rule| {
            let col = header.iter().position(|h| *h == rule.column);
            rule.evaluate_text(rows.iter().map(|row| {
                let cell = col.and_then(|i| row.get(i).copied()).filter(|c| !c.is_empty());
                (row[check_col], cell)
            }))
        })
        .collect())
}
