//! Tabular results and their CSV / JSON encodings.

use crate::config::Format;
use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::{json, Value};
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// Numbers to 12 significant digits; non-finite values as `inf`,
    /// `-inf`, `nan`.
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_significant(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Num(_) | Cell::Text(_) => s.serialize_str(&self.render()),
            Cell::Empty => s.serialize_none(),
        }
    }
}

/// `v` rounded to 12 significant digits: positional notation for
/// exponents in [-5, 12), scientific otherwise.
pub fn format_significant(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let body = if (-5..12).contains(&exp) {
        let point = exp + 1;
        let fixed = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits)
        } else {
            let (int, frac) = digits.split_at(point as usize);
            format!("{int}.{frac}")
        };
        trim_fraction(&fixed)
    } else {
        format!("{}e{exp}", trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..])))
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// One data series. `labels` identify it (scenario, model, scheme, ...);
/// in CSV they become leading columns repeated on every row.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub labels: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Series {
    pub fn new(name: &str, labels: Vec<(&str, String)>, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            labels: labels.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

impl Serialize for Series {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("name", &self.name)?;
        let labels: serde_json::Map<String, Value> = self.labels.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        m.serialize_entry("labels", &labels)?;
        m.serialize_entry("columns", &self.columns)?;
        m.serialize_entry("rows", &self.rows)?;
        m.end()
    }
}

/// A per-point failure that did not stop the sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PointError {
    pub series: String,
    pub x: f64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub series: Vec<Series>,
    pub errors: Vec<PointError>,
}

pub fn write_report(report: &Report, format: Format, meta: Value, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(report, out),
        Format::Json => {
            let doc = json!({
                "meta": meta,
                "series": report.series,
                "errors": report.errors,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)
        }
    }
}

/// All series of a report share label keys and columns, so they stack into
/// one table.
fn write_csv(report: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = report.series.first() {
        let header: Vec<&str> = first
            .labels
            .iter()
            .map(|(k, _)| k.as_str())
            .chain(first.columns.iter().map(String::as_str))
            .collect();
        w.write_record(&header)?;
    }
    for s in &report.series {
        for row in &s.rows {
            let record: Vec<String> = s.labels.iter().map(|(_, v)| v.clone()).chain(row.iter().map(Cell::render)).collect();
            w.write_record(&record)?;
        }
    }
    w.flush()
}
