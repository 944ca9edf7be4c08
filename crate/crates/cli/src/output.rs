//! Result tables and their two renderings.

use critline_core::{Error, Result};
use serde_json::{json, Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub name: &'static str,
    pub note: &'static str,
}

pub const fn col(name: &'static str, note: &'static str) -> Column {
    Column { name, note }
}

/// Named columns over row-major numeric data; every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<Column>,
    rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Consistency(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some((i, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "column {} received non-finite value {v}",
                self.columns[i].name
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Everything one command run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: ResultTable,
    pub summary: Vec<(String, String)>,
    /// `None` for commands that only measure.
    pub verdict: Option<bool>,
}

impl Report {
    pub fn new(table: ResultTable) -> Self {
        Self {
            table,
            summary: Vec::new(),
            verdict: None,
        }
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn note_num(&mut self, key: impl Into<String>, value: f64) {
        self.note(key, fmt_num(value));
    }
}

/// Effective parameters of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub command: String,
    pub params: Vec<(String, String)>,
}

pub fn verdict_word(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `%.12g`: twelve significant digits, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The value as JSON after rounding to the printed precision.
fn json_num(x: f64) -> Value {
    let rounded: f64 = fmt_num(x).parse().expect("formatted numbers parse");
    json!(rounded)
}

pub fn render(report: &Report, manifest: &Manifest, format: Format) -> String {
    match format {
        Format::Tsv => render_tsv(report, manifest),
        Format::Json => render_json(report, manifest),
    }
}

fn render_tsv(report: &Report, manifest: &Manifest) -> String {
    let mut out = format!("# critline {}\n# command: {}\n", env!("CARGO_PKG_VERSION"), manifest.command);
    for (k, v) in &manifest.params {
        out.push_str(&format!("# param {k} = {v}\n"));
    }
    for c in report.table.columns() {
        out.push_str(&format!("# column {}: {}\n", c.name, c.note));
    }
    let names: Vec<&str> = report.table.columns().iter().map(|c| c.name).collect();
    out.push_str(&names.join("\t"));
    out.push('\n');
    for row in report.table.rows() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    for (k, v) in &report.summary {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    if let Some(passed) = report.verdict {
        out.push_str(&format!("# verdict: {}\n", verdict_word(passed)));
    }
    out
}

fn render_json(report: &Report, manifest: &Manifest) -> String {
    let params: Map<String, Value> = manifest
        .params
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let columns: Vec<Value> = report
        .table
        .columns()
        .iter()
        .map(|c| json!({ "name": c.name, "note": c.note }))
        .collect();
    let rows: Vec<Value> = report
        .table
        .rows()
        .iter()
        .map(|r| Value::Array(r.iter().map(|&v| json_num(v)).collect()))
        .collect();
    let summary: Map<String, Value> = report
        .summary
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let doc = json!({
        "tool": "critline",
        "version": env!("CARGO_PKG_VERSION"),
        "command": manifest.command,
        "params": params,
        "columns": columns,
        "rows": rows,
        "summary": summary,
        "verdict": report.verdict.map(verdict_word),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(29.0), "29");
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_num(-1234.5), "-1234.5");
        assert_eq!(fmt_num(1.0e-7), "1e-07");
        assert_eq!(fmt_num(6.02214076e23), "6.02214076e+23");
        assert_eq!(fmt_num(123456789012.0), "123456789012");
        assert_eq!(fmt_num(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_num(0.000123), "0.000123");
    }

    #[test]
    fn rows_are_checked() {
        let mut t = ResultTable::new(vec![col("a", "x"), col("b", "y")]);
        t.push(vec![1.0, 2.0]).unwrap();
        assert!(matches!(t.push(vec![1.0]), Err(Error::Consistency(_))));
        assert!(matches!(t.push(vec![1.0, f64::NAN]), Err(Error::Numeric(_))));
        assert_eq!(t.rows().len(), 1);
    }

    #[test]
    fn tsv_layout() {
        let mut t = ResultTable::new(vec![col("T", "height"), col("N", "count")]);
        t.push(vec![100.0, 29.0]).unwrap();
        let mut r = Report::new(t);
        r.note("N", "29");
        r.verdict = Some(true);
        let m = Manifest {
            command: "nt-check".into(),
            params: vec![("T".into(), "100".into())],
        };
        let text = render(&r, &m, Format::Tsv);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# critline "));
        assert!(lines.contains(&"# param T = 100"));
        assert!(lines.contains(&"T\tN"));
        assert!(lines.contains(&"100\t29"));
        assert_eq!(lines.last(), Some(&"# verdict: PASS"));
    }

    #[test]
    fn json_layout() {
        let mut t = ResultTable::new(vec![col("x", "value")]);
        t.push(vec![1.0 / 3.0]).unwrap();
        let r = Report::new(t);
        let text = render(&r, &Manifest::default(), Format::Json);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rows"][0][0], json!(0.333333333333));
        assert_eq!(v["verdict"], Value::Null);
    }
}
