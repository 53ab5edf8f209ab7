//! Tabular experiment reports and their CSV / JSON encodings.
//!
//! Floats are written with 17 significant digits in both encodings, so the
//! two carry identical numeric text and round-trip binary64 exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    /// Integer of any size, kept as decimal text.
    Integer(String),
    Text(String),
    /// Undefined entry (empty in CSV, `null` in JSON).
    Empty,
}

impl Cell {
    pub fn int(v: impl ToString) -> Cell {
        Cell::Integer(v.to_string())
    }

    pub fn text(v: impl Into<String>) -> Cell {
        Cell::Text(v.into())
    }

    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn csv_text(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Integer(s) => s.clone(),
            Cell::Text(s) => csv_escape(s),
            Cell::Empty => String::new(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => number(&format_float(*x)),
            // JSON has no NaN or infinity; keep the CSV spelling
            Cell::Float(x) => Value::String(format_float(*x)),
            Cell::Empty => Value::Null,
            Cell::Integer(s) => number(s),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::int(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::text(s)
    }
}

fn number(text: &str) -> Value {
    Number::from_str(text).map_or_else(|_| Value::String(text.to_owned()), Value::Number)
}

/// 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_owned()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        let s = format!("{x:.16e}");
        // explicit exponent sign, as serde_json writes it
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Output of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRecord {
    pub experiment: String,
    pub parameters: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub pass: bool,
    pub tolerance: f64,
}

impl ReportRecord {
    pub fn new(experiment: &str, columns: &[&str]) -> Self {
        ReportRecord {
            experiment: experiment.to_owned(),
            parameters: Vec::new(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
            pass: false,
            tolerance: 0.0,
        }
    }

    pub fn param(&mut self, name: &str, value: impl Into<Cell>) -> &mut Self {
        self.parameters.push((name.to_owned(), value.into()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(
            row.len(),
            self.columns.len(),
            "row width for {}",
            self.experiment
        );
        self.rows.push(row);
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Float value at `(row, column)`, if present.
    pub fn float(&self, row: usize, name: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column(name)?)? {
            Cell::Float(x) => Some(*x),
            Cell::Integer(s) => s.parse().ok(),
            _ => None,
        }
    }

    /// Header row plus data rows, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| csv_escape(c)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv_text).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let parameters: Map<String, Value> = self
            .parameters
            .iter()
            .map(|(k, v)| (k.clone(), v.json_value()))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.json_value()))
                        .collect(),
                )
            })
            .collect();
        let mut obj = Map::new();
        obj.insert("experiment".into(), Value::String(self.experiment.clone()));
        obj.insert("parameters".into(), Value::Object(parameters));
        obj.insert("rows".into(), Value::Array(rows));
        obj.insert("pass".into(), Value::Bool(self.pass));
        obj.insert("tolerance".into(), Cell::Float(self.tolerance).json_value());
        Value::Object(obj)
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{}: {} (tolerance {})",
            self.experiment,
            if self.pass { "PASS" } else { "FAIL" },
            format_float(self.tolerance)
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportRecord {
        let mut r = ReportRecord::new("demo", &["n", "value", "note"]);
        r.param("seed", 7u64);
        r.push_row(vec![
            Cell::from(0usize),
            Cell::Float(0.1),
            Cell::text("a,b"),
        ]);
        r.push_row(vec![Cell::from(1usize), Cell::Empty, Cell::text("plain")]);
        r.pass = true;
        r.tolerance = 1e-8;
        r
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(1.0), "1.0000000000000000e+0");
        assert_eq!(format_float(-2.5e17), "-2.5000000000000000e+17");
        for x in [0.1, std::f64::consts::PI, 1e-300, -2.5e17] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        assert_eq!(
            csv,
            "n,value,note\n0,1.0000000000000001e-1,\"a,b\"\n1,,plain\n"
        );
    }

    #[test]
    fn json_carries_same_numbers() {
        let json = serde_json::to_string(&sample().to_json()).unwrap();
        assert!(json.contains("\"value\":1.0000000000000001e-1"));
        assert!(json.contains("\"value\":null"));
        assert!(json.contains("\"pass\":true"));
        assert!(json.contains("\"tolerance\":1.0000000000000000e-8"));
        assert!(json.starts_with("{\"experiment\":\"demo\",\"parameters\":{\"seed\":7}"));
    }

    #[test]
    fn float_lookup() {
        let r = sample();
        assert_eq!(r.float(0, "value"), Some(0.1));
        assert_eq!(r.float(1, "value"), None);
        assert_eq!(r.float(1, "n"), Some(1.0));
    }
}
