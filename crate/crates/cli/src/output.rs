//! CSV tables with C-style `%.12e` numbers, and schema-versioned JSON.

use std::fmt::Write as _;

use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// `%.12e`: 12 fractional digits, signed exponent of at least two digits.
pub fn sci(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Float(v) => out.push_str(&sci(*v)),
                    Cell::Int(n) => write!(out, "{n}").unwrap(),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Column headers: bare names for one series, `name[label]` for several.
pub fn series_headers(names: &[&str], labels: &[String]) -> Vec<String> {
    let mut headers = vec!["gt".to_string()];
    for label in labels {
        for name in names {
            if labels.len() == 1 {
                headers.push(name.to_string());
            } else {
                headers.push(format!("{name}[{label}]"));
            }
        }
    }
    headers
}

pub enum Output {
    Csv(Table),
    Json(Value),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Csv(t) => t.to_csv(),
            Output::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }
}
