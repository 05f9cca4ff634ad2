//! Text formats: sample files, custom weight files, flat config files,
//! grid expressions, and the CSV/JSON table emitted by every subcommand.
//!
//! CSV layout: `#`-prefixed `key: value` metadata lines, a header row,
//! then data rows. Floats are printed with 17 significant digits so a
//! parsed table reproduces the original bit for bit.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// Exact round-trip float formatting.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Cell {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Text(v)
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Float(v) => serializer.serialize_f64(*v),
            Cell::Int(v) => serializer.serialize_u64(*v),
            Cell::Text(v) => serializer.serialize_str(v),
        }
    }
}

impl Cell {
    fn to_csv_field(&self) -> String {
        match self {
            Cell::Float(v) => fmt_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(v) => {
                debug_assert!(
                    !v.contains(',') && !v.contains('\n') && !v.starts_with('#'),
                    "text cell {v:?} would corrupt the csv"
                );
                v.clone()
            }
        }
    }
}

/// One tabular result with its metadata block.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputTable {
    pub fn new(columns: &[&str]) -> Self {
        OutputTable {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::to_csv_field).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut meta = Map::new();
        for (k, v) in &self.meta {
            meta.insert(k.clone(), Value::String(v.clone()));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert(col.clone(), serde_json::to_value(cell).expect("cell serializes"));
                }
                Value::Object(obj)
            })
            .collect();
        json!({ "meta": meta, "columns": self.columns, "rows": rows })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("valid json value");
        s.push('\n');
        s
    }
}

/// Parses a table written by `to_csv`, recovering cell types: unsigned
/// integer literals become `Int`, other numerics `Float`, the rest `Text`.
pub fn parse_csv_table(text: &str) -> Result<OutputTable> {
    let mut meta = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if columns.is_some() {
                return Err(Error::input(format!(
                    "csv line {}: metadata after the header",
                    lineno + 1
                )));
            }
            let rest = rest.trim_start();
            let (k, v) = rest
                .split_once(':')
                .ok_or_else(|| Error::input(format!("csv line {}: malformed metadata", lineno + 1)))?;
            meta.push((k.trim().to_string(), v.trim().to_string()));
            continue;
        }
        match &columns {
            None => {
                columns = Some(line.split(',').map(|c| c.trim().to_string()).collect());
            }
            Some(cols) => {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != cols.len() {
                    return Err(Error::input(format!(
                        "csv line {}: expected {} fields, found {}",
                        lineno + 1,
                        cols.len(),
                        fields.len()
                    )));
                }
                rows.push(fields.iter().map(|f| parse_cell(f)).collect());
            }
        }
    }
    let columns = columns.ok_or_else(|| Error::input("csv: missing header row"))?;
    Ok(OutputTable { meta, columns, rows })
}

fn parse_cell(field: &str) -> Cell {
    if !field.is_empty() && field.bytes().all(|b| b.is_ascii_digit()) {
        if let Ok(v) = field.parse::<u64>() {
            return Cell::Int(v);
        }
    }
    if looks_numeric(field) {
        if let Ok(v) = field.parse::<f64>() {
            return Cell::Float(v);
        }
    }
    Cell::Text(field.to_string())
}

// Keeps words like "nan"/"inf" textual while accepting every float this
// crate prints.
fn looks_numeric(field: &str) -> bool {
    field
        .bytes()
        .next()
        .is_some_and(|b| b.is_ascii_digit() || b == b'-' || b == b'+' || b == b'.')
        && field
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'-' | b'+' | b'.' | b'e' | b'E'))
}

/// One finite value per line; blank lines and `#` comments are ignored.
pub fn parse_sample_file(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let token = line.trim();
        if token.is_empty() || token.starts_with('#') {
            continue;
        }
        let v: f64 = token.parse().map_err(|_| {
            Error::input(format!(
                "sample line {}: cannot parse '{token}' as a number",
                lineno + 1
            ))
        })?;
        if !v.is_finite() {
            return Err(Error::input(format!(
                "sample line {}: value {v} is not finite",
                lineno + 1
            )));
        }
        out.push(v);
    }
    Ok(out)
}

/// Custom elemental weights: lines of `i j weight` (whitespace or comma
/// separated); `#` comments allowed.
pub fn parse_weights_file(text: &str) -> Result<Vec<(usize, usize, f64)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.len() != 3 {
            return Err(Error::input(format!(
                "weights line {}: expected 'i j weight', found {} tokens",
                lineno + 1,
                tokens.len()
            )));
        }
        let i: usize = tokens[0].parse().map_err(|_| {
            Error::input(format!("weights line {}: bad index '{}'", lineno + 1, tokens[0]))
        })?;
        let j: usize = tokens[1].parse().map_err(|_| {
            Error::input(format!("weights line {}: bad index '{}'", lineno + 1, tokens[1]))
        })?;
        let w: f64 = tokens[2].parse().map_err(|_| {
            Error::input(format!("weights line {}: bad weight '{}'", lineno + 1, tokens[2]))
        })?;
        if !w.is_finite() || w < 0.0 {
            return Err(Error::input(format!(
                "weights line {}: weight must be finite and nonnegative, got {w}",
                lineno + 1
            )));
        }
        out.push((i, j, w));
    }
    Ok(out)
}

/// Flat `key = value` config file; later entries override earlier ones.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("config line {}: expected 'key = value'", lineno + 1))
        })?;
        let k = k.trim();
        let v = v.trim();
        if k.is_empty()
            || !k
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
        {
            return Err(Error::config(format!(
                "config line {}: bad key '{k}' (lowercase, digits and '-' only)",
                lineno + 1
            )));
        }
        if v.is_empty() {
            return Err(Error::config(format!("config line {}: empty value", lineno + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Grid expression: either comma-separated values or `lo:hi:step`
/// (inclusive of `hi` when the range divides evenly).
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::config(format!("grid '{s}': expected lo:hi:step")));
        }
        let lo: f64 = parse_grid_num(parts[0], s)?;
        let hi: f64 = parse_grid_num(parts[1], s)?;
        let step: f64 = parse_grid_num(parts[2], s)?;
        if !(step > 0.0) {
            return Err(Error::config(format!("grid '{s}': step must be positive")));
        }
        if hi < lo {
            return Err(Error::config(format!("grid '{s}': hi is below lo")));
        }
        let q = (hi - lo) / step;
        let count = (q * (1.0 + 4.0 * f64::EPSILON) + 1e-9).floor() as usize;
        if count > 10_000_000 {
            return Err(Error::config(format!("grid '{s}': too many points")));
        }
        Ok((0..=count).map(|k| lo + k as f64 * step).collect())
    } else {
        let vals: Vec<f64> = s
            .split(',')
            .map(|t| parse_grid_num(t.trim(), s))
            .collect::<Result<_>>()?;
        if vals.is_empty() {
            return Err(Error::config(format!("grid '{s}' is empty")));
        }
        Ok(vals)
    }
}

fn parse_grid_num(token: &str, grid: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::config(format!("grid '{grid}': cannot parse '{token}'")))?;
    if !v.is_finite() {
        return Err(Error::config(format!("grid '{grid}': value {v} is not finite")));
    }
    Ok(v)
}

/// Comma-separated list of sample sizes.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    let vals: Vec<usize> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::config(format!("list '{s}': cannot parse '{}'", t.trim())))
        })
        .collect::<Result<_>>()?;
    if vals.is_empty() {
        return Err(Error::config(format!("list '{s}' is empty")));
    }
    Ok(vals)
}
