//! Embedded parameter tables.
//!
//! The fixture stores each published table verbatim (angles in units of π).
//! The values seed the solvers and anchor regression tests; they are never
//! used as final parameters without refinement.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const FIXTURE: &str = include_str!("../data/published_tables.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    /// First field, e.g. a target name or the value of θ/π.
    pub key: String,
    /// Remaining fields; `None` marks a `-` entry.
    pub fields: Vec<Vec<Option<f64>>>,
}

impl TableRow {
    /// Field `i` (after the key) in radians; `-` entries become NaN.
    pub fn radians(&self, i: usize) -> Vec<f64> {
        self.fields[i].iter().map(|v| v.map_or(f64::NAN, |x| x * PI)).collect()
    }

    /// The key parsed as a number in units of π.
    pub fn key_value(&self) -> Option<f64> {
        parse_number(&self.key).ok()
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub rows: Vec<TableRow>,
    text: String,
}

impl Table {
    /// The section exactly as it appears in the fixture, comments excluded.
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn row(&self, key: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.key == key)
    }

    /// Row whose numeric key equals `value_over_pi`.
    pub fn row_at(&self, value_over_pi: f64) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.key_value().is_some_and(|k| (k - value_over_pi).abs() < 1e-12))
    }
}

fn parse_number(tok: &str) -> Result<f64> {
    let tok = tok.trim();
    let bad = || Error::InvalidArgument(format!("bad table number '{tok}'"));
    match tok.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            Ok(a / b)
        }
        None => tok.parse().map_err(|_| bad()),
    }
}

fn parse_fixture(text: &str) -> Result<Vec<Table>> {
    let mut tables: Vec<Table> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            tables.push(Table { name: name.to_string(), rows: Vec::new(), text: String::new() });
            continue;
        }
        let table =
            tables.last_mut().ok_or(Error::Parse { line: idx + 1, message: "row outside a table section".into() })?;
        let mut parts = line.split('|').map(str::trim);
        let key = parts.next().unwrap_or_default().to_string();
        let fields = parts
            .map(|f| {
                f.split(',')
                    .map(|t| if t.trim() == "-" { Ok(None) } else { parse_number(t).map(Some) })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse { line: idx + 1, message: e.to_string() })?;
        table.rows.push(TableRow { key, fields });
        table.text.push_str(line);
        table.text.push('\n');
    }
    Ok(tables)
}

/// All embedded tables, parsed once.
pub fn published_tables() -> &'static [Table] {
    static TABLES: OnceLock<Vec<Table>> = OnceLock::new();
    TABLES.get_or_init(|| parse_fixture(FIXTURE).expect("embedded table fixture is well-formed"))
}

pub fn table(name: &str) -> Option<&'static Table> {
    published_tables().iter().find(|t| t.name.eq_ignore_ascii_case(name))
}

pub fn table_names() -> Vec<&'static str> {
    published_tables().iter().map(|t| t.name.as_str()).collect()
}
