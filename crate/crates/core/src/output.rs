//! Tabular output: CSV with `#` comment header, or JSON lines.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::analysis::{BoundaryCurve, SweepResult, VERSION};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(format!("unknown format '{s}' (expected csv or jsonl)")),
        }
    }
}

/// Named columns plus free-form metadata lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn params_record(p: &ModelParams) -> String {
    format!(
        "J={} J1={} delta={} D={} h={} T={}",
        p.j, p.j1, p.delta, p.d, p.h, p.t
    )
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: vec![("version".into(), VERSION.into())],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.push((key.into(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let meta: Map<String, Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let mut out = json!({ "meta": meta }).to_string();
        out.push('\n');
        for row in &self.rows {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, &v)| (c.clone(), json!(v)))
                .collect();
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Jsonl => self.to_jsonl(),
        }
    }

    pub fn write_to(&self, format: Format, w: &mut impl Write) -> io::Result<()> {
        w.write_all(self.render(format).as_bytes())
    }
}

impl From<&SweepResult> for Table {
    fn from(r: &SweepResult) -> Self {
        let mut columns: Vec<&str> = r.axes.iter().map(|a| a.axis.name()).collect();
        columns.push(&r.observable);
        let mut table = Table::new(&columns).with_meta("fixed", params_record(&r.fixed));
        table.meta[0].1 = r.version.into();
        let inner = r.axes.last().map_or(1, |a| a.values.len());
        for (k, &v) in r.values.iter().enumerate() {
            let mut row = Vec::with_capacity(columns.len());
            if r.axes.len() == 2 {
                row.push(r.axes[0].values[k / inner]);
            }
            row.push(r.axes[r.axes.len() - 1].values[k % inner]);
            row.push(v);
            table.push(row);
        }
        table
    }
}

impl From<&BoundaryCurve> for Table {
    fn from(c: &BoundaryCurve) -> Self {
        let scan = c.plane.scan.axis.name();
        let along = c.plane.along.axis.name();
        let lo = format!("{along}_lo");
        let hi = format!("{along}_hi");
        let mut table = Table::new(&[scan, along, &lo, &hi])
            .with_meta("fixed", params_record(&c.fixed))
            .with_meta("epsilon", format!("{}", c.epsilon))
            .with_meta(
                "scan",
                format!(
                    "{scan} in [{}, {}] x {}",
                    c.plane.scan.min, c.plane.scan.max, c.plane.scan.steps
                ),
            )
            .with_meta(
                "along",
                format!(
                    "{along} in [{}, {}] x {}",
                    c.plane.along.min, c.plane.along.max, c.plane.along.steps
                ),
            );
        if !c.lines_without_crossing.is_empty() {
            let silent: Vec<String> = c
                .lines_without_crossing
                .iter()
                .map(|v| format!("{v}"))
                .collect();
            table = table.with_meta("lines_without_crossing", silent.join(" "));
        }
        for p in &c.points {
            table.push(vec![p.scan, p.along, p.bracket.0, p.bracket.1]);
        }
        table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["x", "y"]).with_meta("note", "demo");
        t.push(vec![1.0, 0.25]);
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], format!("# version: {VERSION}"));
        assert_eq!(lines[1], "# note: demo");
        assert_eq!(lines[2], "x,y");
        assert_eq!(lines[3], "1.0000000000000000e0,2.5000000000000000e-1");
    }

    #[test]
    fn csv_round_trips_bit_exact() {
        let mut t = Table::new(&["v"]);
        let v = 0.1 + 0.2;
        t.push(vec![v]);
        let csv = t.to_csv();
        let back: f64 = csv.lines().last().unwrap().parse().unwrap();
        assert_eq!(back.to_bits(), v.to_bits());
    }

    #[test]
    fn jsonl_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.5, -2.0]);
        let out = t.to_jsonl();
        let lines: Vec<Value> = out
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines[0]["meta"]["version"], VERSION);
        assert_eq!(lines[1]["a"], 1.5);
        assert_eq!(lines[1]["b"], -2.0);
    }

    #[test]
    fn format_parsing() {
        assert_eq!("jsonl".parse::<Format>().unwrap(), Format::Jsonl);
        assert!("xml".parse::<Format>().is_err());
    }
}
