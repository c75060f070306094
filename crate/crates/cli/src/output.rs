//! Self-describing CSV and JSON documents.

use std::io::Write;

use serde_json::{Map, Value};

use crate::config::Format;

pub const ARTIFACT: &str = "acfreq";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    /// 17 significant digits, enough to round-trip any f64.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) => render_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

pub fn render_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(i64::from(x))
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone)]
pub struct Document {
    pub command: &'static str,
    /// Effective parameters after defaults, in display order.
    pub parameters: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            parameters: Vec::new(),
            seed: None,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn param_f(&mut self, key: &str, value: f64) -> &mut Self {
        self.param(key, render_float(value))
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the column list");
        self.rows.push(row);
    }

    fn seed_text(&self) -> String {
        self.seed.map_or_else(|| "none".to_owned(), |s| s.to_string())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> anyhow::Result<()> {
        writeln!(out, "# artifact={ARTIFACT}")?;
        writeln!(out, "# version={VERSION}")?;
        writeln!(out, "# command={}", self.command)?;
        for (k, v) in &self.parameters {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "# seed={}", self.seed_text())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut parameters = Map::new();
        for (k, v) in &self.parameters {
            parameters.insert(k.clone(), Value::from(v.as_str()));
        }
        let mut header = Map::new();
        header.insert("artifact".into(), ARTIFACT.into());
        header.insert("version".into(), VERSION.into());
        header.insert("command".into(), self.command.into());
        header.insert("parameters".into(), Value::Object(parameters));
        header.insert("seed".into(), self.seed.map_or(Value::Null, Value::from));
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| ((*c).to_owned(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("header".into(), Value::Object(header));
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> anyhow::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                writeln!(out)?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        let mut doc = Document::new("demo", &["name", "value", "n"]);
        doc.param_f("t", 0.7).param("kind", "single");
        doc.seed = Some(42);
        doc.push(vec!["a,b".into(), 0.1.into(), 3usize.into()]);
        doc.push(vec!["c".into(), Cell::Empty, 4usize.into()]);
        doc
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE] {
            assert_eq!(render_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(render_float(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn csv_has_header_block_and_quoting() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# artifact=acfreq");
        assert!(lines.contains(&"# t=6.9999999999999996e-1"));
        assert!(lines.contains(&"# seed=42"));
        assert!(lines.contains(&"name,value,n"));
        assert!(lines.contains(&"\"a,b\",1.0000000000000001e-1,3"));
        assert!(lines.contains(&"c,,4"));
    }

    #[test]
    fn json_preserves_column_order() {
        let v = sample().to_json();
        assert_eq!(v["header"]["seed"], 42);
        let keys: Vec<_> = v["rows"][0].as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["name", "value", "n"]);
        assert!(v["rows"][1]["value"].is_null());
    }
}
