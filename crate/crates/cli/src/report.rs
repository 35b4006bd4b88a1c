//! Tabular reports rendered as text, CSV or JSON.

use std::fmt::Write as _;

use rug::{Complex, Float};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown output format {other:?}")),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub title: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Scientific notation carrying `digits` significant digits.
pub fn sci(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let s = x.to_string_radix(10, Some(digits as usize));
    // rug writes "1.234e5"; keep that form but make the exponent explicit.
    if s.contains('e') || !x.is_finite() {
        s
    } else {
        format!("{s}e0")
    }
}

pub fn sci_complex(z: &Complex, digits: u32) -> (String, String) {
    (sci(z.real(), digits), sci(z.imag(), digits))
}

impl Report {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(out, "# {}", self.title);
        }
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                self.rows
                    .iter()
                    .map(|r| r[j].len())
                    .chain(std::iter::once(self.columns[j].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let _ = writeln!(out, "{}", line(&self.columns));
        for r in &self.rows {
            let _ = writeln!(out, "{}", line(r));
        }
        out
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }

    fn to_json(&self) -> String {
        let mut meta = Map::new();
        meta.insert("title".into(), Value::String(self.title.clone()));
        for (k, v) in &self.meta {
            meta.insert(k.clone(), Value::String(v.clone()));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.clone(), Value::String(v.clone())))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut root = Map::new();
        root.insert("meta".into(), Value::Object(meta));
        root.insert("rows".into(), Value::Array(rows));
        serde_json::to_string_pretty(&Value::Object(root)).expect("json")
    }

    /// Rebuild a report from its CSV rendering (title and meta are not part of CSV).
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(
                rec.map_err(|e| e.to_string())?
                    .iter()
                    .map(String::from)
                    .collect(),
            );
        }
        Ok(Self {
            columns,
            rows,
            ..Self::default()
        })
    }

    /// Rebuild a report from its JSON rendering.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let meta_obj = v
            .get("meta")
            .and_then(Value::as_object)
            .ok_or("missing meta")?;
        let rows_arr = v
            .get("rows")
            .and_then(Value::as_array)
            .ok_or("missing rows")?;
        let mut rep = Report {
            title: meta_obj
                .get("title")
                .and_then(Value::as_str)
                .unwrap_or("")
                .to_string(),
            ..Self::default()
        };
        for (k, val) in meta_obj {
            if k != "title" {
                rep.meta
                    .push((k.clone(), val.as_str().unwrap_or("").to_string()));
            }
        }
        if let Some(first) = rows_arr.first().and_then(Value::as_object) {
            rep.columns = first.keys().cloned().collect();
        }
        for row in rows_arr {
            let obj = row.as_object().ok_or("row is not an object")?;
            rep.rows.push(
                rep.columns
                    .iter()
                    .map(|c| obj.get(c).and_then(Value::as_str).unwrap_or("").to_string())
                    .collect(),
            );
        }
        Ok(rep)
    }
}
