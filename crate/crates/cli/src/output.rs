//! Dataset writers. CSV files open with `# key: value` metadata lines; the
//! `# generated:` line is the only one that changes between identical runs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::failure::Failure;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DB_CONVENTION: &str = "dB = 10*log10(R), R = variance ratio";
pub const NORMALIZATION: &str =
    "zero mode psi1, phi1 rescaled by 1/sqrt(2) so <Phi1|Psi1> = 1 (printed prefactor gives 2)";

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) if v.is_finite() => json!(v),
            Cell::F(v) => json!(fmt_f64(*v)),
            Cell::I(v) => json!(v),
            Cell::S(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

/// Shortest round-trip representation in exponent form.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

/// Long-format table: one row per sample, explicit axis columns.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
            meta: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }
}

pub struct Writer {
    pub dir: PathBuf,
    pub format: Format,
    /// Resolved configuration (without the output section), compact JSON.
    config: String,
    subcommand: String,
    pub written: Vec<PathBuf>,
}

fn timestamp() -> String {
    let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    format!("{}.{:03} s since unix epoch", t.as_secs(), t.subsec_millis())
}

impl Writer {
    pub fn new(dir: &Path, format: Format, config: &impl Serialize, subcommand: &str) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        let mut cfg = serde_json::to_value(config).expect("config serializes");
        if let Value::Object(m) = &mut cfg {
            m.remove("output");
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            config: cfg.to_string(),
            subcommand: subcommand.into(),
            written: vec![],
        })
    }

    fn header(&self, t: &Table) -> Vec<(String, String)> {
        let mut h = vec![
            ("tool".to_string(), format!("darksqueeze {VERSION}")),
            ("dataset".to_string(), t.name.clone()),
            ("subcommand".to_string(), self.subcommand.clone()),
            ("convention.dB".to_string(), DB_CONVENTION.to_string()),
            ("convention.normalization".to_string(), NORMALIZATION.to_string()),
        ];
        h.extend(t.meta.iter().cloned());
        h.push(("config".to_string(), self.config.clone()));
        h
    }

    pub fn table(&mut self, t: &Table) -> Result<(), Failure> {
        match self.format {
            Format::Csv => {
                let mut s = String::new();
                for (k, v) in self.header(t) {
                    let _ = writeln!(s, "# {k}: {}", v.replace('\n', " "));
                }
                let _ = writeln!(s, "# generated: {}", timestamp());
                let _ = writeln!(s, "{}", t.columns.join(","));
                for row in &t.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                self.write(&format!("{}.csv", t.name), &s)
            }
            Format::Json => {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> =
                            t.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                        Value::Object(m)
                    })
                    .collect();
                let v = self.wrap(t.name.as_str(), &self.header(t), json!(rows));
                self.write(&format!("{}.json", t.name), &v)
            }
        }
    }

    /// JSON document `{meta, generated, <key>: payload}`; one key per line so
    /// the timestamp sits on its own line.
    fn wrap(&self, key: &str, header: &[(String, String)], payload: Value) -> String {
        let meta: Map<String, Value> = header
            .iter()
            .map(|(k, v)| {
                let val = if k == "config" { serde_json::from_str(v).unwrap_or(json!(v)) } else { json!(v) };
                (k.clone(), val)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        doc.insert("generated".into(), json!(timestamp()));
        doc.insert(key.into(), payload);
        serde_json::to_string_pretty(&Value::Object(doc)).expect("json") + "\n"
    }

    /// Report-style JSON document; always JSON regardless of the format.
    pub fn json(&mut self, name: &str, key: &str, payload: &impl Serialize, meta: &[(&str, String)]) -> Result<(), Failure> {
        let t = meta.iter().fold(Table::new(name, &[]), |t, (k, v)| t.meta(k, v));
        let v = self.wrap(key, &self.header(&t), serde_json::to_value(payload).expect("payload serializes"));
        self.write(&format!("{name}.json"), &v)
    }

    pub fn raw(&mut self, file: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.dir.join(file);
        fs::write(&path, bytes).map_err(|e| Failure::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn write(&mut self, file: &str, body: &str) -> Result<(), Failure> {
        self.raw(file, body.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 3.08e-7, -2.5, 1e300, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
