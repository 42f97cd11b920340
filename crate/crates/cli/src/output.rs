use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;
use crate::CliError;

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub program: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Metadata {
    pub fn new(command: &str, seed: u64, config_hash: String) -> Self {
        Metadata {
            program: "exuberance",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config_hash,
        }
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A table with named columns; cells are already formatted.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Extra `# key: value` lines after the metadata.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Table::default()
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self, meta: &Metadata) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} {}", meta.program, meta.version);
        let _ = writeln!(s, "# command: {}", meta.command);
        let _ = writeln!(s, "# seed: {}", meta.seed);
        let _ = writeln!(s, "# config_hash: {}", meta.config_hash);
        for (k, v) in &self.notes {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s.push_str(&self.header.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    fn to_json(&self, meta: &Metadata) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, Value> = self
                    .header
                    .iter()
                    .zip(r)
                    .map(|(h, v)| (h.clone(), cell_value(v)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let notes: serde_json::Map<String, Value> =
            self.notes.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        json!({ "metadata": meta, "notes": notes, "rows": rows })
    }
}

fn cell_value(v: &str) -> Value {
    if let Ok(i) = v.parse::<i64>() {
        return json!(i);
    }
    match v.parse::<f64>() {
        Ok(f) if f.is_finite() => json!(f),
        _ => match v {
            "true" => json!(true),
            "false" => json!(false),
            "" => Value::Null,
            _ => json!(v),
        },
    }
}

/// Shortest round-trip text of a float.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub struct Writer {
    pub dir: PathBuf,
    pub format: Format,
    pub meta: Metadata,
    pub written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path, format: Format, meta: Metadata) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            format,
            meta,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// Writes `stem.csv` or `stem.json` according to the chosen format.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        match self.format {
            Format::Csv => {
                let text = table.to_csv(&self.meta);
                self.write(&format!("{stem}.csv"), &text)
            }
            Format::Json => {
                let text = pretty(&table.to_json(&self.meta));
                self.write(&format!("{stem}.json"), &text)
            }
        }
    }

    /// Always JSON: `{"metadata": ..., "result": ...}`.
    pub fn json<T: Serialize>(&mut self, stem: &str, result: &T) -> Result<(), CliError> {
        let value = json!({ "metadata": self.meta, "result": result });
        let text = pretty(&value);
        self.write(&format!("{stem}.json"), &text)
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
