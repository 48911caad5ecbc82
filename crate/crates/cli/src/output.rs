use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Reproducibility header embedded in every JSON document.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub params: Value,
}

impl Meta {
    pub fn new(command: &str, seed: Option<u64>, params: impl Serialize) -> Self {
        Meta {
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_owned(),
            seed,
            params: serde_json::to_value(params).unwrap_or(Value::Null),
        }
    }
}

/// A flat table for CSV output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn cell<T: ToString>(x: T) -> String {
    x.to_string()
}

pub fn opt_cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Where command output goes.
pub struct Sink {
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Sink {
    pub fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    /// Emit `body` with `meta` folded in: objects gain a `meta` key, other
    /// values are wrapped as `{meta, result}`. CSV output uses `table`.
    pub fn emit(&self, meta: &Meta, body: impl Serialize, table: impl FnOnce() -> Table) -> Result<()> {
        let mut w = self.writer()?;
        match self.format {
            Format::Json => {
                let doc = with_meta(meta, serde_json::to_value(body)?);
                serde_json::to_writer_pretty(&mut w, &doc)?;
                writeln!(w)?;
            }
            Format::Csv => write_table(&table(), &mut w)?,
        }
        w.flush()?;
        Ok(())
    }
}

pub fn with_meta(meta: &Meta, body: Value) -> Value {
    let meta = serde_json::to_value(meta).expect("meta serializes");
    match body {
        Value::Object(map) => {
            let mut out = Map::new();
            out.insert("meta".into(), meta);
            out.extend(map);
            Value::Object(out)
        }
        other => json!({ "meta": meta, "result": other }),
    }
}

pub fn write_table(t: &Table, w: &mut dyn Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(&t.headers)?;
    for r in &t.rows {
        wtr.write_record(r)?;
    }
    wtr.flush()?;
    Ok(())
}
