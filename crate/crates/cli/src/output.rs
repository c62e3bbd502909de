//! Column tables written as CSV or JSON, plus metadata sidecars.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!("unknown format '{other}' (csv or json)"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    /// Explicit choice first, then the output extension, then CSV.
    pub fn resolve(explicit: Option<&str>, output: Option<&Path>) -> CliResult<Self> {
        if let Some(f) = explicit {
            return f.parse();
        }
        match output.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Ok(Format::Json),
            _ => Ok(Format::Csv),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Column {
    Int(Vec<i64>),
    Float(Vec<f64>),
    Text(Vec<String>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Int(v) => v.len(),
            Column::Float(v) => v.len(),
            Column::Text(v) => v.len(),
        }
    }

    fn cell(&self, i: usize) -> String {
        match self {
            Column::Int(v) => v[i].to_string(),
            Column::Float(v) => format!("{:.16e}", v[i]),
            Column::Text(v) => v[i].clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Column::Int(v) => Value::from(v.clone()),
            Column::Float(v) => Value::Array(v.iter().map(|&x| float(x)).collect()),
            Column::Text(v) => Value::from(v.clone()),
        }
    }
}

fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    names: Vec<String>,
    columns: Vec<Column>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, column: Column) -> Self {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.len(), column.len(), "column '{name}' has the wrong length");
        }
        self.names.push(name.to_string());
        self.columns.push(column);
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> CliResult<()> {
        let mut wr = csv::Writer::from_writer(w);
        let err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
        wr.write_record(&self.names).map_err(err)?;
        for i in 0..self.rows() {
            wr.write_record(self.columns.iter().map(|c| c.cell(i))).map_err(err)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (n, c) in self.names.iter().zip(&self.columns) {
            m.insert(n.clone(), c.json());
        }
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        let mut buf = Vec::new();
        match format {
            Format::Csv => self.write_csv(&mut buf)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut buf, &self.to_json())
                    .map_err(|e| CliError::Config(format!("json: {e}")))?;
                buf.push(b'\n');
            }
        }
        Ok(buf)
    }
}

/// `dir/stem.ext` -> `dir/stem.<suffix>`
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Writes the table to `path`, or to stdout when no path is given.
pub fn emit(table: &Table, format: Format, path: Option<&Path>) -> CliResult<()> {
    let bytes = table.render(format)?;
    match path {
        Some(p) => write_bytes(p, &bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Config(format!("json: {e}")))?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

/// Sidecar `<stem>.meta.json` next to `data`.
pub fn write_meta(data: &Path, mut meta: Map<String, Value>) -> CliResult<()> {
    meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    write_json(&sibling(data, "meta.json"), &Value::Object(meta))
}

pub fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let t = Table::new()
            .with("n", Column::Int(vec![0, 1]))
            .with("p", Column::Float(vec![0.5, 0.25]))
            .with("level", Column::Text(vec!["g".into(), "e".into()]));
        let s = String::from_utf8(t.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(s, "n,p,level\n0,5.0000000000000000e-1,g\n1,2.5000000000000000e-1,e\n");
    }

    #[test]
    fn json_keeps_column_order() {
        let t = Table::new()
            .with("z", Column::Float(vec![1.0]))
            .with("a", Column::Float(vec![f64::NAN]));
        let s = String::from_utf8(t.render(Format::Json).unwrap()).unwrap();
        assert!(s.find("\"z\"").unwrap() < s.find("\"a\"").unwrap());
        assert!(s.contains("null"));
    }

    #[test]
    fn format_resolution() {
        assert_eq!(Format::resolve(None, Some(Path::new("x.json"))).unwrap(), Format::Json);
        assert_eq!(Format::resolve(None, Some(Path::new("x.dat"))).unwrap(), Format::Csv);
        assert_eq!(Format::resolve(Some("JSON"), None).unwrap(), Format::Json);
        assert!(Format::resolve(Some("xml"), None).is_err());
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(Path::new("a/b/spec.csv"), "meta.json"), PathBuf::from("a/b/spec.meta.json"));
        assert_eq!(sibling(Path::new("pops.csv"), "joint.csv"), PathBuf::from("pops.joint.csv"));
    }
}
