use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::{json, Map, Value as Json};

use crate::config::{Formats, ScenarioConfig};
use crate::error::{CliError, CliResult};

/// One CSV cell. Floats are written with 12 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(file: impl Into<String>, columns: &[&str]) -> Self {
        Table { file: file.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn with_columns(file: impl Into<String>, columns: Vec<String>) -> Self {
        Table { file: file.into(), columns, rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.file);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::numeric(format!("writing {}: {e}", self.file));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::numeric(format!("writing {}: {e}", self.file)))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Everything a scenario produces. Scalars land in `results.json`, tables in
/// their own CSV files, and `extra` holds pre-rendered files (JSON spectra,
/// coupling matrices) written verbatim.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub scalars: Map<String, Json>,
    pub tables: Vec<Table>,
    pub extra: Vec<(String, String)>,
}

impl Report {
    pub fn scalar(&mut self, key: &str, value: impl Into<Json>) {
        self.scalars.insert(key.to_string(), value.into());
    }

    /// Floats that may be non-finite; JSON has no NaN so those become strings.
    pub fn number(&mut self, key: &str, x: f64) {
        let v = if x.is_finite() { json!(x) } else { json!(format_float(x)) };
        self.scalars.insert(key.to_string(), v);
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn file(&mut self, name: impl Into<String>, contents: impl Into<String>) {
        self.extra.push((name.into(), contents.into()));
    }
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

/// Writes the report and returns the list of files created.
pub fn write_report(cfg: &ScenarioConfig, report: &Report, elapsed: Duration) -> CliResult<Vec<PathBuf>> {
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
    let Formats { csv, json: want_json } = cfg.formats;
    let mut written = Vec::new();
    let mut names: Vec<String> = Vec::new();
    if csv {
        for t in &report.tables {
            let path = dir.join(&t.file);
            write(&path, &t.to_csv()?)?;
            names.push(t.file.clone());
            written.push(path);
        }
    }
    for (name, contents) in &report.extra {
        let is_json = name.ends_with(".json");
        if (is_json && want_json) || (!is_json && csv) {
            let path = dir.join(name);
            write(&path, contents)?;
            names.push(name.clone());
            written.push(path);
        }
    }
    if want_json {
        let results = json!({
            "scenario": cfg.scenario.name,
            "seed": cfg.seed,
            "versions": {
                "cavityspin": cavityspin::VERSION,
                "cavityspin-cli": env!("CARGO_PKG_VERSION"),
            },
            "parameters": cfg.params,
            "results": report.scalars,
            "files": names,
            "timing_file": "timing.json",
        });
        let path = dir.join("results.json");
        write(&path, &(serde_json::to_string_pretty(&results).expect("serializable") + "\n"))?;
        written.push(path);
        let timing = json!({ "scenario": cfg.scenario.name, "wall_time_s": elapsed.as_secs_f64() });
        let path = dir.join("timing.json");
        write(&path, &(serde_json::to_string_pretty(&timing).expect("serializable") + "\n"))?;
        written.push(path);
    }
    Ok(written)
}
