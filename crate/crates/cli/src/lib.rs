//! Batch front end for the `cavityspin` library: config parsing, the
//! scenario registry and deterministic CSV/JSON output.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

use std::path::PathBuf;
use std::time::{Duration, Instant};

pub use config::{parse_config, parse_str, validate, Formats, ScenarioConfig, Value};
pub use error::{CliError, CliResult};
pub use output::Report;
pub use scenarios::{find, Scenario, SCENARIOS};

#[derive(Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub elapsed: Duration,
}

/// Computes the scenario and writes its outputs.
pub fn run_scenario(cfg: &ScenarioConfig) -> CliResult<RunSummary> {
    let start = Instant::now();
    let report = compute(cfg)?;
    let elapsed = start.elapsed();
    let files = output::write_report(cfg, &report, elapsed)?;
    Ok(RunSummary { files, elapsed })
}

/// Runs the scenario without touching the filesystem.
pub fn compute(cfg: &ScenarioConfig) -> CliResult<Report> {
    let mut report = Report::default();
    (cfg.scenario.run)(cfg, &mut report).map_err(|e| e.in_scenario(cfg.scenario.name))?;
    Ok(report)
}

/// Human-readable scenario catalogue with parameter defaults.
fn show(v: &Value) -> String {
    let num = |x: f64| if x.fract() == 0.0 && x.abs() < 1e15 { format!("{}", x as i64) } else { format!("{x}") };
    match v {
        Value::Number(x) => num(*x),
        Value::Bool(b) => b.to_string(),
        Value::Text(t) => t.clone(),
        Value::List(xs) => format!("[{}]", xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")),
    }
}

pub fn describe_scenarios() -> String {
    let mut out = String::new();
    for s in SCENARIOS.iter() {
        out.push_str(&format!("{:<16} {}\n", s.name, s.summary));
        for p in s.params {
            let default = match p.default() {
                Some(v) => show(&v),
                None if p.required() => "required".into(),
                None => "none".into(),
            };
            out.push_str(&format!("    {:<14} {:<10} {}\n", p.key, default, p.doc));
        }
    }
    out
}
