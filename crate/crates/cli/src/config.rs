//! Scenario configuration files.
//!
//! Grammar, one scenario per file:
//!
//! ```text
//! # comment
//! [oat]
//! N = 40  chi = 1.0      # several pairs may share a line
//! N_list = [20, 40, 80]
//! out_dir = "runs/oat"
//! ```
//!
//! Values are numbers, `true`/`false`, quoted or bare strings, or bracketed
//! numeric lists. `seed`, `out_dir` and `format` are accepted by every
//! scenario; anything else must be declared by the scenario itself.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::scenarios::{self, Kind, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Bool(bool),
    Text(String),
    List(Vec<f64>),
}

impl Value {
    fn kind_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Bool(_) => "boolean",
            Value::Text(_) => "string",
            Value::List(_) => "list",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats { csv: true, json: true }
    }
}

impl Formats {
    pub fn parse(spec: &str) -> CliResult<Self> {
        let mut f = Formats { csv: false, json: false };
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "csv" => f.csv = true,
                "json" => f.json = true,
                other => return Err(CliError::config(format!("unknown output format `{other}` (expected csv, json)"))),
            }
        }
        if !f.csv && !f.json {
            return Err(CliError::config("no output format selected"));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: &'static Scenario,
    /// Declared parameters with defaults filled in.
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub formats: Formats,
}

impl ScenarioConfig {
    pub fn number(&self, key: &str) -> f64 {
        match self.params.get(key) {
            Some(Value::Number(x)) => *x,
            other => panic!("parameter `{key}` validated as a number, found {other:?}"),
        }
    }

    pub fn integer(&self, key: &str) -> u64 {
        self.number(key) as u64
    }

    pub fn text(&self, key: &str) -> &str {
        match self.params.get(key) {
            Some(Value::Text(s)) => s,
            other => panic!("parameter `{key}` validated as a string, found {other:?}"),
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        match self.params.get(key) {
            Some(Value::Bool(b)) => *b,
            other => panic!("parameter `{key}` validated as a boolean, found {other:?}"),
        }
    }

    pub fn list(&self, key: &str) -> &[f64] {
        match self.params.get(key) {
            Some(Value::List(v)) => v,
            other => panic!("parameter `{key}` validated as a list, found {other:?}"),
        }
    }

    /// Optional number: absent keys and the string `none` map to `None`.
    pub fn maybe_number(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(Value::Number(x)) => Some(*x),
            _ => None,
        }
    }
}

/// Raw parse result before scenario validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawConfig {
    pub section: String,
    pub entries: Vec<(String, Value, usize)>,
}

fn syntax(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::config(format!("line {line}: {msg}"))
}

fn parse_scalar(token: &str, line: usize) -> CliResult<Value> {
    if token.is_empty() {
        return Err(syntax(line, "missing value"));
    }
    Ok(match token {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => match token.parse::<f64>() {
            Ok(x) => Value::Number(x),
            Err(_) => match token {
                "inf" | "+inf" => Value::Number(f64::INFINITY),
                "-inf" => Value::Number(f64::NEG_INFINITY),
                _ => Value::Text(token.to_string()),
            },
        },
    })
}

pub fn parse_str(text: &str) -> CliResult<RawConfig> {
    let mut section: Option<String> = None;
    let mut entries: Vec<(String, Value, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < chars.len() && chars[*i].is_whitespace() {
                *i += 1;
            }
        };
        loop {
            skip_ws(&mut i);
            if i >= chars.len() || chars[i] == '#' {
                break;
            }
            if chars[i] == '[' {
                let close = chars[i..].iter().position(|&c| c == ']').ok_or_else(|| syntax(line, "unterminated section header"))?;
                let name: String = chars[i + 1..i + close].iter().collect::<String>().trim().to_string();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(syntax(line, format!("bad section name `{name}`")));
                }
                if let Some(prev) = &section {
                    return Err(syntax(line, format!("second section `[{name}]` after `[{prev}]`; one scenario per file")));
                }
                section = Some(name);
                i += close + 1;
                continue;
            }
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if i == start {
                return Err(syntax(line, format!("unexpected character `{}`", chars[i])));
            }
            let key: String = chars[start..i].iter().collect();
            skip_ws(&mut i);
            if i >= chars.len() || chars[i] != '=' {
                return Err(syntax(line, format!("expected `=` after `{key}`")));
            }
            i += 1;
            skip_ws(&mut i);
            if i >= chars.len() {
                return Err(syntax(line, format!("missing value for `{key}`")));
            }
            let value = match chars[i] {
                '"' => {
                    let close = chars[i + 1..].iter().position(|&c| c == '"').ok_or_else(|| syntax(line, "unterminated string"))?;
                    let s: String = chars[i + 1..i + 1 + close].iter().collect();
                    i += close + 2;
                    Value::Text(s)
                }
                '[' => {
                    let close = chars[i..].iter().position(|&c| c == ']').ok_or_else(|| syntax(line, "unterminated list"))?;
                    let body: String = chars[i + 1..i + close].iter().collect();
                    i += close + 1;
                    let mut items = Vec::new();
                    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                        match parse_scalar(part, line)? {
                            Value::Number(x) => items.push(x),
                            _ => return Err(syntax(line, format!("list `{key}` must hold numbers, found `{part}`"))),
                        }
                    }
                    Value::List(items)
                }
                _ => {
                    let start = i;
                    while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '#' {
                        i += 1;
                    }
                    parse_scalar(&chars[start..i].iter().collect::<String>(), line)?
                }
            };
            if section.is_none() {
                return Err(syntax(line, format!("`{key}` appears before the `[scenario]` header")));
            }
            if entries.iter().any(|(k, _, _)| *k == key) {
                return Err(syntax(line, format!("duplicate key `{key}`")));
            }
            entries.push((key, value, line));
        }
    }
    let section = section.ok_or_else(|| CliError::config("no `[scenario]` header found"))?;
    Ok(RawConfig { section, entries })
}

const COMMON_KEYS: [&str; 3] = ["seed", "out_dir", "format"];

/// Checks a raw parse against the scenario's declared parameters.
pub fn validate(raw: &RawConfig) -> CliResult<ScenarioConfig> {
    let scenario = scenarios::find(&raw.section)
        .ok_or_else(|| CliError::config(format!("unknown scenario `{}`; see `list-scenarios`", raw.section)))?;
    let mut params = BTreeMap::new();
    let mut seed = 0u64;
    let mut out_dir = PathBuf::from(format!("out/{}", scenario.name));
    let mut formats = Formats::default();
    for (key, value, line) in &raw.entries {
        let at = |msg: String| CliError::config(format!("line {line}: {msg}")).in_scenario(scenario.name);
        match key.as_str() {
            "seed" => match value {
                Value::Number(x) if *x >= 0.0 && x.fract() == 0.0 && *x <= u64::MAX as f64 => seed = *x as u64,
                _ => return Err(at("`seed` must be a non-negative integer".into())),
            },
            "out_dir" => match value {
                Value::Text(s) => out_dir = PathBuf::from(s),
                _ => return Err(at("`out_dir` must be a string".into())),
            },
            "format" => match value {
                Value::Text(s) => formats = Formats::parse(s).map_err(|e| at(e.message))?,
                _ => return Err(at("`format` must be a string such as \"csv,json\"".into())),
            },
            _ => {
                let spec = scenario
                    .params
                    .iter()
                    .find(|p| p.key == key)
                    .ok_or_else(|| at(format!("unknown key `{key}`")))?;
                let ok = match (spec.kind, value) {
                    (Kind::Number, Value::Number(_)) | (Kind::Text, Value::Text(_)) | (Kind::Bool, Value::Bool(_)) => true,
                    (Kind::Integer, Value::Number(x)) => *x >= 0.0 && x.fract() == 0.0,
                    (Kind::List, Value::List(_)) => true,
                    (Kind::OptionalNumber, Value::Number(_)) => true,
                    (Kind::OptionalNumber, Value::Text(s)) => s == "none",
                    _ => false,
                };
                if !ok {
                    return Err(at(format!("`{key}` expects {}, got {}", spec.kind.describe(), value.kind_name())));
                }
                if let (Kind::Text, Value::Text(s)) = (spec.kind, value) {
                    if !spec.choices.is_empty() && !spec.choices.contains(&s.as_str()) {
                        return Err(at(format!("`{key}` must be one of {:?}, got `{s}`", spec.choices)));
                    }
                }
                params.insert(key.clone(), value.clone());
            }
        }
    }
    for spec in scenario.params {
        if !params.contains_key(spec.key) {
            match spec.default() {
                Some(v) => {
                    params.insert(spec.key.to_string(), v);
                }
                None if spec.kind == Kind::OptionalNumber => {}
                None => {
                    return Err(CliError::config(format!("missing required key `{}`", spec.key)).in_scenario(scenario.name))
                }
            }
        }
    }
    debug_assert!(COMMON_KEYS.iter().all(|k| scenario.params.iter().all(|p| p.key != *k)));
    Ok(ScenarioConfig { scenario, params, seed, out_dir, formats })
}

pub fn parse_config(path: &Path) -> CliResult<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    validate(&parse_str(&text)?)
}
