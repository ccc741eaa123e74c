//! Scenario registry. Each scenario declares its parameters up front so
//! configs can be validated before any work starts.

use crate::config::{ScenarioConfig, Value};
use crate::error::CliResult;
use crate::output::Report;

mod budget;
mod cv;
mod dicke;
mod floquet;
mod metrology;
mod qnd;
mod spectra;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Number,
    Integer,
    Text,
    Bool,
    List,
    /// A number or the string `none`.
    OptionalNumber,
}

impl Kind {
    pub fn describe(&self) -> &'static str {
        match self {
            Kind::Number => "a number",
            Kind::Integer => "a non-negative integer",
            Kind::Text => "a string",
            Kind::Bool => "true or false",
            Kind::List => "a numeric list",
            Kind::OptionalNumber => "a number or none",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Default {
    Required,
    Absent,
    Num(f64),
    Text(&'static str),
    Bool(bool),
    List(&'static [f64]),
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    pub default: Default,
    pub choices: &'static [&'static str],
    pub doc: &'static str,
}

impl Param {
    pub fn default(&self) -> Option<Value> {
        match self.default {
            Default::Required | Default::Absent => None,
            Default::Num(x) => Some(Value::Number(x)),
            Default::Text(s) => Some(Value::Text(s.to_string())),
            Default::Bool(b) => Some(Value::Bool(b)),
            Default::List(v) => Some(Value::List(v.to_vec())),
        }
    }

    pub fn required(&self) -> bool {
        matches!(self.default, Default::Required)
    }
}

pub(crate) const fn req(key: &'static str, kind: Kind, doc: &'static str) -> Param {
    Param { key, kind, default: Default::Required, choices: &[], doc }
}

pub(crate) const fn num(key: &'static str, x: f64, doc: &'static str) -> Param {
    Param { key, kind: Kind::Number, default: Default::Num(x), choices: &[], doc }
}

pub(crate) const fn int(key: &'static str, x: u32, doc: &'static str) -> Param {
    Param { key, kind: Kind::Integer, default: Default::Num(x as f64), choices: &[], doc }
}

pub(crate) const fn list(key: &'static str, v: &'static [f64], doc: &'static str) -> Param {
    Param { key, kind: Kind::List, default: Default::List(v), choices: &[], doc }
}

pub(crate) const fn opt(key: &'static str, doc: &'static str) -> Param {
    Param { key, kind: Kind::OptionalNumber, default: Default::Absent, choices: &[], doc }
}

pub(crate) const fn choice(key: &'static str, default: &'static str, choices: &'static [&'static str], doc: &'static str) -> Param {
    Param { key, kind: Kind::Text, default: Default::Text(default), choices, doc }
}

pub type Runner = fn(&ScenarioConfig, &mut Report) -> CliResult<()>;

#[derive(Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [Param],
    pub run: Runner,
}

pub static SCENARIOS: [&Scenario; 15] = [
    &budget::BUDGET,
    &spectra::JC_SPECTRUM,
    &metrology::OAT,
    &qnd::QND_SQUEEZE,
    &qnd::PARITY_CAT,
    &qnd::FOCK_COLLAPSE,
    &qnd::W_STATE,
    &qnd::PAINT,
    &metrology::ECHO,
    &metrology::ALLAN,
    &floquet::FLOQUET_GRAPH,
    &floquet::QUENCH_GEOMETRY,
    &cv::GRAPH_STATE,
    &dicke::DICKE_MEANFIELD,
    &floquet::SY_BUILD,
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().copied().find(|s| s.name == name)
}

pub(crate) use cavityspin::optimize::{linspace, logspace};

/// Positive integer parameter that fits in `u32`.
pub(crate) fn count(cfg: &ScenarioConfig, key: &str) -> CliResult<u32> {
    let x = cfg.integer(key);
    if x == 0 || x > u32::MAX as u64 {
        return Err(crate::error::CliError::config(format!("`{key}` must be a positive integer, got {x}")));
    }
    Ok(x as u32)
}
