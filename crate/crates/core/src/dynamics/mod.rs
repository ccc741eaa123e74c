//! Time-evolution engines.

mod dicke;
mod lindblad;
mod trajectories;
mod unitary;

pub use dicke::{dicke_threshold, mean_field_dicke, DickeMeanField, DickePoint};
pub use lindblad::{dissipative_oat, evolve_lindblad, evolve_lindblad_at, Collapse, DissipativeOat, LindbladOptions};
pub use trajectories::{
    bcs_protection_threshold, mean_field_trajectories, InitialSpins, SpinModel, TrajectoryEnsemble,
    TrajectoryOptions,
};
pub use unitary::{evolve_unitary, evolve_unitary_at};

use serde::Serialize;

use crate::spin::{QuantumState, SpinMoments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Diagonal,
    Eigen,
    Krylov,
    RungeKutta45,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Diagnostics {
    pub method: Method,
    pub steps: usize,
    pub rejected: usize,
    pub max_error: f64,
    /// `max_t |tr ρ(t) − 1|` (Lindblad) or `max_t |‖ψ(t)‖ − 1|` (unitary).
    pub trace_drift: f64,
}

impl Diagnostics {
    fn new(method: Method) -> Self {
        Diagnostics { method, steps: 0, rejected: 0, max_error: 0.0, trace_drift: 0.0 }
    }
}

/// Snapshots of an evolution. `states` may be empty when only moment
/// tracks were kept; `spin_moments` is empty when the space has no spin.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub spin_moments: Vec<SpinMoments>,
    pub diagnostics: Diagnostics,
}

impl EvolutionResult {
    pub fn final_state(&self) -> Option<&QuantumState> {
        self.states.last()
    }
}

/// `n` evenly spaced times in `[0, t]`; a single snapshot means `t` only.
pub(crate) fn snapshot_times(t: f64, n: usize) -> Vec<f64> {
    match n {
        0 | 1 => vec![t],
        _ => (0..n).map(|k| t * k as f64 / (n - 1) as f64).collect(),
    }
}

pub(crate) fn check_times(times: &[f64]) -> crate::Result<()> {
    if times.is_empty() {
        return Err(crate::Error::param("times", "need at least one time"));
    }
    let mut prev = 0.0;
    for &t in times {
        if !(t >= prev) || !t.is_finite() {
            return Err(crate::Error::param("times", "must be finite, non-negative and non-decreasing"));
        }
        prev = t;
    }
    Ok(())
}
