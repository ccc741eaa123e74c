//! Measurement-based state preparation: heralded parity cats, progressive
//! photon-number collapse, conditional spin squeezing, Faraday W states,
//! pulse-shaped painting and vacuum-Rabi spectra.

mod faraday;
mod parity;
mod rabi;
mod squeeze;

use serde::Serialize;

use crate::spin::QuantumState;

pub use faraday::{cat_state, herald_w_faraday, paint, PaintTarget, PulseShape, WHerald};
pub use parity::{cutoff_bound, parity_herald, progressive_collapse, CollapseTrack, ParityHerald, DEFAULT_SCHEDULE};
pub use rabi::{vacuum_rabi_spectrum, RabiSpectrum};
pub use squeeze::{conditional_squeeze_gaussian, ConditionalSqueezing};

/// One branch of a heralded measurement.
#[derive(Debug, Clone)]
pub struct HeraldedOutcome {
    pub label: String,
    pub probability: f64,
    /// Normalized post-measurement state; `None` when the branch cannot occur.
    pub state: Option<QuantumState>,
    /// Fidelity with the declared target, when one is defined.
    pub fidelity: Option<f64>,
}

/// Serializable scalar view of a [`HeraldedOutcome`].
#[derive(Debug, Clone, Serialize)]
pub struct OutcomeSummary {
    pub label: String,
    pub probability: f64,
    pub fidelity: Option<f64>,
}

impl HeraldedOutcome {
    pub fn summary(&self) -> OutcomeSummary {
        OutcomeSummary { label: self.label.clone(), probability: self.probability, fidelity: self.fidelity }
    }
}
