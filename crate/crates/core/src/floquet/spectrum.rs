use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::coupling::{Boundary, CouplingMatrix};

/// Translation-invariant coupling table `𝒥(r)` keyed by distance.
pub type DistanceTable = BTreeMap<usize, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub r: usize,
    pub amp: f64,
    pub phase: f64,
}

/// Drive tones at frequencies `r·ω_B` on top of a linear field gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationSpectrum {
    #[serde(rename = "omega_B")]
    pub omega_b: f64,
    pub tones: Vec<Tone>,
}

impl ModulationSpectrum {
    pub fn new(omega_b: f64, tones: Vec<Tone>) -> Result<Self> {
        if !(omega_b > 0.0) || !omega_b.is_finite() {
            return Err(Error::param("omega_B", format!("gradient must be positive, got {omega_b}")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &tones {
            if t.r == 0 {
                return Err(Error::param("r", "tone distances start at 1"));
            }
            if !(t.amp >= 0.0) || !t.amp.is_finite() || !t.phase.is_finite() {
                return Err(Error::param("tones", format!("bad amplitude/phase at r = {}", t.r)));
            }
            if !seen.insert(t.r) {
                return Err(Error::DuplicateDistance(t.r));
            }
        }
        Ok(ModulationSpectrum { omega_b, tones })
    }

    /// `Re[A_r e^{iφ_r}]` per distance.
    pub fn table(&self) -> DistanceTable {
        self.tones.iter().map(|t| (t.r, t.amp * t.phase.cos())).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain numeric record")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: ModulationSpectrum =
            serde_json::from_value(v.clone()).map_err(|e| Error::Io(format!("spectrum JSON: {e}")))?;
        ModulationSpectrum::new(raw.omega_b, raw.tones)
    }
}

#[derive(Debug, Clone)]
pub struct ProgrammedCouplings {
    pub couplings: CouplingMatrix,
    /// False when some tone amplitude exceeds `ω_B/10`, where neighbouring
    /// sidebands are no longer resolved.
    pub rwa_valid: bool,
}

/// Site distance under the boundary rule.
pub(crate) fn distance(i: usize, j: usize, m: usize, boundary: Boundary) -> usize {
    let d = i.abs_diff(j);
    match boundary {
        Boundary::Open => d,
        Boundary::Periodic => d.min(m - d),
    }
}

/// Assembles `J_ij = 𝒥(dist(i, j))` from a distance table.
pub fn table_to_couplings(table: &DistanceTable, m: usize, boundary: Boundary) -> Result<CouplingMatrix> {
    for &r in table.keys() {
        let ok = match boundary {
            Boundary::Open => r >= 1 && r < m,
            Boundary::Periodic => r >= 1 && 2 * r <= m,
        };
        if !ok {
            return Err(Error::param("r", format!("distance {r} not realizable on {m} sites with {boundary:?} boundary")));
        }
    }
    let j = DMatrix::from_fn(m, m, |a, b| {
        if a == b {
            0.0
        } else {
            table.get(&distance(a, b, m, boundary)).copied().unwrap_or(0.0)
        }
    });
    CouplingMatrix::new(j, boundary)
}

pub fn spectrum_to_couplings(spec: &ModulationSpectrum, m: usize, boundary: Boundary) -> Result<ProgrammedCouplings> {
    let couplings = table_to_couplings(&spec.table(), m, boundary)?;
    let max_amp = spec.tones.iter().map(|t| t.amp).fold(0.0, f64::max);
    Ok(ProgrammedCouplings { couplings, rwa_valid: max_amp <= spec.omega_b / 10.0 })
}

/// One tone per non-zero distance: amplitude `|𝒥(r)|`, phase 0 or π by sign.
pub fn couplings_to_spectrum(table: &DistanceTable, omega_b: f64) -> Result<ModulationSpectrum> {
    let tones = table
        .iter()
        .filter(|(_, v)| **v != 0.0)
        .map(|(&r, &v)| Tone { r, amp: v.abs(), phase: if v < 0.0 { PI } else { 0.0 } })
        .collect();
    ModulationSpectrum::new(omega_b, tones)
}

#[derive(Debug, Clone, Serialize)]
pub struct Dispersion {
    pub k: Vec<f64>,
    pub energy: Vec<f64>,
}

/// `ℰ(k) = Σ_r 2𝒥(r) cos(kr)` on `k = 2πn/M`, `n = 0..M`.
pub fn magnon_dispersion(table: &DistanceTable, m: usize, boundary: Boundary) -> Result<Dispersion> {
    if boundary != Boundary::Periodic {
        return Err(Error::param("boundary", "the magnon dispersion needs periodic boundaries"));
    }
    if m == 0 {
        return Err(Error::param("M", "need at least one site"));
    }
    let k: Vec<f64> = (0..m).map(|n| 2.0 * PI * n as f64 / m as f64).collect();
    let energy = k.iter().map(|&k| table.iter().map(|(&r, &j)| 2.0 * j * (k * r as f64).cos()).sum()).collect();
    Ok(Dispersion { k, energy })
}
