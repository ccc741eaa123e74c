use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::optimize;

#[derive(Debug, Clone, Serialize)]
pub struct RabiSpectrum {
    /// Probe detuning from the common atom-cavity resonance.
    pub detuning: Vec<f64>,
    /// `|t(δ)|²`, unity on an empty resonant cavity.
    pub transmission: Vec<f64>,
    /// Refined local maxima, ascending.
    pub peaks: Vec<f64>,
    /// Distance between the outermost peaks, `None` with fewer than two.
    pub splitting: Option<f64>,
}

fn amplitude(delta: f64, coupling2: f64, kappa: f64, gamma: f64) -> C64 {
    let cav = C64::new(kappa / 2.0, -delta);
    let atom = C64::new(gamma / 2.0, -delta);
    C64::new(kappa / 2.0, 0.0) / (cav + coupling2 / atom)
}

/// Weak-probe transmission of a resonant cavity holding `N` two-level atoms
/// coupled collectively with `g√N`; half-widths `κ/2` and `Γ/2`.
pub fn vacuum_rabi_spectrum(g: f64, n: u32, kappa: f64, gamma: f64, grid: &[f64]) -> Result<RabiSpectrum> {
    if !(g >= 0.0) || !(kappa > 0.0) || !(gamma >= 0.0) {
        return Err(Error::param("g", "need g ≥ 0, κ > 0, Γ ≥ 0"));
    }
    if grid.len() < 3 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("grid", "need at least three increasing detunings"));
    }
    let reach = 3.0 * g * (n as f64).sqrt();
    if grid[0] > -reach || grid[grid.len() - 1] < reach {
        return Err(Error::param("grid", format!("must cover ±3g√N = ±{reach}")));
    }
    let coupling2 = g * g * n as f64;
    let t2 = |d: f64| amplitude(d, coupling2, kappa, gamma).norm_sqr();
    let transmission: Vec<f64> = grid.iter().map(|&d| t2(d)).collect();
    let mut peaks = Vec::new();
    for k in 1..grid.len() - 1 {
        if transmission[k] > transmission[k - 1] && transmission[k] >= transmission[k + 1] {
            let (x, _) = optimize::golden_section(|d| -t2(d), grid[k - 1], grid[k + 1], 1e-12);
            peaks.push(x);
        }
    }
    let splitting = (peaks.len() >= 2).then(|| peaks[peaks.len() - 1] - peaks[0]);
    Ok(RabiSpectrum { detuning: grid.to_vec(), transmission, peaks, splitting })
}
