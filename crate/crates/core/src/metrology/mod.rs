//! Metrological figures of merit: Wineland parameter, quantum Fisher
//! information of pure states, Allan deviation, the one-axis-twisting
//! optimum and the time-reversal echo.

mod echo;
mod oat;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::spin::{squeezing_ellipse, spin_moments, QuantumState};

pub use echo::{echo_protocol, echo_scan, EchoAxis, EchoPoint, EchoProtocol, EchoResult};
pub use oat::{oat_optimum_scan, oat_scaling, oat_state, OatOptimum, OatScaling};

/// Angles sampled before golden-section refinement of the ellipse.
const ELLIPSE_GRID: usize = 64;

/// `ξ² = N V_min / |⟨S⟩|²`.
pub fn wineland_xi2(state: &QuantumState, n_atoms: u32) -> Result<f64> {
    let e = squeezing_ellipse(state, ELLIPSE_GRID)?;
    let len2: f64 = e.mean_spin.iter().map(|x| x * x).sum();
    if len2.sqrt() <= 1e-9 * n_atoms as f64 {
        return Err(Error::ZeroMeanSpin);
    }
    Ok(n_atoms as f64 * e.v_min / len2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Qfi {
    /// `I = 4 Var(n·S)`.
    pub qfi: f64,
    /// `ξ²_I = N / I`.
    pub xi2: f64,
    pub axis: [f64; 3],
}

fn require_pure(state: &QuantumState) -> Result<u32> {
    if !state.is_pure() {
        return Err(Error::InvalidState("quantum Fisher information here is defined for pure states".into()));
    }
    let (_, spin) = state.space().spin_factor().ok_or_else(|| Error::param("state", "no spin factor"))?;
    Ok(spin.n_atoms())
}

/// Fisher information for rotations about `axis` of a pure state.
pub fn qfi_pure(state: &QuantumState, axis: [f64; 3]) -> Result<Qfi> {
    let n = require_pure(state)?;
    let len = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (len - 1.0).abs() > crate::tol::ALGEBRAIC {
        return Err(Error::NonUnitAxis(len));
    }
    let qfi = 4.0 * spin_moments(state)?.variance_along(axis);
    Ok(Qfi { qfi, xi2: n as f64 / qfi, axis })
}

/// Fisher information along the axis that maximizes it: the top
/// eigenvector of the spin covariance matrix.
pub fn qfi_optimal(state: &QuantumState) -> Result<Qfi> {
    let n = require_pure(state)?;
    let m = spin_moments(state)?;
    let (vals, vecs) = linalg::symmetric_eigh(&m.cov_matrix());
    let axis = [vecs[(0, 2)], vecs[(1, 2)], vecs[(2, 2)]];
    let qfi = 4.0 * vals[2];
    Ok(Qfi { qfi, xi2: n as f64 / qfi, axis })
}

/// `σ(τ) = ξ/(√N ω T) · √(T_cycle/τ)` on each `τ`.
pub fn allan_deviation(xi: f64, n: f64, omega: f64, t: f64, t_cycle: f64, taus: &[f64]) -> Result<Vec<f64>> {
    for (name, v) in [("xi", xi), ("N", n), ("omega", omega), ("T", t), ("T_cycle", t_cycle)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    if t_cycle < t {
        return Err(Error::param("T_cycle", format!("cycle time {t_cycle} shorter than interrogation {t}")));
    }
    if taus.iter().any(|&tau| !(tau > 0.0)) {
        return Err(Error::param("tau", "averaging times must be positive"));
    }
    let scale = xi / (n.sqrt() * omega * t) * t_cycle.sqrt();
    Ok(taus.iter().map(|&tau| scale / tau.sqrt()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{coherent_spin_state, dicke_state, SpinSpace};

    #[test]
    fn css_reference_values() {
        let sp = SpinSpace::from_atoms(16);
        let css = coherent_spin_state(sp, std::f64::consts::FRAC_PI_2, 0.0);
        assert!((wineland_xi2(&css, 16).unwrap() - 1.0).abs() < 1e-10);
        let q = qfi_pure(&css, [0.0, 0.0, 1.0]).unwrap();
        assert!((q.qfi - 16.0).abs() < 1e-10);
        assert!((q.xi2 - 1.0).abs() < 1e-10);
        assert!(matches!(wineland_xi2(&dicke_state(sp, 0.0).unwrap(), 16), Err(Error::ZeroMeanSpin)));
        assert!(qfi_pure(&css.to_mixed(), [0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn allan_rejects_short_cycle() {
        assert!(allan_deviation(1.0, 100.0, 1.0, 2.0, 1.0, &[1.0]).is_err());
    }
}
