use std::f64::consts::{FRAC_PI_2, LN_10};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::h_oat;
use crate::linalg::{CVector, C64};
use crate::optimize;
use crate::spin::{coherent_spin_state, QuantumState, SpinSpace};

use super::wineland_xi2;

/// Applies `exp(−i t χ S_z²/N)` to a pure state of a bare spin.
pub(crate) fn twist(state: &QuantumState, chi: f64, t: f64) -> Result<QuantumState> {
    let (_, spin) = state.space().spin_factor().ok_or_else(|| Error::param("state", "no spin factor"))?;
    let v = state.amplitudes().ok_or_else(|| Error::InvalidState("twisting needs a pure state".into()))?;
    let energies = h_oat(chi, spin)?.diagonal();
    if energies.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: energies.len(), got: v.len() });
    }
    let w = CVector::from_iterator(v.len(), v.iter().zip(&energies).map(|(a, e)| a * (-C64::i() * e * t).exp()));
    QuantumState::pure(state.space().clone(), w)
}

/// `exp(−i t χ S_z²/N) |CSS_x⟩`.
pub fn oat_state(n: u32, chi: f64, t: f64) -> Result<QuantumState> {
    twist(&coherent_spin_state(SpinSpace::from_atoms(n), FRAC_PI_2, 0.0), chi, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OatOptimum {
    pub n: u32,
    /// Optimal `χt` for `H = χ S_z²/N`.
    pub t_opt: f64,
    /// Twisting angle `μ = 2t_opt/N` at the optimum, the time in units of the
    /// un-normalized `S_z²` coupling.
    pub mu_opt: f64,
    pub xi2_min: f64,
}

/// Minimum Wineland parameter along the twisting trajectory, found on a
/// logarithmic `χt` grid up to `N/2` and refined by golden section.
pub fn oat_optimum_scan(n: u32) -> Result<OatOptimum> {
    if n < 4 {
        return Err(Error::param("N", "need at least four atoms"));
    }
    let hi = (0.5 * n as f64).log10();
    let grid: Vec<f64> = (0..=120).map(|k| (-2.0 + (hi + 2.0) * k as f64 / 120.0) * LN_10).collect();
    let xi2 = |ln_t: f64| oat_state(n, 1.0, ln_t.exp()).and_then(|s| wineland_xi2(&s, n)).unwrap_or(f64::INFINITY);
    let (ln_t, xi2_min) = optimize::grid_then_golden(xi2, &grid, 1e-10);
    let t_opt = ln_t.exp();
    Ok(OatOptimum { n, t_opt, mu_opt: 2.0 * t_opt / n as f64, xi2_min })
}

#[derive(Debug, Clone, Serialize)]
pub struct OatScaling {
    pub points: Vec<OatOptimum>,
    /// Log-log slope of `ξ²_min` against `N`.
    pub exponent: f64,
}

pub fn oat_scaling(ns: &[u32]) -> Result<OatScaling> {
    if ns.len() < 2 {
        return Err(Error::param("N", "need at least two atom numbers for a fit"));
    }
    let points: Vec<OatOptimum> = ns.par_iter().map(|&n| oat_optimum_scan(n)).collect::<Result<_>>()?;
    let x: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.xi2_min).collect();
    Ok(OatScaling { exponent: optimize::log_log_slope(&x, &y), points })
}
