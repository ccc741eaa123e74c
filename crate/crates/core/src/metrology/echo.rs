use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{coherent_spin_state, spin_moments, squeezing_ellipse, Axis, QuantumState, RotationGenerator, SpinSpace};

use super::oat::{oat_state, twist};

/// Rotation axis for the small perturbation between the two twisting stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EchoAxis {
    X,
    Y,
    Z,
    /// Anti-squeezed direction of the forward-evolved state.
    AntiSqueezed,
}

/// Twist with `+χ` for `t_fwd`, rotate by `φ`, twist with `−χ` for `t_rev`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoProtocol {
    pub chi: f64,
    pub t_fwd: f64,
    pub axis: EchoAxis,
    pub phi: f64,
    /// Defaults to `t_fwd`.
    pub t_rev: Option<f64>,
    pub n: u32,
}

#[derive(Debug, Clone)]
pub struct EchoResult {
    /// State after the full sequence at the requested `φ`.
    pub final_state: QuantumState,
    /// Overlap of `final_state` with the initial `|CSS_x⟩`.
    pub return_fidelity: f64,
    /// `(∂⟨S_⊥⟩/∂φ)|₀ / (N/2)`.
    pub gain: f64,
    /// Difference between the Richardson estimate and the plain central difference.
    pub derivative_error: f64,
    pub dphi_min: f64,
    /// `N Δφ_min²`.
    pub xi2_echo: f64,
    pub rotation_axis: [f64; 3],
    /// Transverse direction `S_⊥` along which the signal appears.
    pub signal_axis: [f64; 3],
}

const STEP: f64 = 1e-4;

/// Final mean spin as a function of the perturbation angle.
struct EchoMap {
    forward: QuantumState,
    rotation: RotationGenerator,
    chi: f64,
    t_rev: f64,
}

impl EchoMap {
    fn run(&self, phi: f64) -> Result<QuantumState> {
        twist(&self.rotation.apply(&self.forward, phi), -self.chi, self.t_rev)
    }

    fn mean(&self, phi: f64) -> Result<[f64; 3]> {
        Ok(spin_moments(&self.run(phi)?)?.mean)
    }
}

fn central(map: &EchoMap, h: f64) -> Result<[f64; 3]> {
    let (p, m) = (map.mean(h)?, map.mean(-h)?);
    Ok([0, 1, 2].map(|a| (p[a] - m[a]) / (2.0 * h)))
}

pub fn echo_protocol(p: &EchoProtocol) -> Result<EchoResult> {
    let t_rev = p.t_rev.unwrap_or(p.t_fwd);
    if !(p.t_fwd >= 0.0) || !(t_rev >= 0.0) {
        return Err(Error::param("t", "echo times must be non-negative"));
    }
    if !p.chi.is_finite() || !p.phi.is_finite() {
        return Err(Error::param("chi", "must be finite"));
    }
    if p.n < 2 {
        return Err(Error::param("N", "need at least two atoms"));
    }
    let forward = oat_state(p.n, p.chi, p.t_fwd)?;
    let rotation_axis = match p.axis {
        EchoAxis::X => [1.0, 0.0, 0.0],
        EchoAxis::Y => [0.0, 1.0, 0.0],
        EchoAxis::Z => [0.0, 0.0, 1.0],
        EchoAxis::AntiSqueezed => squeezing_ellipse(&forward, 64)?.antisqueezed_axis(),
    };
    let rotation = RotationGenerator::new(forward.space(), Axis::Unit(rotation_axis))?;
    let map = EchoMap { forward, rotation, chi: p.chi, t_rev };

    let coarse = central(&map, STEP)?;
    let fine = central(&map, STEP / 2.0)?;
    let d: [f64; 3] = [0, 1, 2].map(|a| (4.0 * fine[a] - coarse[a]) / 3.0);
    let derivative_error = (0..3).map(|a| (d[a] - coarse[a]).abs()).fold(0.0, f64::max);

    // signal: component of the derivative transverse to the initial x axis
    let perp = (d[1] * d[1] + d[2] * d[2]).sqrt();
    let signal_axis = if perp > 0.0 { [0.0, d[1] / perp, d[2] / perp] } else { [0.0, 1.0, 0.0] };
    let half_n = 0.5 * p.n as f64;
    let at_zero = spin_moments(&map.run(0.0)?)?;
    let noise = at_zero.variance_along(signal_axis).max(0.0).sqrt();
    let dphi_min = if perp > 0.0 { noise / perp } else { f64::INFINITY };

    let final_state = map.run(p.phi)?;
    let css = coherent_spin_state(SpinSpace::from_atoms(p.n), FRAC_PI_2, 0.0);
    Ok(EchoResult {
        return_fidelity: final_state.fidelity(&css)?,
        final_state,
        gain: perp / half_n,
        derivative_error,
        dphi_min,
        xi2_echo: p.n as f64 * dphi_min * dphi_min,
        rotation_axis,
        signal_axis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoPoint {
    pub t: f64,
    pub gain: f64,
    pub xi2_echo: f64,
}

/// Gain and echo sensitivity over forward times with `t_rev = t_fwd`.
pub fn echo_scan(n: u32, chi: f64, axis: EchoAxis, times: &[f64]) -> Result<Vec<EchoPoint>> {
    times
        .par_iter()
        .map(|&t| {
            let r = echo_protocol(&EchoProtocol { chi, t_fwd: t, axis, phi: 0.0, t_rev: None, n })?;
            Ok(EchoPoint { t, gain: r.gain, xi2_echo: r.xi2_echo })
        })
        .collect()
}
