//! Closed-form cavity figures of merit and coherence budgets.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize;

/// Speed of light (m/s).
pub const C_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    pub finesse: f64,
    /// Mode waist `w₀` (m).
    pub waist: f64,
    /// Wavelength `λ` (m).
    pub wavelength: f64,
    /// Mirror separation (m).
    pub length: Option<f64>,
}

impl CavityGeometry {
    pub fn new(finesse: f64, waist: f64, wavelength: f64, length: Option<f64>) -> Result<Self> {
        for (name, v) in [("finesse", finesse), ("waist", waist), ("wavelength", wavelength)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if let Some(l) = length {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::param("length", format!("must be positive, got {l}")));
            }
        }
        if wavelength >= waist {
            return Err(Error::param("waist", "paraxial optics needs λ < w₀"));
        }
        Ok(CavityGeometry { finesse, waist, wavelength, length })
    }
}

/// `η = 24F/(πk²w₀²)`.
pub fn cooperativity_geometric(geom: &CavityGeometry) -> f64 {
    let k = 2.0 * PI / geom.wavelength;
    24.0 * geom.finesse / (PI * k * k * geom.waist * geom.waist)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityRates {
    /// Full linewidth `κ = πc/(FL)` (rad/s).
    pub kappa: f64,
    pub g: f64,
    pub eta: f64,
}

/// Linewidth of a two-mirror resonator and the coupling implied by the
/// geometric cooperativity, `g = √(ηκΓ)/2`.
pub fn rates_from_geometry(geom: &CavityGeometry, gamma: f64) -> Result<CavityRates> {
    let l = geom.length.ok_or_else(|| Error::param("length", "cavity length is required"))?;
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", "atomic linewidth must be positive"));
    }
    let eta = cooperativity_geometric(geom);
    let kappa = PI * C_LIGHT / (geom.finesse * l);
    Ok(CavityRates { kappa, g: (eta * kappa * gamma).sqrt() / 2.0, eta })
}

/// `η = 4g²/(κΓ)`.
pub fn cooperativity(g: f64, kappa: f64, gamma: f64) -> f64 {
    4.0 * g * g / (kappa * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseCeiling {
    /// `√η/(2n̄)`.
    pub phi1_max: f64,
    /// `g√(Γ/κ)`.
    pub delta_opt: f64,
    /// Maximum of `2g²/(Δn̄κ̃)` found by a logarithmic scan plus refinement.
    pub phi1_scan: f64,
    pub delta_scan: f64,
}

/// Photon-loss-limited single-photon phase `Φ₁(Δ) = 2g²/(Δ n̄ κ̃)` with
/// `κ̃ = κ + (g/Δ)²Γ`.
pub fn phase_shift(delta: f64, nbar: f64, g: f64, kappa: f64, gamma: f64) -> f64 {
    let kt = kappa + (g / delta).powi(2) * gamma;
    2.0 * g * g / (delta * nbar * kt)
}

pub fn phase_shift_ceiling(nbar: f64, g: f64, kappa: f64, gamma: f64) -> Result<PhaseCeiling> {
    for (name, v) in [("nbar", nbar), ("g", g), ("kappa", kappa), ("gamma", gamma)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    let eta = cooperativity(g, kappa, gamma);
    let delta_opt = g * (gamma / kappa).sqrt();
    let grid: Vec<f64> = optimize::logspace(delta_opt * 1e-3, delta_opt * 1e3, 241);
    let (ln_d, neg) = optimize::grid_then_golden(
        |ln_d| -phase_shift(ln_d.exp(), nbar, g, kappa, gamma),
        &grid.iter().map(|d| d.ln()).collect::<Vec<_>>(),
        1e-10,
    );
    Ok(PhaseCeiling { phi1_max: eta.sqrt() / (2.0 * nbar), delta_opt, phi1_scan: -neg, delta_scan: ln_d.exp() })
}

/// Ising coupling and decoherence budget of cavity-mediated twisting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsingBudget {
    /// `d = 2δ/κ`.
    pub d: f64,
    /// `J = (4n₀Ω₁²/κ)·d/(1 + d²)`.
    pub j: f64,
    /// Collective dephasing `γ = Jκ/δ`.
    pub gamma: f64,
    /// Free-space scattering rate.
    pub gamma_sc: f64,
    /// `J/(γ + Γ_sc)` at the requested detuning.
    pub ratio: f64,
    /// Detuning maximizing the ratio, from a numerical scan.
    pub delta_opt: f64,
    pub ratio_opt: f64,
    /// Closed forms `κ√(2η+1)/2` and `η/(2√(2η+1))`.
    pub delta_opt_analytic: f64,
    pub ratio_opt_analytic: f64,
}

/// `J/(γ + Γ_sc)` as a function of `d` in units where `4n₀Ω₁²/κ = 1`.
pub fn ising_ratio(d: f64, eta: f64) -> f64 {
    d * eta / (2.0 * eta + 1.0 + d * d)
}

/// When `gamma_sc` is `None` it is fixed by the large-detuning identity
/// `2n₀Ω₁²/δ = ηΓ_sc κ/(2δ)`, i.e. `Γ_sc = 4n₀Ω₁²/(ηκ)`.
pub fn ising_budget(n0: f64, omega1: f64, kappa: f64, delta: f64, eta: f64, gamma_sc: Option<f64>) -> Result<IsingBudget> {
    if !(kappa > 0.0) || !(delta > 0.0) {
        return Err(Error::param("kappa", "κ and δ must be positive"));
    }
    if !(eta > 0.0) {
        return Err(Error::param("eta", "cooperativity must be positive"));
    }
    let scale = 4.0 * n0 * omega1 * omega1 / kappa;
    let gamma_sc = gamma_sc.unwrap_or(scale / eta);
    if !(gamma_sc >= 0.0) {
        return Err(Error::param("gamma_sc", "must be non-negative"));
    }
    let coupling = |d: f64| scale * d / (1.0 + d * d);
    let ratio_at = |d: f64| {
        let j = coupling(d);
        let g = 2.0 * j / d;
        j / (g + gamma_sc)
    };
    let d = 2.0 * delta / kappa;
    let j = coupling(d);
    let grid: Vec<f64> = (0..=400).map(|k| -3.0 + 9.0 * k as f64 / 400.0).map(|e| e * std::f64::consts::LN_10).collect();
    let (ln_d, neg) = optimize::grid_then_golden(|ln_d| -ratio_at(ln_d.exp()), &grid, 1e-10);
    Ok(IsingBudget {
        d,
        j,
        gamma: j * kappa / delta,
        gamma_sc,
        ratio: ratio_at(d),
        delta_opt: ln_d.exp() * kappa / 2.0,
        ratio_opt: -neg,
        delta_opt_analytic: kappa * (2.0 * eta + 1.0).sqrt() / 2.0,
        ratio_opt_analytic: eta / (2.0 * (2.0 * eta + 1.0).sqrt()),
    })
}

/// Gaussian squeezing ellipse of twisting with cavity dephasing, in units
/// where the coherent state has variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistingGeometry {
    pub q: f64,
    pub d: f64,
    /// Minor and major axes of the covariance `[[1, Q], [Q, 1 + Q² + 2Q/d]]`.
    pub sigma2_sq: f64,
    pub sigma2_anti: f64,
    /// Angle of the anti-squeezed axis from the equator, `½ arctan(2Q/(Q² + 2Q/d))`.
    pub tilt: f64,
    /// Interpolation `1/(1+Q²) + Q/((1+Q²)d)` with the same large-`Q` asymptote.
    pub sigma2_sq_interp: f64,
}

/// Linearized twisting: the shear `y → y + Qz` plus `S_z` dephasing, which
/// adds `2Q/d` to the anti-squeezed direction.
pub fn twisting_geometry(q: f64, d: f64) -> Result<TwistingGeometry> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::param("Q", "twisting strength must be non-negative"));
    }
    if !(d > 0.0) {
        return Err(Error::param("d", "detuning must be positive"));
    }
    let noise = 2.0 * q / d;
    let (a, b, c) = (1.0, 1.0 + q * q + noise, q);
    let tr = a + b;
    let det = a * b - c * c;
    let disc = ((b - a).powi(2) + 4.0 * c * c).sqrt();
    let sigma2_anti = 0.5 * (tr + disc);
    // det/λ_max avoids cancellation for large Q
    let sigma2_sq = det / sigma2_anti;
    Ok(TwistingGeometry {
        q,
        d,
        sigma2_sq,
        sigma2_anti,
        tilt: 0.5 * (2.0 * c).atan2(b - a),
        sigma2_sq_interp: 1.0 / (1.0 + q * q) + q / ((1.0 + q * q) * d),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezingMode {
    Measurement,
    Twisting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingLimit {
    pub n_eta: f64,
    pub raman: f64,
    pub mode: SqueezingMode,
    pub xi2_opt: f64,
    /// `Γ_sc t` at the optimum.
    pub gamma_t_opt: f64,
    /// Local log-log slope of `ξ²_opt` over one decade of `Nη` centred here.
    pub exponent: f64,
}

/// `ξ²(y) = [1/(Nη y) + r y]·e^{2y}` with `y = Γ_sc t`. Both the measurement
/// and twisting routes reduce to this budget (the latter through
/// `σ² ≳ 1/(NηΓ_sc t)`); a cycling transition has no Raman noise.
pub fn squeezing_budget(y: f64, n_eta: f64, raman: f64) -> f64 {
    (1.0 / (n_eta * y) + raman * y) * (2.0 * y).exp()
}

fn optimum(n_eta: f64, raman: f64) -> (f64, f64) {
    let grid: Vec<f64> = (0..=200).map(|k| (-12.0 + 14.0 * k as f64 / 200.0) * std::f64::consts::LN_10).collect();
    let (ln_y, xi2) = optimize::grid_then_golden(|ln_y| squeezing_budget(ln_y.exp(), n_eta, raman), &grid, 1e-9);
    (xi2, ln_y.exp())
}

pub fn squeezing_limits(n: f64, eta: f64, raman: f64, mode: SqueezingMode, cycling: bool) -> Result<SqueezingLimit> {
    if !(n > 0.0) || !(eta > 0.0) {
        return Err(Error::param("n_eta", "N and η must be positive"));
    }
    if !(raman >= 0.0) {
        return Err(Error::param("r", "branching factor must be non-negative"));
    }
    let r = if cycling { 0.0 } else { raman };
    let x = n * eta;
    let (xi2_opt, gamma_t_opt) = optimum(x, r);
    let span = 10f64.sqrt();
    let (lo, hi) = (optimum(x / span, r).0, optimum(x * span, r).0);
    Ok(SqueezingLimit { n_eta: x, raman: r, mode, xi2_opt, gamma_t_opt, exponent: (hi / lo).log10() })
}

/// Log-log slope of `ξ²_opt` against `Nη` over the given values.
pub fn squeezing_exponent(n_eta: &[f64], raman: f64) -> f64 {
    let xi: Vec<f64> = n_eta.iter().map(|&x| optimum(x, raman).0).collect();
    optimize::log_log_slope(n_eta, &xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_cooperativity_value_and_scalings() {
        let g = CavityGeometry::new(1e4, 15e-6, 780e-9, None).unwrap();
        let eta = cooperativity_geometric(&g);
        assert!((eta - 5.2322).abs() < 1e-3, "{eta}");
        let g2 = CavityGeometry::new(2e4, 15e-6, 780e-9, None).unwrap();
        assert!((cooperativity_geometric(&g2) / eta - 2.0).abs() < 1e-14);
        let g3 = CavityGeometry::new(1e4, 30e-6, 1560e-9, None).unwrap();
        assert!((cooperativity_geometric(&g3) / eta - 1.0).abs() < 1e-14);
        assert!(CavityGeometry::new(1e4, 1e-7, 780e-9, None).is_err());
    }

    #[test]
    fn rates_back_substitute() {
        let gamma = 2.0 * PI * 6.07e6;
        let g = CavityGeometry::new(1e4, 15e-6, 780e-9, Some(0.01)).unwrap();
        let r = rates_from_geometry(&g, gamma).unwrap();
        assert!((r.kappa / 9.42e6 - 1.0).abs() < 1e-3);
        assert!((cooperativity(r.g, r.kappa, gamma) / r.eta - 1.0).abs() < 1e-12);
        let half = rates_from_geometry(&CavityGeometry { length: Some(0.005), ..g }, gamma).unwrap();
        assert!((half.kappa / r.kappa - 2.0).abs() < 1e-12);
        assert!(((half.g / r.g).powi(2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn phase_ceiling_parity_threshold() {
        // η = 4π² with κ = Γ = 1 means g = π
        let c = phase_shift_ceiling(1.0, PI, 1.0, 1.0).unwrap();
        assert!((c.phi1_max - PI).abs() < 1e-12);
        assert!((c.phi1_scan / c.phi1_max - 1.0).abs() < 1e-9);
        assert!((c.delta_scan / c.delta_opt - 1.0).abs() < 1e-3);
        let two = phase_shift_ceiling(2.0, PI, 1.0, 1.0).unwrap();
        assert!((two.phi1_max / c.phi1_max - 0.5).abs() < 1e-14);
    }

    #[test]
    fn ising_optimum_scaling() {
        let mut prev: Option<IsingBudget> = None;
        for eta in [10.0, 100.0, 1000.0] {
            let b = ising_budget(100.0, 0.01, 1.0, 3.0, eta, None).unwrap();
            assert!((b.ratio_opt / b.ratio_opt_analytic - 1.0).abs() < 1e-8);
            assert!((b.delta_opt / b.delta_opt_analytic - 1.0).abs() < 1e-4);
            if let Some(p) = prev {
                assert!((b.ratio_opt / p.ratio_opt / 10f64.sqrt() - 1.0).abs() < 0.05);
                assert!((b.delta_opt / p.delta_opt / 10f64.sqrt() - 1.0).abs() < 0.10);
            }
            prev = Some(b);
        }
        let a = ising_budget(1.0, 1.0, 1.0, 1.5, 10.0, None).unwrap();
        let b = ising_budget(1.0, 1.0, 1.0, 1.0 / 6.0, 10.0, None).unwrap();
        assert!((a.j / b.j - 1.0).abs() < 1e-14);
    }

    #[test]
    fn twisting_ellipse() {
        let css = twisting_geometry(0.0, 1.0).unwrap();
        assert!((css.sigma2_sq - 1.0).abs() < 1e-15 && (css.sigma2_anti - 1.0).abs() < 1e-15);
        let unitary = twisting_geometry(10.0, f64::INFINITY).unwrap();
        assert!((unitary.sigma2_sq * unitary.sigma2_anti - 1.0).abs() < 1e-12);
        assert!((unitary.tilt - 0.5 * (0.2f64).atan()).abs() < 1e-14);
        assert!((unitary.sigma2_sq_interp - 1.0 / 101.0).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for d in [0.5, 1.0, 2.0, 5.0, 50.0] {
            let g = twisting_geometry(3.0, d).unwrap();
            assert!(g.sigma2_sq < last);
            assert!(g.sigma2_sq * g.sigma2_anti >= 1.0);
            last = g.sigma2_sq;
        }
    }

    #[test]
    fn squeezing_exponents() {
        let xs = optimize::logspace(1e2, 1e6, 9);
        assert!((squeezing_exponent(&xs, 0.0) + 1.0).abs() < 0.05);
        assert!((squeezing_exponent(&xs, 1.0) + 0.5).abs() < 0.05);
        let a = squeezing_limits(100.0, 10.0, 1.0, SqueezingMode::Measurement, true).unwrap();
        assert_eq!(a.raman, 0.0);
        assert!((a.gamma_t_opt - 0.5).abs() < 1e-6);
    }
}
