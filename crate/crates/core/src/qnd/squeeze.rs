use serde::Serialize;

use crate::error::{Error, Result};

/// Gaussian conditional state after a QND measurement of `S_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalSqueezing {
    /// `Var(S_z | M)`.
    pub var_sz: f64,
    /// `⟨S_z | M⟩ = gain · M` for a measurement record `M` in spin units.
    pub mean_gain: f64,
    /// Contrast-reduced `⟨S_x⟩ = (N/2) e^{−Γ_sc t}`.
    pub mean_sx: f64,
    /// Anti-squeezed `Var(S_y)` saturating `Var(S_y) Var(S_z) = ⟨S_x⟩²/4`.
    pub var_sy: f64,
    /// Wineland parameter including Raman noise `r Γ_sc t`.
    pub xi2: f64,
}

/// `σ²_M` is the measurement variance in units of the projection noise `N/4`.
pub fn conditional_squeeze_gaussian(n: f64, sigma2_m: f64, gamma_t: f64, raman: f64) -> Result<ConditionalSqueezing> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::param("N", "atom number must be positive"));
    }
    if !(sigma2_m > 0.0) {
        return Err(Error::param("sigma2_M", "measurement variance must be positive"));
    }
    if !(gamma_t >= 0.0) || !(raman >= 0.0) {
        return Err(Error::param("gamma_t", "loss and Raman factor must be non-negative"));
    }
    let projection = n / 4.0;
    let reduction = if sigma2_m.is_infinite() { 1.0 } else { sigma2_m / (1.0 + sigma2_m) };
    let decay = (-gamma_t).exp();
    let mean_sx = 0.5 * n * decay;
    let var_sz = projection * (reduction + raman * gamma_t);
    Ok(ConditionalSqueezing {
        var_sz,
        mean_gain: 1.0 / (1.0 + sigma2_m),
        mean_sx,
        var_sy: mean_sx * mean_sx / (4.0 * projection * reduction),
        xi2: n * var_sz / (mean_sx * mean_sx),
    })
}
