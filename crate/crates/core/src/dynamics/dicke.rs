use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize;

/// Mean-field solution pair at one coupling; the two entries are ℤ₂
/// partners `(α, S_x) → (−α, −S_x)` and coincide below threshold.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DickePoint {
    pub coupling: f64,
    pub alpha: [f64; 2],
    pub spin: [[f64; 3]; 2],
    pub iterations: usize,
}

impl DickePoint {
    pub fn order_parameter(&self) -> f64 {
        self.alpha[0].abs()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DickeMeanField {
    pub omega0: f64,
    pub omega_c: f64,
    pub s: f64,
    pub points: Vec<DickePoint>,
    /// Critical coupling located by bisection.
    pub threshold: f64,
}

const MIXING: f64 = 0.5;
const MAX_ITER: usize = 20_000;
const SEED: f64 = 1e-8;

/// Field the spin would produce: the spin anti-aligns with
/// `B = (4𝒢α, 0, ω₀)` and the cavity follows `α = −2𝒢 S_x / ω_c`.
fn field_target(alpha: f64, g: f64, omega0: f64, omega_c: f64, s: f64) -> (f64, [f64; 3]) {
    let b = [4.0 * g * alpha, 0.0, omega0];
    let bn = (b[0] * b[0] + b[2] * b[2]).sqrt();
    let spin = [-s * b[0] / bn, 0.0, -s * b[2] / bn];
    (-2.0 * g * spin[0] / omega_c, spin)
}

/// One damped self-consistency update of the cavity amplitude.
fn update(alpha: f64, g: f64, omega0: f64, omega_c: f64, s: f64) -> (f64, [f64; 3]) {
    let (target, spin) = field_target(alpha, g, omega0, omega_c, s);
    ((1.0 - MIXING) * alpha + MIXING * target, spin)
}

fn solve(g: f64, omega0: f64, omega_c: f64, s: f64, start: f64) -> Result<(f64, [f64; 3], usize)> {
    let mut alpha = start;
    for it in 1..=MAX_ITER {
        let (next, spin) = update(alpha, g, omega0, omega_c, s);
        let change = (next - alpha).abs();
        alpha = next;
        if !alpha.is_finite() {
            return Err(Error::NonConvergence { iterations: it, change });
        }
        if change <= 1e-13 * alpha.abs().max(1e-10) || (alpha.abs() < 1e-300) {
            return Ok((alpha, spin, it));
        }
    }
    // Critical slowing down near threshold. The gain `target(α)/α` falls
    // monotonically with |α|, so the fixed point on this branch is where it
    // crosses one; bisect for it.
    let sign = if alpha < 0.0 { -1.0 } else { 1.0 };
    let gain = |a: f64| field_target(sign * a, g, omega0, omega_c, s).0 * sign / a;
    if gain(1e-300) <= 1.0 {
        let (_, spin) = field_target(0.0, g, omega0, omega_c, s);
        return Ok((0.0, spin, MAX_ITER));
    }
    let mut hi = alpha.abs().max(start.abs()).max(1.0);
    while gain(hi) > 1.0 {
        hi *= 2.0;
    }
    let a = sign * optimize::bisect_predicate(|a| gain(a) <= 1.0, 0.0, hi, 1e-15);
    let (_, spin) = field_target(a, g, omega0, omega_c, s);
    Ok((a, spin, MAX_ITER))
}

fn validate(omega0: f64, omega_c: f64, s: f64) -> Result<()> {
    if !(omega0 > 0.0 && omega_c > 0.0) {
        return Err(Error::param("omega", "ω₀ and ω_c must be positive"));
    }
    if !(s > 0.0) {
        return Err(Error::param("s", "spin length must be positive"));
    }
    Ok(())
}

/// Coupling at which a tiny cavity seed stops decaying under the damped
/// self-consistency map, bisected to `rel_tol`.
pub fn dicke_threshold(omega0: f64, omega_c: f64, s: f64, rel_tol: f64) -> Result<f64> {
    validate(omega0, omega_c, s)?;
    let grows = |g: f64| update(SEED, g, omega0, omega_c, s).0.abs() > SEED;
    // bracket: the map is contracting at g → 0; expand upward until growth
    let mut hi = (omega0 * omega_c).sqrt();
    while !grows(hi) {
        hi *= 2.0;
    }
    Ok(optimize::bisect_predicate(grows, 0.0, hi, rel_tol))
}

/// Damped fixed-point solution of the Dicke mean-field equations for each
/// coupling in `grid`.
pub fn mean_field_dicke(omega0: f64, omega_c: f64, grid: &[f64], s: f64) -> Result<DickeMeanField> {
    validate(omega0, omega_c, s)?;
    let threshold = dicke_threshold(omega0, omega_c, s, 1e-6)?;
    let mut points = Vec::with_capacity(grid.len());
    for &g in grid {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::param("coupling", "grid entries must be finite and non-negative"));
        }
        // start from a macroscopic seed so the symmetric solution is only
        // reached when it is the sole fixed point
        let start = s.sqrt();
        let (a, spin, it1) = solve(g, omega0, omega_c, s, start)?;
        let (b, spin_b, it2) = solve(g, omega0, omega_c, s, -start)?;
        points.push(DickePoint { coupling: g, alpha: [a, b], spin: [spin, spin_b], iterations: it1.max(it2) });
    }
    Ok(DickeMeanField { omega0, omega_c, s, points, threshold })
}
