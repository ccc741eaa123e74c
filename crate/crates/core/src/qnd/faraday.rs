use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::spin::{coherent_spin_state, dicke_state, rotate, Axis, OperatorMatrix, QuantumState, SpinSpace};

use super::HeraldedOutcome;

/// Drive waveform `f(t)` seen by the heralding photon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseShape {
    /// Explicit `(time, amplitude)` samples.
    Samples { samples: Vec<(f64, C64)> },
    /// Two equal delta pulses at `0` and `dt`.
    TwoPulse { dt: f64 },
    /// Uniform envelope over `[0, T)`.
    Circle { period: f64 },
    /// `e^{rate·t}` envelope over `[0, T)`.
    ExpCircle { period: f64, rate: f64 },
}

impl PulseShape {
    /// Sample list used for the kernel; continuous envelopes get
    /// `max(64, 4·dim)` equally spaced points.
    pub fn discretize(&self, dim: usize) -> Result<Vec<(f64, C64)>> {
        let n = 64.max(4 * dim);
        let uniform = |period: f64, rate: f64| -> Result<Vec<(f64, C64)>> {
            if !(period > 0.0) || !period.is_finite() || !rate.is_finite() {
                return Err(Error::param("pulse", "period must be positive and finite"));
            }
            Ok((0..n)
                .map(|k| {
                    let t = period * k as f64 / n as f64;
                    (t, C64::new((rate * t).exp(), 0.0))
                })
                .collect())
        };
        let samples = match self {
            PulseShape::Samples { samples } => samples.clone(),
            PulseShape::TwoPulse { dt } => {
                if !(*dt >= 0.0) || !dt.is_finite() {
                    return Err(Error::param("dt", "pulse separation must be non-negative"));
                }
                vec![(0.0, C64::new(1.0, 0.0)), (*dt, C64::new(1.0, 0.0))]
            }
            PulseShape::Circle { period } => uniform(*period, 0.0)?,
            PulseShape::ExpCircle { period, rate } => uniform(*period, *rate)?,
        };
        if samples.is_empty() {
            return Err(Error::param("pulse", "empty pulse"));
        }
        if samples.iter().any(|(t, f)| !t.is_finite() || !f.re.is_finite() || !f.im.is_finite()) {
            return Err(Error::param("pulse", "non-finite sample"));
        }
        if samples.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(Error::param("pulse", "sample times must be non-decreasing"));
        }
        if samples.iter().all(|(_, f)| f.norm() == 0.0) {
            return Err(Error::param("pulse", "zero total weight"));
        }
        Ok(samples)
    }
}

/// Declared target for a painted state.
#[derive(Debug, Clone)]
pub enum PaintTarget {
    None,
    /// Dicke state `|S, m⟩`.
    Dicke(f64),
    State(QuantumState),
}

/// `(|θ, φ_a⟩ + sign·|θ, φ_b⟩)/norm` from two coherent spin states.
pub fn cat_state(space: SpinSpace, theta: f64, phi_a: f64, phi_b: f64, sign: f64) -> Result<QuantumState> {
    let a = coherent_spin_state(space, theta, phi_a);
    let b = coherent_spin_state(space, theta, phi_b);
    let (va, vb) = (a.amplitudes().expect("pure"), b.amplitudes().expect("pure"));
    QuantumState::pure(a.space().clone(), va + vb * C64::new(sign, 0.0))
}

/// Diagonal operator `g(m)` on the first spin factor of the state's space.
fn diagonal_in_sz(state: &QuantumState, g: impl Fn(f64) -> C64) -> Result<OperatorMatrix> {
    let space = state.space();
    let (k, spin) = space.spin_factor().ok_or_else(|| Error::param("state", "no spin factor"))?;
    let diag: Vec<C64> = (0..space.dim()).map(|idx| g(spin.m(space.unflatten(idx)[k]))).collect();
    OperatorMatrix::new(space.clone(), linalg::csr_diag(&diag))
}

fn herald(state: &QuantumState, k: &OperatorMatrix, label: &str, target: Option<&QuantumState>) -> Result<HeraldedOutcome> {
    let p = match state.amplitudes() {
        Some(v) => k.apply(v).norm_squared(),
        None => {
            let rho = state.density();
            let kr = linalg::spmm(k.matrix(), &rho);
            linalg::mmsp(&kr, &linalg::adjoint(k.matrix())).trace().re
        }
    };
    if p <= 1e-300 {
        return Ok(HeraldedOutcome { label: label.into(), probability: p.max(0.0), state: None, fidelity: None });
    }
    let (_, post) = state.apply_kraus(k)?;
    let fidelity = match target {
        Some(t) => Some(post.fidelity(t)?),
        None => None,
    };
    Ok(HeraldedOutcome { label: label.into(), probability: p, state: Some(post), fidelity })
}

/// Heralds a photon whose emission time follows `pulse`. The kernel is
/// `K = Σ_k f_k e^{−κ(t_K−t_k)/2} e^{−iΩ₁t_k S_z}` with `t_K` the last
/// sample, normalized by `Σ_k |f_k| e^{−κ(t_K−t_k)/2}` so that `‖K‖ ≤ 1`.
pub fn paint(
    initial: &QuantumState,
    pulse: &PulseShape,
    omega1: f64,
    kappa: f64,
    target: &PaintTarget,
) -> Result<HeraldedOutcome> {
    if !omega1.is_finite() || !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::param("kappa", "need finite Ω₁ and κ ≥ 0"));
    }
    let samples = pulse.discretize(initial.dim())?;
    let t_k = samples[samples.len() - 1].0;
    let weighted: Vec<(f64, C64)> =
        samples.iter().map(|&(t, f)| (t, f * (-0.5 * kappa * (t_k - t)).exp())).collect();
    let norm: f64 = weighted.iter().map(|(_, f)| f.norm()).sum();
    if !(norm > 0.0) {
        return Err(Error::param("pulse", "kernel weight vanishes after cavity decay"));
    }
    let k = diagonal_in_sz(initial, |m| {
        weighted.iter().map(|&(t, f)| f * C64::from_polar(1.0, -omega1 * t * m)).sum::<C64>() / norm
    })?;
    let owned;
    let target = match target {
        PaintTarget::None => None,
        PaintTarget::State(s) => Some(s),
        PaintTarget::Dicke(m) => {
            let (_, spin) = initial.space().spin_factor().expect("checked above");
            if initial.space().factors().len() != 1 {
                return Err(Error::param("target", "Dicke targets need a bare spin state"));
            }
            owned = dicke_state(spin, *m)?;
            Some(&owned)
        }
    };
    herald(initial, &k, "photon", target)
}

/// Photon-heralded Faraday measurement on the `x`-polarized coherent state.
#[derive(Debug, Clone)]
pub struct WHerald {
    /// Fidelity is measured against the `x`-basis single-excitation Dicke state.
    pub outcome: HeraldedOutcome,
    /// `|⟨CSS_x|ψ⟩|²` of the post-state.
    pub css_overlap: f64,
    pub mean_sz: f64,
    /// Ashman's `D` between the `S_z > 0` and `S_z < 0` lobes.
    pub bimodality: f64,
    /// `Φ·S > π/2`: `sin(ΦS_z)` is no longer monotonic over the spectrum.
    pub aliasing: bool,
}

/// Applies the dark-port Kraus operator `K = (e^{−iΦS_z} − e^{iΦS_z})/2 =
/// −i sin(ΦS_z)` to `|CSS_x⟩` of `N` atoms.
pub fn herald_w_faraday(n: u32, phi: f64) -> Result<WHerald> {
    if n < 2 {
        return Err(Error::param("N", "need at least two atoms"));
    }
    if !(phi > 0.0) || !phi.is_finite() {
        return Err(Error::param("phi", "Faraday phase must be positive"));
    }
    let spin = SpinSpace::from_atoms(n);
    let aliasing = phi * spin.s() > FRAC_PI_2;
    if aliasing {
        log::warn!("Faraday phase Φ·S = {} exceeds π/2; sin(ΦS_z) aliases", phi * spin.s());
    }
    let css = coherent_spin_state(spin, FRAC_PI_2, 0.0);
    let w = rotate(&dicke_state(spin, spin.s() - 1.0)?, Axis::Y, FRAC_PI_2)?;
    let k = diagonal_in_sz(&css, |m| C64::new(0.0, -(phi * m).sin()))?;
    let outcome = herald(&css, &k, "photon", Some(&w))?;
    let post = outcome.state.as_ref().ok_or_else(|| Error::InvalidState("herald probability underflows".into()))?;
    let css_overlap = css.fidelity(post)?;
    let pops = post.populations();
    let mean_sz: f64 = pops.iter().enumerate().map(|(i, p)| p * spin.m(i)).sum();
    let lobe = |sign: f64| {
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (i, p) in pops.iter().enumerate() {
            let m = spin.m(i);
            if m * sign > 0.0 {
                w += p;
                m1 += p * m;
                m2 += p * m * m;
            }
        }
        let mu = m1 / w;
        (mu, m2 / w - mu * mu)
    };
    let ((mu_a, va), (mu_b, vb)) = (lobe(1.0), lobe(-1.0));
    let bimodality = 2f64.sqrt() * (mu_a - mu_b).abs() / (va + vb).sqrt();
    Ok(WHerald { outcome, css_overlap, mean_sz, bimodality, aliasing })
}

