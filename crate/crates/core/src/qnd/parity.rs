use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::{h_dispersive, Emitter};
use crate::linalg::{CVector, C64};
use crate::spin::{CompositeSpace, Factor, FockSpace, QuantumState};

use super::HeraldedOutcome;

/// Readout phases cycled by [`progressive_collapse`] by default.
pub const DEFAULT_SCHEDULE: [f64; 4] = [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];

/// Smallest Fock cutoff for which the coherent-state tail is negligible.
pub fn cutoff_bound(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 6.0 * alpha_abs + 10.0).ceil() as usize
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Fock amplitudes of `|α⟩` up to `n_max`, without renormalization.
fn coherent_amplitudes(alpha: C64, n_max: usize) -> CVector {
    let lf = ln_factorials(n_max);
    let (r, arg) = alpha.to_polar();
    CVector::from_fn(n_max + 1, |n, _| {
        if r == 0.0 {
            return if n == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        }
        let mag = (-0.5 * r * r + n as f64 * r.ln() - 0.5 * lf[n]).exp();
        C64::from_polar(mag, n as f64 * arg)
    })
}

/// Poisson weight `e^{−μ} μⁿ/n!` beyond `n_max`.
fn poisson_tail(mu: f64, n_max: usize) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    let mut ln_p = -mu + (n_max + 1) as f64 * mu.ln() - ln_factorials(n_max + 1)[n_max + 1];
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let p = ln_p.exp();
        tail += p;
        n += 1;
        ln_p += mu.ln() - (n as f64).ln();
        if (n as f64) > mu && p < 1e-18 * tail.max(1e-300) {
            break;
        }
    }
    tail
}

/// Even and odd branches of a photon-parity measurement.
#[derive(Debug, Clone)]
pub struct ParityHerald {
    pub even: HeraldedOutcome,
    pub odd: HeraldedOutcome,
    /// Poisson weight discarded by the Fock cutoff.
    pub tail: f64,
}

/// Ramsey probe of a coherent field: a single atom prepared along `+x`
/// evolves under `exp(−iΦ₁ a†a σ^z/2)` and is read out in the `x` basis.
/// Outcome `+x` is labelled even and `−x` odd; for `Φ₁ = π` these are the
/// parity projections and the targets are `|iα⟩ ± |−iα⟩`.
pub fn parity_herald(alpha: C64, phi1: f64, n_max: usize) -> Result<ParityHerald> {
    if !phi1.is_finite() || !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::param("alpha", "amplitude and phase must be finite"));
    }
    let mu = alpha.norm_sqr();
    let tail = poisson_tail(mu, n_max);
    if n_max < cutoff_bound(alpha.norm()) || tail > 1e-8 {
        return Err(Error::CutoffTooSmall(tail));
    }
    let fock = FockSpace::new(n_max)?;
    let dim = fock.dim();
    // H = Ω₁ a†a σ^z with Ω₁ = Φ₁/2 for unit time
    let h = h_dispersive(phi1 / 2.0, n_max, Emitter::Single)?;
    let phases = h.diagonal();
    let field = coherent_amplitudes(alpha, n_max);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let joint = |spin: usize, n: usize| field[n] * s * (-C64::i() * phases[spin * dim + n]).exp();

    let field_space = CompositeSpace::new(vec![Factor::Fock(fock)]);
    let target = |sign: f64| {
        let a = coherent_amplitudes(C64::i() * alpha, n_max);
        let b = coherent_amplitudes(-C64::i() * alpha, n_max);
        let v = a + b * C64::new(sign, 0.0);
        QuantumState::pure(field_space.clone(), v).ok()
    };
    let norm2 = field.norm_squared();
    let branch = |label: &str, sign: f64| -> Result<HeraldedOutcome> {
        let v = CVector::from_fn(dim, |n, _| (joint(0, n) + joint(1, n) * sign) * s);
        let p = v.norm_squared() / norm2;
        if p <= 1e-300 {
            return Ok(HeraldedOutcome { label: label.into(), probability: p, state: None, fidelity: None });
        }
        let state = QuantumState::pure(field_space.clone(), v)?;
        let fidelity = match target(sign) {
            Some(t) => Some(state.fidelity(&t)?),
            None => None,
        };
        Ok(HeraldedOutcome { label: label.into(), probability: p, state: Some(state), fidelity })
    };
    Ok(ParityHerald { even: branch("even", 1.0)?, odd: branch("odd", -1.0)?, tail })
}

/// Posterior photon-number distributions along a sequence of atomic probes.
#[derive(Debug, Clone, Serialize)]
pub struct CollapseTrack {
    pub n_max: usize,
    pub hidden_n: usize,
    /// `true` for the `+` readout of each atom.
    pub outcomes: Vec<bool>,
    /// Shannon entropy (bits) of the posterior after 0, 1, … atoms.
    pub entropy: Vec<f64>,
    /// Largest posterior weight of a single class after 0, 1, … atoms.
    pub concentration: Vec<f64>,
    /// Period of the likelihood in `n` when `2π/Φ₁` is an integer; classes
    /// are then residues modulo this period, otherwise single `n`.
    pub period: Option<usize>,
    pub prior: Vec<f64>,
    pub posterior: Vec<f64>,
}

fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

fn concentration(p: &[f64], period: Option<usize>) -> f64 {
    match period {
        Some(k) => {
            let mut classes = vec![0.0; k];
            for (n, &x) in p.iter().enumerate() {
                classes[n % k] += x;
            }
            classes.into_iter().fold(0.0, f64::max)
        }
        None => p.iter().copied().fold(0.0, f64::max),
    }
}

/// Sequential Bayesian photon counting. A hidden `n` is drawn once from
/// the Poisson prior; atom `k` is read out with phase `schedule[k mod len]`
/// and reports `+` with probability `(1 + cos(Φ₁n + θ))/2`.
pub fn progressive_collapse(
    alpha: f64,
    phi1: f64,
    n_atoms: usize,
    schedule: &[f64],
    seed: u64,
) -> Result<CollapseTrack> {
    if !(phi1 > 0.0 && phi1 <= PI) {
        return Err(Error::param("phi1", format!("single-photon phase must lie in (0, π], got {phi1}")));
    }
    if !alpha.is_finite() {
        return Err(Error::param("alpha", "must be finite"));
    }
    if schedule.is_empty() || schedule.iter().any(|t| !t.is_finite()) {
        return Err(Error::param("schedule", "need at least one finite readout phase"));
    }
    let n_max = cutoff_bound(alpha.abs());
    let prior: Vec<f64> = coherent_amplitudes(C64::new(alpha, 0.0), n_max).iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = prior.iter().sum();
    let prior: Vec<f64> = prior.iter().map(|p| p / total).collect();
    let ratio = 2.0 * PI / phi1;
    let period = ((ratio - ratio.round()).abs() < 1e-9).then(|| ratio.round() as usize);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden_n = WeightedIndex::new(&prior).expect("positive prior").sample(&mut rng);
    let mut post = prior.clone();
    let mut track = CollapseTrack {
        n_max,
        hidden_n,
        outcomes: Vec::with_capacity(n_atoms),
        entropy: vec![entropy_bits(&post)],
        concentration: vec![concentration(&post, period)],
        period,
        prior,
        posterior: Vec::new(),
    };
    let p_plus = |n: usize, theta: f64| 0.5 * (1.0 + (phi1 * n as f64 + theta).cos());
    for k in 0..n_atoms {
        let theta = schedule[k % schedule.len()];
        let plus = rng.random::<f64>() < p_plus(hidden_n, theta);
        track.outcomes.push(plus);
        for (n, w) in post.iter_mut().enumerate() {
            let p = p_plus(n, theta);
            *w *= if plus { p } else { 1.0 - p };
        }
        let z: f64 = post.iter().sum();
        post.iter_mut().for_each(|w| *w /= z);
        track.entropy.push(entropy_bits(&post));
        track.concentration.push(concentration(&post, period));
    }
    track.posterior = post;
    Ok(track)
}
