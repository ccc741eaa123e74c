use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::C64;

use super::coupling::{Boundary, CouplingMatrix};

/// Ring of `M` sites with distance-1 rails and distance-`M/2` rungs.
/// Positive couplings are ferromagnetic.
pub fn builder_mobius(m: usize, j_rail: f64, j_rung: f64) -> Result<CouplingMatrix> {
    if m % 2 != 0 || m < 4 {
        return Err(Error::param("M", format!("Möbius ladder needs an even number of sites ≥ 4, got {m}")));
    }
    let mut j = DMatrix::zeros(m, m);
    for i in 0..m {
        let next = (i + 1) % m;
        j[(i, next)] = j_rail;
        j[(next, i)] = j_rail;
    }
    for i in 0..m / 2 {
        j[(i, i + m / 2)] = j_rung;
        j[(i + m / 2, i)] = j_rung;
    }
    CouplingMatrix::new(j, Boundary::Periodic)
}

/// `J_ij = |i−j|^s` when `|i−j|` is a power of two, zero otherwise.
pub fn builder_tree(s: f64, m: usize) -> Result<CouplingMatrix> {
    if m < 2 {
        return Err(Error::param("M", "need at least two sites"));
    }
    let j = DMatrix::from_fn(m, m, |a, b| {
        let d = a.abs_diff(b);
        if d > 0 && d.is_power_of_two() {
            (d as f64).powf(s)
        } else {
            0.0
        }
    });
    CouplingMatrix::new(j, Boundary::Open)
}

#[derive(Debug, Clone)]
pub struct SeparableCouplings {
    pub couplings: CouplingMatrix,
    /// Numerical rank of `Re[Σ_μ 𝒢*_μ 𝒢_μᵀ]` before the diagonal is removed.
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// `J_ij = Re[Σ_μ 𝒢*_{μ,i} 𝒢_{μ,j}]` with the diagonal zeroed.
pub fn builder_separable(profiles: &[Vec<C64>]) -> Result<SeparableCouplings> {
    let m = profiles.first().map(Vec::len).ok_or_else(|| Error::param("profiles", "need at least one mode"))?;
    if let Some(p) = profiles.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: p.len() });
    }
    let full = DMatrix::from_fn(m, m, |a, b| profiles.iter().map(|g| (g[a].conj() * g[b]).re).sum::<f64>());
    let full = (&full + full.transpose()) * 0.5;
    let sv = full.clone().singular_values();
    let top = sv.max();
    let rank = sv.iter().filter(|&&v| v > 1e-10 * top && top > 0.0).count();
    let mut j = full;
    j.fill_diagonal(0.0);
    let mut singular_values: Vec<f64> = sv.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    Ok(SeparableCouplings { couplings: CouplingMatrix::new(j, Boundary::Open)?, rank, singular_values })
}

/// Gaussian random all-to-all couplings with variance `variance/M`,
/// reproducible from `seed`.
pub fn builder_sachdev_ye(m: usize, variance: f64, seed: u64) -> Result<CouplingMatrix> {
    if m < 2 {
        return Err(Error::param("M", "need at least two sites"));
    }
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::param("variance", "must be finite and non-negative"));
    }
    let normal = Normal::new(0.0, variance.sqrt()).expect("finite standard deviation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let mut j = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in a + 1..m {
            let v = normal.sample(&mut rng) * scale;
            j[(a, b)] = v;
            j[(b, a)] = v;
        }
    }
    CouplingMatrix::new(j, Boundary::Open)
}
