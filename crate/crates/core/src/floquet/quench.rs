use nalgebra::DMatrix;

use crate::cv::{symplectic_defect, symplectic_form, CovarianceState};
use crate::error::{Error, Result};
use crate::linalg;

use super::coupling::CouplingMatrix;

#[derive(Debug, Clone)]
pub struct QuenchTrack {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceState>,
    /// `⟨x_i x_j⟩ − ⟨x_i⟩⟨x_j⟩` per time.
    pub cxx: Vec<DMatrix<f64>>,
    /// Eigenvalues of `J`, ascending.
    pub j_eigenvalues: Vec<f64>,
    /// Largest `√(−q(q + 2λ))` over the spectrum; zero when every mode is stable.
    pub instability_rate: f64,
    pub unstable: bool,
    /// `max_t ‖S Ω Sᵀ − Ω‖_max`.
    pub symplectic_defect: f64,
}

/// Quadratic Hamiltonian matrix `H` with `H_G = ½ rᵀ H r`.
fn hamiltonian_matrix(j: &DMatrix<f64>, q: f64) -> DMatrix<f64> {
    let m = j.nrows();
    let mut h = DMatrix::zeros(2 * m, 2 * m);
    for a in 0..m {
        for b in 0..m {
            h[(a, b)] = 2.0 * j[(a, b)];
        }
        h[(a, a)] += q;
        h[(m + a, m + a)] = q;
    }
    h
}

/// Vacuum evolved under `H_G = (q/2)Σ_i(x_i² + p_i²) + Σ_ij J_ij x_i x_j`
/// through the symplectic propagator `S(t) = exp(ΩHt)`.
pub fn gaussian_quench(j: &CouplingMatrix, q: f64, times: &[f64]) -> Result<QuenchTrack> {
    if !q.is_finite() {
        return Err(Error::param("q", "must be finite"));
    }
    crate::dynamics::check_times(times)?;
    let m = j.n_sites();
    let generator = symplectic_form(m) * hamiltonian_matrix(j.matrix(), q);
    let vacuum = CovarianceState::vacuum(m)?;
    let (vals, _) = linalg::symmetric_eigh(j.matrix());
    let growth = vals.iter().map(|&l| -q * (q + 2.0 * l)).fold(f64::NEG_INFINITY, f64::max);
    let mut track = QuenchTrack {
        times: times.to_vec(),
        states: Vec::with_capacity(times.len()),
        cxx: Vec::with_capacity(times.len()),
        j_eigenvalues: vals.iter().copied().collect(),
        instability_rate: growth.max(0.0).sqrt(),
        unstable: growth > 0.0,
        symplectic_defect: 0.0,
    };
    for &t in times {
        let s = (&generator * t).exp();
        track.symplectic_defect = track.symplectic_defect.max(symplectic_defect(&s));
        let st = vacuum.apply_symplectic(&s)?;
        track.cxx.push(st.sigma().view((0, 0), (m, m)).into_owned());
        track.states.push(st);
    }
    Ok(track)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::Boundary;

    #[test]
    fn zero_coupling_keeps_vacuum() {
        let track = gaussian_quench(&CouplingMatrix::zeros(4, Boundary::Open), 1.3, &[0.0, 1.0, 5.0]).unwrap();
        for st in &track.states {
            assert!((st.sigma() - DMatrix::identity(8, 8) * 0.5).amax() < 1e-12);
        }
        assert!(!track.unstable);
    }

    /// Single normal mode with `ẋ = q p`, `ṗ = −(q + 2λ) x` from vacuum.
    fn mode_variance(q: f64, lambda: f64, t: f64) -> f64 {
        let w2 = q * (q + 2.0 * lambda);
        if w2 < 0.0 {
            let g = (-w2).sqrt();
            0.5 * ((g * t).cosh().powi(2) + (q / g).powi(2) * (g * t).sinh().powi(2))
        } else {
            let w = w2.sqrt();
            0.5 * ((w * t).cos().powi(2) + (q / w).powi(2) * (w * t).sin().powi(2))
        }
    }

    #[test]
    fn two_site_normal_modes() {
        let (q, jf) = (0.4, -1.0);
        let j = CouplingMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, jf, jf, 0.0]), Boundary::Open).unwrap();
        let times: Vec<f64> = (0..=10).map(|k| 0.8 * k as f64).collect();
        let track = gaussian_quench(&j, q, &times).unwrap();
        assert!(track.unstable);
        assert!((track.instability_rate - (-q * (q + 2.0 * jf)).sqrt()).abs() < 1e-12);
        for (t, c) in times.iter().zip(&track.cxx) {
            // X_± = (x₁ ± x₂)/√2 see λ = ±J
            let want = 0.5 * (mode_variance(q, jf, *t) - mode_variance(q, -jf, *t));
            assert!((c[(0, 1)] - want).abs() < 1e-9 * want.abs().max(1.0));
        }
        assert!(track.symplectic_defect < 1e-8);
        for st in &track.states {
            assert!(st.physicality() > -1e-8);
        }
    }
}
