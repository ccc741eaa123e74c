use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::tol;

/// Gaussian state of `M` modes with quadratures ordered
/// `(x₁, …, x_M, p₁, …, p_M)`; the vacuum has `Var(x) = Var(p) = ½`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    mean: DVector<f64>,
    sigma: DMatrix<f64>,
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Standard symplectic form `Ω = [[0, I], [−I, 0]]`.
pub fn symplectic_form(m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * m, 2 * m, |r, c| {
        if c == r + m {
            1.0
        } else if r == c + m {
            -1.0
        } else {
            0.0
        }
    })
}

/// `max |S Ω Sᵀ − Ω|`.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(s.nrows() / 2);
    (s * &omega * s.transpose() - omega).amax()
}

impl CovarianceState {
    /// Validates symmetry and the uncertainty principle `Σ + iΩ/2 ⪰ 0`.
    pub fn new(mean: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let n = sigma.nrows();
        if sigma.ncols() != n || n % 2 != 0 || n == 0 {
            return Err(Error::DimensionMismatch { expected: 2 * (n / 2).max(1), got: sigma.ncols() });
        }
        if mean.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: mean.len() });
        }
        let asym = (&sigma - sigma.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let state = CovarianceState { mean, sigma };
        let low = state.physicality();
        if low < -tol::POSITIVITY {
            return Err(Error::InvalidState(format!("Σ + iΩ/2 has eigenvalue {low:e}")));
        }
        Ok(state)
    }

    pub fn vacuum(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("M", "need at least one mode"));
        }
        Ok(CovarianceState { mean: DVector::zeros(2 * m), sigma: DMatrix::identity(2 * m, 2 * m) * 0.5 })
    }

    pub fn n_modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// Smallest eigenvalue of `Σ + iΩ/2`; non-negative for physical states.
    pub fn physicality(&self) -> f64 {
        let m = self.n_modes();
        let omega = symplectic_form(m);
        let h = CMatrix::from_fn(2 * m, 2 * m, |r, c| C64::new(self.sigma[(r, c)], 0.5 * omega[(r, c)]));
        linalg::hermitian_eigh(&h).0[0]
    }

    /// `1/√det(2Σ)`.
    pub fn purity(&self) -> f64 {
        1.0 / (&self.sigma * 2.0).determinant().sqrt()
    }

    /// Symplectic eigenvalues in ascending order; each is ½ for a pure state.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        symplectic_spectrum(&self.sigma)
    }

    /// `Var(cᵀ r̂)` for a real quadrature combination `c`.
    pub fn variance(&self, c: &DVector<f64>) -> f64 {
        (c.transpose() * &self.sigma * c)[(0, 0)]
    }

    pub fn var_x(&self, i: usize) -> f64 {
        self.sigma[(i, i)]
    }

    pub fn var_p(&self, i: usize) -> f64 {
        let m = self.n_modes();
        self.sigma[(m + i, m + i)]
    }

    /// `Σ ← SΣSᵀ`, `r̄ ← S r̄`.
    pub fn apply_symplectic(&self, s: &DMatrix<f64>) -> Result<Self> {
        if s.nrows() != self.sigma.nrows() || s.ncols() != self.sigma.ncols() {
            return Err(Error::DimensionMismatch { expected: self.sigma.nrows(), got: s.nrows() });
        }
        let sigma = s * &self.sigma * s.transpose();
        let sigma = (&sigma + sigma.transpose()) * 0.5;
        Ok(CovarianceState { mean: s * &self.mean, sigma })
    }

    /// Marginal state of the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        let m = self.n_modes();
        if let Some(&bad) = modes.iter().find(|&&k| k >= m) {
            return Err(Error::param("subset", format!("mode {bad} out of range for M = {m}")));
        }
        if modes.is_empty() {
            return Err(Error::param("subset", "must not be empty"));
        }
        let k = modes.len();
        let idx: Vec<usize> = modes.iter().copied().chain(modes.iter().map(|&i| i + m)).collect();
        let sigma = DMatrix::from_fn(2 * k, 2 * k, |r, c| self.sigma[(idx[r], idx[c])]);
        let mean = DVector::from_fn(2 * k, |r, _| self.mean[idx[r]]);
        Ok(CovarianceState { mean, sigma })
    }

    /// Quadrature labels in storage order.
    pub fn ordering(&self) -> Vec<String> {
        let m = self.n_modes();
        (1..=m).map(|i| format!("x{i}")).chain((1..=m).map(|i| format!("p{i}"))).collect()
    }

    /// CSV with a header naming the quadratures, one row per quadrature.
    pub fn to_csv(&self) -> String {
        let labels = self.ordering();
        let mut out = String::from("quadrature,mean");
        for l in &labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (r, l) in labels.iter().enumerate() {
            out.push_str(&format!("{l},{:.11e}", self.mean[r]));
            for c in 0..labels.len() {
                out.push_str(&format!(",{:.11e}", self.sigma[(r, c)]));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CovarianceRecord::from(self)).expect("plain numeric record")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let rec: CovarianceRecord =
            serde_json::from_value(v.clone()).map_err(|e| Error::Io(format!("covariance JSON: {e}")))?;
        rec.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct CovarianceRecord {
    ordering: Vec<String>,
    mean: Vec<f64>,
    sigma: Vec<Vec<f64>>,
}

impl From<&CovarianceState> for CovarianceRecord {
    fn from(s: &CovarianceState) -> Self {
        let n = s.sigma.nrows();
        CovarianceRecord {
            ordering: s.ordering(),
            mean: s.mean.iter().copied().collect(),
            sigma: (0..n).map(|r| (0..n).map(|c| s.sigma[(r, c)]).collect()).collect(),
        }
    }
}

impl TryFrom<CovarianceRecord> for CovarianceState {
    type Error = Error;

    fn try_from(rec: CovarianceRecord) -> Result<Self> {
        let n = rec.mean.len();
        if rec.sigma.len() != n || rec.sigma.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: rec.sigma.len() });
        }
        let sigma = DMatrix::from_fn(n, n, |r, c| rec.sigma[r][c]);
        CovarianceState::new(DVector::from_vec(rec.mean), sigma)
    }
}

/// Positive eigenvalues of `i Σ^{½} Ω Σ^{½}`, ascending.
pub(crate) fn symplectic_spectrum(sigma: &DMatrix<f64>) -> Vec<f64> {
    let m = sigma.nrows() / 2;
    let (vals, vecs) = linalg::symmetric_eigh(sigma);
    let root = &vecs * DMatrix::from_diagonal(&vals.map(|v| v.max(0.0).sqrt())) * vecs.transpose();
    let k = &root * symplectic_form(m) * &root;
    let h = CMatrix::from_fn(2 * m, 2 * m, |r, c| C64::new(0.0, k[(r, c)]));
    let (ev, _) = linalg::hermitian_eigh(&h);
    // eigenvalues come in ±ν pairs; keep the upper half
    ev.iter().skip(m).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_pure_and_minimal() {
        let v = CovarianceState::vacuum(3).unwrap();
        assert!((v.purity() - 1.0).abs() < 1e-14);
        for nu in v.symplectic_eigenvalues() {
            assert!((nu - 0.5).abs() < 1e-12);
        }
        assert!(v.physicality().abs() < 1e-12);
    }

    #[test]
    fn rejects_unphysical() {
        let sigma = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, 0.1]));
        assert!(CovarianceState::new(DVector::zeros(2), sigma).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(CovarianceState::new(DVector::zeros(2), asym), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn thermal_symplectic_eigenvalue() {
        let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let s = CovarianceState::new(DVector::zeros(2), sigma).unwrap();
        assert!((s.symplectic_eigenvalues()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let sigma = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.2, 0.0, 0.1, //
            0.2, 0.9, 0.1, 0.0, //
            0.0, 0.1, 0.8, 0.0, //
            0.1, 0.0, 0.0, 1.1,
        ]);
        let s = CovarianceState::new(DVector::from_vec(vec![0.1, -0.2, 0.0, 0.3]), sigma).unwrap();
        let back = CovarianceState::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        assert!(s.to_csv().starts_with("quadrature,mean,x1,x2,p1,p2\n"));
    }
}
