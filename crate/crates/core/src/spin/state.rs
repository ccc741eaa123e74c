use crate::error::{Error, Result};
use crate::linalg::{self, re, CMatrix, CVector, C64};
use crate::tol;

use super::operator::OperatorMatrix;
use super::space::CompositeSpace;

#[derive(Debug, Clone)]
pub enum StateRepr {
    Pure(CVector),
    Mixed(CMatrix),
}

/// Normalized pure state or density matrix on a [`CompositeSpace`].
#[derive(Debug, Clone)]
pub struct QuantumState {
    space: CompositeSpace,
    repr: StateRepr,
}

impl QuantumState {
    /// Wraps a state vector, normalizing it. Zero vectors are rejected.
    pub fn pure(space: CompositeSpace, amps: CVector) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amps.len(),
            });
        }
        let n = amps.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        Ok(QuantumState {
            space,
            repr: StateRepr::Pure(amps / re(n)),
        })
    }

    /// Wraps a density matrix after checking trace, Hermiticity and positivity.
    pub fn mixed(space: CompositeSpace, rho: CMatrix) -> Result<Self> {
        let d = space.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: rho.nrows(),
            });
        }
        let tr = rho.trace();
        if (tr - linalg::ONE).norm() > tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let herm = linalg::max_abs_dense(&(&rho - rho.adjoint()));
        if herm > tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!("non-Hermitian by {herm:e}")));
        }
        let (evals, _) = linalg::hermitian_eigh(&rho);
        if evals[0] < -tol::POSITIVITY {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                evals[0]
            )));
        }
        Ok(QuantumState {
            space,
            repr: StateRepr::Mixed(rho),
        })
    }

    /// Density matrix without validation; used by integrators that track
    /// drift separately.
    pub(crate) fn mixed_unchecked(space: CompositeSpace, rho: CMatrix) -> Self {
        QuantumState {
            space,
            repr: StateRepr::Mixed(rho),
        }
    }

    pub fn basis(space: CompositeSpace, index: usize) -> Result<Self> {
        let mut v = CVector::zeros(space.dim());
        if index >= v.len() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: index + 1,
            });
        }
        v[index] = linalg::ONE;
        QuantumState::pure(space, v)
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, StateRepr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&CVector> {
        match &self.repr {
            StateRepr::Pure(v) => Some(v),
            StateRepr::Mixed(_) => None,
        }
    }

    pub fn density(&self) -> CMatrix {
        match &self.repr {
            StateRepr::Pure(v) => v * v.adjoint(),
            StateRepr::Mixed(r) => r.clone(),
        }
    }

    pub fn to_mixed(&self) -> QuantumState {
        QuantumState {
            space: self.space.clone(),
            repr: StateRepr::Mixed(self.density()),
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(v) => v.norm_squared(),
            StateRepr::Mixed(r) => r.trace().re,
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(v) => v.norm_squared().powi(2),
            StateRepr::Mixed(r) => (r * r).trace().re,
        }
    }

    /// Populations in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            StateRepr::Pure(v) => v.iter().map(|a| a.norm_sqr()).collect(),
            StateRepr::Mixed(r) => (0..r.nrows()).map(|i| r[(i, i)].re).collect(),
        }
    }

    /// `tr(ρ A)`.
    pub fn expect(&self, op: &OperatorMatrix) -> Result<C64> {
        self.check_op(op)?;
        Ok(match &self.repr {
            StateRepr::Pure(v) => v.dotc(&op.apply(v)),
            StateRepr::Mixed(r) => {
                let mut acc = linalg::ZERO;
                for (i, j, a) in op.matrix().triplet_iter() {
                    acc += a * r[(j, i)];
                }
                acc
            }
        })
    }

    /// `tr(ρ A B)`.
    pub fn expect_product(&self, a: &OperatorMatrix, b: &OperatorMatrix) -> Result<C64> {
        self.check_op(a)?;
        self.check_op(b)?;
        Ok(match &self.repr {
            StateRepr::Pure(v) => a.adjoint().apply(v).dotc(&b.apply(v)),
            StateRepr::Mixed(r) => {
                let br = linalg::spmm(b.matrix(), r);
                let mut acc = linalg::ZERO;
                for (i, j, av) in a.matrix().triplet_iter() {
                    acc += av * br[(j, i)];
                }
                acc
            }
        })
    }

    /// Fidelity with another state. Pure/pure gives `|⟨a|b⟩|²`, pure/mixed
    /// `⟨ψ|ρ|ψ⟩`, and mixed/mixed the Uhlmann fidelity.
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        if self.space.dim() != other.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(match (&self.repr, &other.repr) {
            (StateRepr::Pure(a), StateRepr::Pure(b)) => a.dotc(b).norm_sqr(),
            (StateRepr::Pure(a), StateRepr::Mixed(r)) | (StateRepr::Mixed(r), StateRepr::Pure(a)) => {
                a.dotc(&(r * a)).re
            }
            (StateRepr::Mixed(r1), StateRepr::Mixed(r2)) => {
                let s = hermitian_sqrt(r1);
                let inner = &s * r2 * &s;
                let (ev, _) = linalg::hermitian_eigh(&inner);
                let tr: f64 = ev.iter().map(|&x| x.max(0.0).sqrt()).sum();
                tr * tr
            }
        })
    }

    /// Applies a linear map `K` (not necessarily unitary). Returns the
    /// unnormalized squared norm and the normalized post-state.
    pub fn apply_kraus(&self, k: &OperatorMatrix) -> Result<(f64, QuantumState)> {
        self.check_op(k)?;
        match &self.repr {
            StateRepr::Pure(v) => {
                let w = k.apply(v);
                let p = w.norm_squared();
                Ok((p, QuantumState::pure(self.space.clone(), w)?))
            }
            StateRepr::Mixed(r) => {
                let kr = linalg::spmm(k.matrix(), r);
                let krk = linalg::mmsp(&kr, &linalg::adjoint(k.matrix()));
                let p = krk.trace().re;
                if !(p > 0.0) {
                    return Err(Error::InvalidState("Kraus outcome has zero probability".into()));
                }
                Ok((
                    p,
                    QuantumState::mixed_unchecked(self.space.clone(), krk / re(p)),
                ))
            }
        }
    }

    /// Applies a unitary given as a dense matrix.
    pub fn transform(&self, u: &CMatrix) -> QuantumState {
        let repr = match &self.repr {
            StateRepr::Pure(v) => StateRepr::Pure(u * v),
            StateRepr::Mixed(r) => StateRepr::Mixed(u * r * u.adjoint()),
        };
        QuantumState {
            space: self.space.clone(),
            repr,
        }
    }

    pub(crate) fn with_repr(&self, repr: StateRepr) -> QuantumState {
        QuantumState {
            space: self.space.clone(),
            repr,
        }
    }

    fn check_op(&self, op: &OperatorMatrix) -> Result<()> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: op.dim(),
            });
        }
        Ok(())
    }
}

fn hermitian_sqrt(m: &CMatrix) -> CMatrix {
    let (ev, vecs) = linalg::hermitian_eigh(m);
    let n = ev.len();
    let scaled = CMatrix::from_fn(n, n, |r, c| vecs[(r, c)] * re(ev[c].max(0.0).sqrt()));
    scaled * vecs.adjoint()
}
