//! Dense/sparse complex linear algebra shared by the engines.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub use crate::sparse::Csr;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn csr_from_triplets(n: usize, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> Csr {
    Csr::from_triplets(n, n, entries.into_iter().collect())
}

pub fn csr_diag(diag: &[C64]) -> Csr {
    csr_from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
}

pub fn csr_identity(n: usize) -> Csr {
    Csr::identity(n)
}

pub fn csr_zero(n: usize) -> Csr {
    Csr::zeros(n, n)
}

/// Kronecker product `a ⊗ b`; `a` indexes the slow (leftmost) factor.
pub fn kron(a: &Csr, b: &Csr) -> Csr {
    let nb = b.nrows();
    let n = a.nrows() * nb;
    let mut t = Vec::with_capacity(a.nnz() * b.nnz());
    for (i, j, va) in a.triplet_iter() {
        for (k, l, vb) in b.triplet_iter() {
            t.push((i * nb + k, j * b.ncols() + l, va * vb));
        }
    }
    Csr::from_triplets(n, a.ncols() * b.ncols(), t)
}

pub fn adjoint(a: &Csr) -> Csr {
    let mut t = a.transpose();
    for v in t.values_mut() {
        *v = v.conj();
    }
    t
}

pub fn scale(a: &Csr, s: C64) -> Csr {
    let mut out = a.clone();
    for v in out.values_mut() {
        *v *= s;
    }
    out
}

/// Largest absolute entry.
pub fn max_abs(a: &Csr) -> f64 {
    a.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn max_abs_dense(a: &CMatrix) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn matvec(a: &Csr, x: &CVector) -> CVector {
    let mut out = CVector::zeros(a.nrows());
    let offs = a.row_offsets();
    let cols = a.col_indices();
    let vals = a.values();
    for i in 0..a.nrows() {
        let mut acc = ZERO;
        for p in offs[i]..offs[i + 1] {
            acc += vals[p] * x[cols[p]];
        }
        out[i] = acc;
    }
    out
}

/// `a * m` for sparse `a` and dense `m`.
pub fn spmm(a: &Csr, m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows(), m.ncols());
    let offs = a.row_offsets();
    let cols = a.col_indices();
    let vals = a.values();
    for col in 0..m.ncols() {
        let src = m.column(col);
        let mut dst = out.column_mut(col);
        for i in 0..a.nrows() {
            let mut acc = ZERO;
            for p in offs[i]..offs[i + 1] {
                acc += vals[p] * src[cols[p]];
            }
            dst[i] = acc;
        }
    }
    out
}

/// `m * a` for dense `m` and sparse `a`.
pub fn mmsp(m: &CMatrix, a: &Csr) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        let src = m.column(i);
        let mut dst = out.column_mut(j);
        dst.axpy(*v, &src, ONE);
    }
    out
}

pub fn to_dense(a: &Csr) -> CMatrix {
    let mut m = CMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        m[(i, j)] += *v;
    }
    m
}

pub fn from_dense(m: &CMatrix, drop_tol: f64) -> Csr {
    let n = m.nrows();
    let mut t = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..n {
            if m[(i, j)].norm() > drop_tol {
                t.push((i, j, m[(i, j)]));
            }
        }
    }
    Csr::from_triplets(n, m.ncols(), t)
}

/// `‖A − A†‖_max`.
pub fn hermiticity_defect(a: &Csr) -> f64 {
    max_abs(&(a - &adjoint(a)))
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &Csr, b: &Csr) -> Csr {
    &(a * b) - &(b * a)
}

pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// Eigendecomposition of a dense Hermitian matrix with ascending eigenvalues.
pub fn hermitian_eigh(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    sort_eig(eig.eigenvalues, eig.eigenvectors)
}

/// Eigendecomposition of a dense real symmetric matrix with ascending eigenvalues.
pub fn symmetric_eigh(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    sort_eig(eig.eigenvalues, eig.eigenvectors)
}

fn sort_eig<T: nalgebra::Scalar + Copy>(
    vals: DVector<f64>,
    vecs: DMatrix<T>,
) -> (DVector<f64>, DMatrix<T>) {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = DVector::from_iterator(vals.len(), idx.iter().map(|&i| vals[i]));
    let sorted_vecs = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, col| vecs[(r, idx[col])]);
    (sorted_vals, sorted_vecs)
}

/// Propagator `exp(−i H t)` applied to `psi` through a precomputed
/// eigendecomposition.
pub struct EigenPropagator {
    pub energies: DVector<f64>,
    pub vectors: CMatrix,
}

impl EigenPropagator {
    pub fn new(h: &CMatrix) -> Self {
        let (energies, vectors) = hermitian_eigh(h);
        EigenPropagator { energies, vectors }
    }

    pub fn apply(&self, psi: &CVector, t: f64) -> CVector {
        let mut coeffs = self.vectors.ad_mul(psi);
        for (k, cf) in coeffs.iter_mut().enumerate() {
            *cf *= C64::from_polar(1.0, -self.energies[k] * t);
        }
        &self.vectors * coeffs
    }

    pub fn unitary(&self, t: f64) -> CMatrix {
        let n = self.energies.len();
        let phases = CVector::from_iterator(
            n,
            self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)),
        );
        let scaled = CMatrix::from_fn(n, n, |r, col| self.vectors[(r, col)] * phases[col]);
        scaled * self.vectors.adjoint()
    }
}

/// Krylov (Lanczos) propagation of `exp(−i H t) psi` for sparse Hermitian `H`.
///
/// The interval is split into substeps; each substep is accepted once the
/// a-posteriori error estimate drops below `tol`, otherwise it is halved.
pub struct KrylovPropagator<'a> {
    pub h: &'a Csr,
    pub subspace: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KrylovStats {
    pub substeps: usize,
    pub max_error: f64,
}

impl<'a> KrylovPropagator<'a> {
    pub fn new(h: &'a Csr) -> Self {
        KrylovPropagator {
            h,
            subspace: 30,
            tol: 1e-12,
        }
    }

    pub fn propagate(&self, psi: &CVector, t: f64, stats: &mut KrylovStats) -> Result<CVector> {
        let mut state = psi.clone();
        let mut done = 0.0;
        let mut dt = t;
        let mut halvings = 0;
        while done < t {
            dt = dt.min(t - done);
            let (next, err) = self.step(&state, dt);
            if err <= self.tol * dt.max(1e-300) / t.max(1e-300) || dt < 1e-14 * t {
                state = next;
                done += dt;
                stats.substeps += 1;
                stats.max_error = stats.max_error.max(err);
                halvings = 0;
                dt *= 1.5;
            } else {
                dt *= 0.5;
                halvings += 1;
                if halvings > 60 {
                    return Err(Error::KrylovNonConvergence { residual: err });
                }
            }
        }
        Ok(state)
    }

    fn step(&self, psi: &CVector, dt: f64) -> (CVector, f64) {
        let norm = psi.norm();
        if norm == 0.0 {
            return (psi.clone(), 0.0);
        }
        let m_max = self.subspace.min(psi.len());
        let mut basis: Vec<CVector> = Vec::with_capacity(m_max + 1);
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        basis.push(psi / re(norm));
        let mut breakdown = false;
        for j in 0..m_max {
            let mut w = matvec(self.h, &basis[j]);
            let a = basis[j].dotc(&w).re;
            alpha.push(a);
            w.axpy(re(-a), &basis[j], ONE);
            if j > 0 {
                w.axpy(re(-beta[j - 1]), &basis[j - 1], ONE);
            }
            // full reorthogonalization keeps the basis clean for long runs
            for v in &basis {
                let proj = v.dotc(&w);
                w.axpy(-proj, v, ONE);
            }
            let b = w.norm();
            beta.push(b);
            if b < 1e-14 {
                breakdown = true;
                break;
            }
            basis.push(w / re(b));
        }
        let m = alpha.len();
        let mut t_mat = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            t_mat[(j, j)] = alpha[j];
            if j + 1 < m {
                t_mat[(j, j + 1)] = beta[j];
                t_mat[(j + 1, j)] = beta[j];
            }
        }
        let (evals, evecs) = symmetric_eigh(&t_mat);
        // coefficients c = exp(−i T dt) e_1
        let coeffs: Vec<C64> = (0..m)
            .map(|r| {
                (0..m)
                    .map(|k| re(evecs[(r, k)] * evecs[(0, k)]) * C64::from_polar(1.0, -evals[k] * dt))
                    .sum()
            })
            .collect();
        let mut out = CVector::zeros(psi.len());
        for (k, cf) in coeffs.iter().enumerate() {
            out.axpy(*cf * norm, &basis[k], ONE);
        }
        let err = if breakdown {
            0.0
        } else {
            beta[m - 1] * coeffs[m - 1].norm() * norm
        };
        (out, err)
    }
}
