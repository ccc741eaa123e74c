use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{self, re, CMatrix, CVector, Csr, C64};
use crate::tol;

use super::space::CompositeSpace;

/// Square complex operator on a [`CompositeSpace`], stored in CSR form.
///
/// The Hermitian flag is computed on construction from `‖A − A†‖_max`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    space: CompositeSpace,
    mat: Csr,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(space: CompositeSpace, mat: Csr) -> Result<Self> {
        let dim = space.dim();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        let hermitian = linalg::hermiticity_defect(&mat) < tol::ALGEBRAIC;
        Ok(OperatorMatrix {
            space,
            mat,
            hermitian,
        })
    }

    pub(crate) fn from_parts(space: CompositeSpace, mat: Csr) -> Self {
        OperatorMatrix::new(space, mat).expect("operator dimension matches its space")
    }

    pub fn zero(space: CompositeSpace) -> Self {
        let n = space.dim();
        OperatorMatrix::from_parts(space, linalg::csr_zero(n))
    }

    pub fn identity(space: CompositeSpace) -> Self {
        let n = space.dim();
        OperatorMatrix::from_parts(space, linalg::csr_identity(n))
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Csr {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.mat)
    }

    /// True when every stored entry sits on the diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.mat.triplet_iter().all(|(i, j, v)| i == j || v.norm() == 0.0)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        let mut d = vec![linalg::ZERO; self.dim()];
        for (i, j, v) in self.mat.triplet_iter() {
            if i == j {
                d[i] += *v;
            }
        }
        d
    }

    pub fn to_dense(&self) -> CMatrix {
        linalg::to_dense(&self.mat)
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        linalg::matvec(&self.mat, psi)
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix::from_parts(self.space.clone(), linalg::adjoint(&self.mat))
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.scaled_c(re(s))
    }

    pub fn scaled_c(&self, s: C64) -> Self {
        OperatorMatrix::from_parts(self.space.clone(), linalg::scale(&self.mat, s))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &OperatorMatrix) -> Self {
        self.check_space(other);
        OperatorMatrix::from_parts(self.space.clone(), linalg::commutator(&self.mat, &other.mat))
    }

    /// Largest absolute matrix entry.
    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.mat)
    }

    /// `‖self − other‖_max`.
    pub fn max_diff(&self, other: &OperatorMatrix) -> f64 {
        (self - other).max_abs()
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian(self.hermiticity_defect()))
        }
    }

    fn check_space(&self, other: &OperatorMatrix) {
        assert_eq!(self.space, other.space, "operators act on different spaces");
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.check_space(rhs);
        OperatorMatrix::from_parts(self.space.clone(), &self.mat + &rhs.mat)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.check_space(rhs);
        OperatorMatrix::from_parts(self.space.clone(), &self.mat - &rhs.mat)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.check_space(rhs);
        OperatorMatrix::from_parts(self.space.clone(), &self.mat * &rhs.mat)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scaled(-1.0)
    }
}
