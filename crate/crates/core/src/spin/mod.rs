//! Collective spin algebra in the permutation-symmetric (Dicke) basis.
//!
//! Basis ordering is `m = S, S−1, …, −S`, so the north-pole coherent state
//! is the first basis vector. Composite spaces put the leftmost factor on
//! the slowest-varying index.

pub(crate) mod ellipse;
mod operator;
mod space;
mod state;

pub use ellipse::{ellipse_from_moments, squeezing_ellipse, SqueezingEllipse};
pub use operator::OperatorMatrix;
pub use space::{CompositeSpace, Factor, FockSpace, SpinSpace};
pub use state::{QuantumState, StateRepr};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, re, CMatrix, CVector, Csr, C64};
use crate::tol;

pub fn make_spin_space(s: f64) -> Result<SpinSpace> {
    SpinSpace::new(s)
}

/// Local (single-factor) ladder and Cartesian spin matrices.
#[derive(Debug, Clone)]
pub struct LocalSpin {
    pub sp: Csr,
    pub sm: Csr,
    pub sx: Csr,
    pub sy: Csr,
    pub sz: Csr,
}

impl LocalSpin {
    pub fn new(space: SpinSpace) -> Self {
        let s = space.s();
        let d = space.dim();
        let sp = linalg::csr_from_triplets(
            d,
            (1..d).map(|i| {
                let m = space.m(i);
                (i - 1, i, re((s * (s + 1.0) - m * (m + 1.0)).sqrt()))
            }),
        );
        let sm = linalg::adjoint(&sp);
        let sz = linalg::csr_diag(&(0..d).map(|i| re(space.m(i))).collect::<Vec<_>>());
        let sx = linalg::scale(&(&sp + &sm), re(0.5));
        let sy = linalg::scale(&(&sp - &sm), c(0.0, -0.5));
        LocalSpin { sp, sm, sx, sy, sz }
    }
}

/// Bosonic annihilation operator truncated at `n_max`.
pub fn annihilation(fock: FockSpace) -> Csr {
    let d = fock.dim();
    linalg::csr_from_triplets(d, (1..d).map(|n| (n - 1, n, re((n as f64).sqrt()))))
}

pub fn number(fock: FockSpace) -> Csr {
    let d = fock.dim();
    linalg::csr_diag(&(0..d).map(|n| re(n as f64)).collect::<Vec<_>>())
}

/// Collective spin operators embedded in a composite space.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub sx: OperatorMatrix,
    pub sy: OperatorMatrix,
    pub sz: OperatorMatrix,
    pub sp: OperatorMatrix,
    pub sm: OperatorMatrix,
}

impl SpinOperators {
    /// Operators for the first spin factor of `space`.
    pub fn on(space: &CompositeSpace) -> Result<Self> {
        let (k, spin) = space
            .spin_factor()
            .ok_or_else(|| Error::param("space", "no spin factor"))?;
        let local = LocalSpin::new(spin);
        let lift = |m: &Csr| OperatorMatrix::from_parts(space.clone(), space.embed(k, m));
        Ok(SpinOperators {
            sx: lift(&local.sx),
            sy: lift(&local.sy),
            sz: lift(&local.sz),
            sp: lift(&local.sp),
            sm: lift(&local.sm),
        })
    }

    pub fn cartesian(&self) -> [&OperatorMatrix; 3] {
        [&self.sx, &self.sy, &self.sz]
    }

    /// `n·S` for a real 3-vector `n`.
    pub fn along(&self, n: [f64; 3]) -> OperatorMatrix {
        let a = self.sx.scaled(n[0]);
        let b = self.sy.scaled(n[1]);
        let cz = self.sz.scaled(n[2]);
        &(&a + &b) + &cz
    }
}

pub fn spin_operators(space: SpinSpace) -> SpinOperators {
    SpinOperators::on(&CompositeSpace::spin(space)).expect("single spin factor")
}

/// Coherent spin state `exp(−iφS_z) exp(−iθS_y) |S,S⟩`, built from the
/// closed-form Wigner `d^S_{m,S}(θ)` amplitudes.
pub fn coherent_spin_state(space: SpinSpace, theta: f64, phi: f64) -> QuantumState {
    QuantumState::pure(CompositeSpace::spin(space), css_amplitudes(space, theta, phi))
        .expect("coherent state is normalizable")
}

pub(crate) fn css_amplitudes(space: SpinSpace, theta: f64, phi: f64) -> CVector {
    let n = space.n_atoms() as usize;
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    CVector::from_fn(space.dim(), |i, _| {
        // i = S − m spin flips
        let m = space.m(i);
        let ln_binom = ln_fact[n] - ln_fact[i] - ln_fact[n - i];
        let mag = (0.5 * ln_binom).exp() * pow_int(ch, n - i) * pow_int(sh, i);
        C64::from_polar(mag, -m * phi)
    })
}

fn pow_int(x: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(k as i32)
    }
}

/// Dicke state `|S,m⟩`.
pub fn dicke_state(space: SpinSpace, m: f64) -> Result<QuantumState> {
    let idx = space.index_of(m)?;
    QuantumState::basis(CompositeSpace::spin(space), idx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
    Unit([f64; 3]),
}

impl Axis {
    pub fn vector(&self) -> [f64; 3] {
        match *self {
            Axis::X => [1.0, 0.0, 0.0],
            Axis::Y => [0.0, 1.0, 0.0],
            Axis::Z => [0.0, 0.0, 1.0],
            Axis::Unit(v) => v,
        }
    }

    fn checked(&self) -> Result<[f64; 3]> {
        let v = self.vector();
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if (n - 1.0).abs() > tol::ALGEBRAIC {
            return Err(Error::NonUnitAxis(n));
        }
        Ok(v)
    }
}

/// Eigendecomposition of `n·S` on one spin factor, reusable for any angle.
#[derive(Debug, Clone)]
pub struct RotationGenerator {
    space: CompositeSpace,
    factor: usize,
    diagonal: Option<Vec<f64>>,
    energies: Vec<f64>,
    vectors: CMatrix,
}

impl RotationGenerator {
    pub fn new(space: &CompositeSpace, axis: Axis) -> Result<Self> {
        let n = axis.checked()?;
        let (factor, spin) = space
            .spin_factor()
            .ok_or_else(|| Error::param("space", "no spin factor"))?;
        if n[0] == 0.0 && n[1] == 0.0 {
            let d = (0..spin.dim()).map(|i| n[2] * spin.m(i)).collect();
            return Ok(RotationGenerator {
                space: space.clone(),
                factor,
                diagonal: Some(d),
                energies: vec![],
                vectors: CMatrix::zeros(0, 0),
            });
        }
        let l = LocalSpin::new(spin);
        let g = &(&linalg::scale(&l.sx, re(n[0])) + &linalg::scale(&l.sy, re(n[1])))
            + &linalg::scale(&l.sz, re(n[2]));
        let (ev, vecs) = linalg::hermitian_eigh(&linalg::to_dense(&g));
        Ok(RotationGenerator {
            space: space.clone(),
            factor,
            diagonal: None,
            energies: ev.iter().copied().collect(),
            vectors: vecs,
        })
    }

    /// Local unitary `exp(−i·angle·n·S)` on the spin factor.
    pub fn local_unitary(&self, angle: f64) -> CMatrix {
        match &self.diagonal {
            Some(d) => CMatrix::from_diagonal(&CVector::from_iterator(
                d.len(),
                d.iter().map(|&e| C64::from_polar(1.0, -e * angle)),
            )),
            None => {
                let n = self.energies.len();
                let scaled = CMatrix::from_fn(n, n, |r, col| {
                    self.vectors[(r, col)] * C64::from_polar(1.0, -self.energies[col] * angle)
                });
                scaled * self.vectors.adjoint()
            }
        }
    }

    pub fn apply(&self, state: &QuantumState, angle: f64) -> QuantumState {
        let only_factor = self.space.factors().len() == 1;
        if let (Some(d), Some(v)) = (&self.diagonal, state.amplitudes()) {
            if only_factor {
                let w = CVector::from_iterator(
                    v.len(),
                    v.iter()
                        .zip(d)
                        .map(|(a, &e)| a * C64::from_polar(1.0, -e * angle)),
                );
                return state.with_repr(StateRepr::Pure(w));
            }
        }
        let local = self.local_unitary(angle);
        if only_factor {
            return state.transform(&local);
        }
        let full = self
            .space
            .embed(self.factor, &linalg::from_dense(&local, 0.0));
        match state.repr() {
            StateRepr::Pure(v) => state.with_repr(StateRepr::Pure(linalg::matvec(&full, v))),
            StateRepr::Mixed(_) => state.transform(&linalg::to_dense(&full)),
        }
    }
}

/// Applies `exp(−i·angle·n·S)` to the first spin factor of `state`.
pub fn rotate(state: &QuantumState, axis: Axis, angle: f64) -> Result<QuantumState> {
    Ok(RotationGenerator::new(state.space(), axis)?.apply(state, angle))
}

/// Expectations, variances and symmetrized covariances of a list of operators.
#[derive(Debug, Clone)]
pub struct Moments {
    pub expectations: Vec<C64>,
    pub variances: Vec<f64>,
    /// `½⟨{A,B}⟩ − ⟨A⟩⟨B⟩`.
    pub covariances: CMatrix,
}

pub fn moments(state: &QuantumState, ops: &[&OperatorMatrix]) -> Result<Moments> {
    let n = ops.len();
    let mut expectations = Vec::with_capacity(n);
    for op in ops {
        expectations.push(state.expect(op)?);
    }
    let mut cov = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let ab = state.expect_product(ops[a], ops[b])?;
            let ba = if a == b {
                ab
            } else {
                state.expect_product(ops[b], ops[a])?
            };
            let v = (ab + ba) * 0.5 - expectations[a] * expectations[b];
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    let variances = (0..n).map(|a| cov[(a, a)].re).collect();
    Ok(Moments {
        expectations,
        variances,
        covariances: cov,
    })
}

/// Mean spin vector and symmetrized 3×3 covariance of `(S_x, S_y, S_z)`.
#[derive(Debug, Clone, Copy)]
pub struct SpinMoments {
    pub mean: [f64; 3],
    pub cov: [[f64; 3]; 3],
}

impl SpinMoments {
    pub fn length(&self) -> f64 {
        norm3(self.mean)
    }

    /// Variance of `n·S`.
    pub fn variance_along(&self, n: [f64; 3]) -> f64 {
        let mut v = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                v += n[a] * self.cov[a][b] * n[b];
            }
        }
        v
    }

    pub fn cov_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(3, 3, |a, b| self.cov[a][b])
    }
}

pub fn spin_moments(state: &QuantumState) -> Result<SpinMoments> {
    let ops = SpinOperators::on(state.space())?;
    spin_moments_with(state, &ops)
}

pub fn spin_moments_with(state: &QuantumState, ops: &SpinOperators) -> Result<SpinMoments> {
    let m = moments(state, &ops.cartesian())?;
    let mut mean = [0.0; 3];
    let mut cov = [[0.0; 3]; 3];
    for a in 0..3 {
        mean[a] = m.expectations[a].re;
        for b in 0..3 {
            cov[a][b] = m.covariances[(a, b)].re;
        }
    }
    Ok(SpinMoments { mean, cov })
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
