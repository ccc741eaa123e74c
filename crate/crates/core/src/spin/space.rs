use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{csr_identity, kron, Csr};

/// Collective spin of length `S` with basis `|S,m⟩`, `m = S, S−1, …, −S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinSpace {
    twice_s: u32,
}

impl SpinSpace {
    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !s.is_finite() || s < 0.0 || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::InvalidSpin(s));
        }
        Ok(SpinSpace {
            twice_s: twice.round() as u32,
        })
    }

    /// Spin of `n` two-level atoms in the symmetric subspace (`S = n/2`).
    pub fn from_atoms(n: u32) -> Self {
        SpinSpace { twice_s: n }
    }

    pub fn s(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    /// Number of atoms `N = 2S`.
    pub fn n_atoms(&self) -> u32 {
        self.twice_s
    }

    pub fn dim(&self) -> usize {
        self.twice_s as usize + 1
    }

    /// Magnetic quantum number of basis index `i`.
    pub fn m(&self, i: usize) -> f64 {
        self.s() - i as f64
    }

    pub fn index_of(&self, m: f64) -> Result<usize> {
        let k = self.s() - m;
        if m.abs() > self.s() + 1e-12 || (k - k.round()).abs() > 1e-9 {
            return Err(Error::InvalidProjection { s: self.s(), m });
        }
        Ok(k.round() as usize)
    }
}

/// Single bosonic mode truncated at `n_max` photons (dimension `n_max + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidFockCutoff(n_max));
        }
        Ok(FockSpace { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    Spin(SpinSpace),
    Fock(FockSpace),
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Spin(s) => s.dim(),
            Factor::Fock(f) => f.dim(),
        }
    }
}

/// Tensor product of spin and Fock factors. The leftmost factor is the
/// slowest-varying index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompositeSpace {
    factors: Vec<Factor>,
}

impl CompositeSpace {
    pub fn new(factors: Vec<Factor>) -> Self {
        CompositeSpace { factors }
    }

    pub fn spin(space: SpinSpace) -> Self {
        CompositeSpace::new(vec![Factor::Spin(space)])
    }

    pub fn spin_fock(spin: SpinSpace, fock: FockSpace) -> Self {
        CompositeSpace::new(vec![Factor::Spin(spin), Factor::Fock(fock)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(Factor::dim).product()
    }

    /// Index of the first spin factor.
    pub fn spin_factor(&self) -> Option<(usize, SpinSpace)> {
        self.factors.iter().enumerate().find_map(|(k, f)| match f {
            Factor::Spin(s) => Some((k, *s)),
            Factor::Fock(_) => None,
        })
    }

    /// Lifts an operator on factor `k` to the full space.
    pub fn embed(&self, k: usize, local: &Csr) -> Csr {
        assert_eq!(local.nrows(), self.factors[k].dim(), "local operator dimension");
        let left: usize = self.factors[..k].iter().map(Factor::dim).product();
        let right: usize = self.factors[k + 1..].iter().map(Factor::dim).product();
        let mut out = local.clone();
        if left > 1 {
            out = kron(&csr_identity(left), &out);
        }
        if right > 1 {
            out = kron(&out, &csr_identity(right));
        }
        out
    }

    /// Multi-index of a flat basis index.
    pub fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = idx % f.dim();
            idx /= f.dim();
        }
        out
    }

    pub fn flatten(&self, multi: &[usize]) -> usize {
        self.factors
            .iter()
            .zip(multi)
            .fold(0, |acc, (f, &i)| acc * f.dim() + i)
    }
}
