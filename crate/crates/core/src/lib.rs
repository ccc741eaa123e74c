//! Collective-spin cavity QED toolkit.
//!
//! Exact finite-dimensional spin algebra, cavity Hamiltonians, unitary and
//! dissipative dynamics, QND measurement and heralding protocols,
//! metrological figures of merit, Floquet-programmed coupling graphs and a
//! Gaussian continuous-variable engine. Units: ħ = 1, all rates are angular
//! frequencies.

pub mod budget;
pub mod cv;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod hamiltonians;
pub mod linalg;
pub mod metrology;
pub mod optimize;
pub mod qnd;
pub mod sparse;
pub mod spin;
pub mod tol;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use spin::{
    coherent_spin_state, dicke_state, make_spin_space, moments, rotate, spin_operators,
    squeezing_ellipse, Axis, CompositeSpace, FockSpace, OperatorMatrix, QuantumState, SpinSpace,
};
