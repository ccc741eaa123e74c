use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, EigenPropagator, KrylovPropagator, KrylovStats, C64};
use crate::spin::{spin_moments_with, OperatorMatrix, QuantumState, SpinOperators, StateRepr};
use crate::tol;

use super::{check_times, snapshot_times, Diagnostics, EvolutionResult, Method};

/// `exp(−iHτ)|ψ⟩` at `n_snapshots` evenly spaced `τ ∈ [0, t]`.
pub fn evolve_unitary(h: &OperatorMatrix, state: &QuantumState, t: f64, n_snapshots: usize) -> Result<EvolutionResult> {
    if !(t >= 0.0) {
        return Err(Error::param("t", "must be non-negative"));
    }
    evolve_unitary_at(h, state, &snapshot_times(t, n_snapshots))
}

/// Unitary evolution sampled at arbitrary non-decreasing times.
///
/// Diagonal generators are applied as phases; otherwise dense
/// eigendecomposition is used up to dimension 512 and Krylov propagation
/// beyond.
pub fn evolve_unitary_at(h: &OperatorMatrix, state: &QuantumState, times: &[f64]) -> Result<EvolutionResult> {
    h.require_hermitian()?;
    check_times(times)?;
    if h.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), got: h.dim() });
    }
    let spin_ops = SpinOperators::on(state.space()).ok();
    let method = if h.is_diagonal() {
        Method::Diagonal
    } else if h.dim() <= tol::DENSE_MAX_DIM {
        Method::Eigen
    } else {
        Method::Krylov
    };
    let mut diag = Diagnostics::new(method);
    let mut states = Vec::with_capacity(times.len());

    match method {
        Method::Diagonal => {
            let e: Vec<f64> = h.diagonal().iter().map(|v| v.re).collect();
            for &t in times {
                let phases: Vec<C64> = e.iter().map(|&x| C64::from_polar(1.0, -x * t)).collect();
                states.push(apply_phases(state, &phases));
            }
            diag.steps = times.len();
        }
        Method::Eigen => {
            let prop = EigenPropagator::new(&h.to_dense());
            for &t in times {
                let next = match state.repr() {
                    StateRepr::Pure(v) => state_with(state, StateRepr::Pure(prop.apply(v, t))),
                    StateRepr::Mixed(_) => state.transform(&prop.unitary(t)),
                };
                states.push(next);
            }
            diag.steps = times.len();
        }
        Method::Krylov => {
            let prop = KrylovPropagator::new(h.matrix());
            let mut stats = KrylovStats::default();
            let mut prev_t = 0.0;
            let mut current = state.clone();
            for &t in times {
                let dt = t - prev_t;
                if dt > 0.0 {
                    current = match current.repr() {
                        StateRepr::Pure(v) => state_with(state, StateRepr::Pure(prop.propagate(v, dt, &mut stats)?)),
                        StateRepr::Mixed(r) => {
                            // U ρ U† = U (U ρ†)† column by column
                            let ur = propagate_columns(&prop, r, dt, &mut stats)?;
                            let urt = propagate_columns(&prop, &ur.adjoint(), dt, &mut stats)?;
                            state_with(state, StateRepr::Mixed(urt.adjoint()))
                        }
                    };
                }
                prev_t = t;
                states.push(current.clone());
            }
            diag.steps = stats.substeps;
            diag.max_error = stats.max_error;
        }
        Method::RungeKutta45 => unreachable!(),
    }

    let mut spin_moments = Vec::new();
    for s in &states {
        diag.trace_drift = diag.trace_drift.max(norm_drift(s));
        if let Some(ops) = &spin_ops {
            spin_moments.push(spin_moments_with(s, ops)?);
        }
    }
    Ok(EvolutionResult { times: times.to_vec(), states, spin_moments, diagnostics: diag })
}

fn norm_drift(s: &QuantumState) -> f64 {
    match s.repr() {
        StateRepr::Pure(v) => (v.norm() - 1.0).abs(),
        StateRepr::Mixed(r) => (r.trace().re - 1.0).abs(),
    }
}

fn state_with(template: &QuantumState, repr: StateRepr) -> QuantumState {
    template.with_repr(repr)
}

fn apply_phases(state: &QuantumState, phases: &[C64]) -> QuantumState {
    match state.repr() {
        StateRepr::Pure(v) => state_with(
            state,
            StateRepr::Pure(CVector::from_iterator(v.len(), v.iter().zip(phases).map(|(a, p)| a * p))),
        ),
        StateRepr::Mixed(r) => {
            let n = r.nrows();
            state_with(state, StateRepr::Mixed(CMatrix::from_fn(n, n, |i, j| r[(i, j)] * phases[i] * phases[j].conj())))
        }
    }
}

fn propagate_columns(prop: &KrylovPropagator, m: &CMatrix, t: f64, stats: &mut KrylovStats) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        let col = prop.propagate(&m.column(c).into_owned(), t, stats)?;
        out.set_column(c, &col);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{h_jaynes_cummings, h_oat, h_tavis_cummings};
    use crate::spin::{coherent_spin_state, CompositeSpace, FockSpace, SpinSpace};

    #[test]
    fn zero_time_is_identity() {
        let spin = SpinSpace::from_atoms(6);
        let psi = coherent_spin_state(spin, 1.0, 0.3);
        let h = crate::hamiltonians::h_xxz(0.3, 1.1, spin).unwrap();
        let r = evolve_unitary(&h, &psi, 0.0, 1).unwrap();
        assert!((r.states[0].fidelity(&psi).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_phases_exact() {
        let spin = SpinSpace::from_atoms(10);
        let h = h_oat(1.7, spin).unwrap();
        let psi = coherent_spin_state(spin, std::f64::consts::FRAC_PI_2, 0.0);
        let t = 0.83;
        let r = evolve_unitary(&h, &psi, t, 2).unwrap();
        let out = r.states[1].amplitudes().unwrap();
        let inp = psi.amplitudes().unwrap();
        for i in 0..spin.dim() {
            let e = 1.7 * spin.m(i).powi(2) / 10.0;
            assert!((out[i] - inp[i] * C64::from_polar(1.0, -e * t)).norm() < 1e-12);
        }
    }

    #[test]
    fn vacuum_rabi_round_trip() {
        let g = 0.9;
        let h = h_jaynes_cummings(g, 0.0, 3).unwrap();
        let space = h.space().clone();
        let e0 = QuantumState::basis(space.clone(), space.flatten(&[0, 0])).unwrap();
        let g1 = QuantumState::basis(space.clone(), space.flatten(&[1, 1])).unwrap();
        let half = evolve_unitary(&h, &e0, std::f64::consts::PI / (2.0 * g), 1).unwrap();
        assert!(half.states[0].fidelity(&g1).unwrap() > 1.0 - 1e-10);
        let full = evolve_unitary(&h, &e0, std::f64::consts::PI / g, 1).unwrap();
        assert!(full.states[0].fidelity(&e0).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn krylov_matches_eigen_and_conserves_energy() {
        // dim = 101 × 6 = 606 > 512 forces the Krylov path
        let spin = SpinSpace::from_atoms(100);
        let h = h_tavis_cummings(0.05, 0.2, spin, 5).unwrap();
        let space = CompositeSpace::spin_fock(spin, FockSpace::new(5).unwrap());
        let css = coherent_spin_state(spin, 2.0, 0.1);
        let mut amps = CVector::zeros(space.dim());
        for i in 0..spin.dim() {
            amps[space.flatten(&[i, 0])] = css.amplitudes().unwrap()[i];
        }
        let psi = QuantumState::pure(space, amps).unwrap();
        let r = evolve_unitary(&h, &psi, 3.0, 4).unwrap();
        assert_eq!(r.diagnostics.method, Method::Krylov);
        assert!(r.diagnostics.trace_drift < 1e-9);
        let e0 = psi.expect(&h).unwrap().re;
        for s in &r.states {
            assert!((s.expect(&h).unwrap().re - e0).abs() < 1e-9 * e0.abs().max(1.0));
        }
        let dense = EigenPropagator::new(&h.to_dense()).apply(psi.amplitudes().unwrap(), 3.0);
        let got = r.states.last().unwrap().amplitudes().unwrap();
        assert!((got - dense).norm() < 1e-9);
    }

    #[test]
    fn rejects_non_hermitian() {
        let spin = SpinSpace::from_atoms(2);
        let ops = crate::spin::spin_operators(spin);
        let psi = coherent_spin_state(spin, 0.0, 0.0);
        assert!(matches!(evolve_unitary(&ops.sp, &psi, 1.0, 2), Err(Error::NotHermitian(_))));
    }
}
