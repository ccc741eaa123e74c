use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, re, CMatrix, Csr, C64, I};
use crate::spin::{
    coherent_spin_state, ellipse_from_moments, spin_moments_with, OperatorMatrix, QuantumState, SpinMoments,
    SpinOperators, SpinSpace,
};

use super::{check_times, snapshot_times, Diagnostics, EvolutionResult, Method};

/// Collapse operator `L` with rate `γ`; enters the master equation as `√γ L`.
#[derive(Debug, Clone)]
pub struct Collapse {
    pub op: OperatorMatrix,
    pub rate: f64,
}

impl Collapse {
    pub fn new(op: OperatorMatrix, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::param("rate", format!("must be finite and non-negative, got {rate}")));
        }
        Ok(Collapse { op, rate })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LindbladOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Consecutive rejected steps tolerated before giving up.
    pub max_halvings: usize,
    /// Keep full density matrices; defaults to `dim ≤ 128`.
    pub store_states: Option<bool>,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        LindbladOptions { rtol: 1e-8, atol: 1e-10, max_halvings: 50, store_states: None }
    }
}

/// Right-hand side of the master equation, with a fast path when every
/// operator is diagonal.
enum Generator {
    Diagonal(CMatrix),
    Sparse { h_eff: Csr, h_eff_adj: Csr, jumps: Vec<(Csr, Csr)> },
}

impl Generator {
    fn new(h: &OperatorMatrix, collapse: &[Collapse]) -> Self {
        let n = h.dim();
        if h.is_diagonal() && collapse.iter().all(|c| c.op.is_diagonal()) {
            let hd: Vec<C64> = h.diagonal();
            let ls: Vec<Vec<C64>> = collapse
                .iter()
                .map(|c| c.op.diagonal().iter().map(|v| v * c.rate.sqrt()).collect())
                .collect();
            let g = CMatrix::from_fn(n, n, |i, j| {
                let mut acc = -I * (hd[i] - hd[j].conj());
                for l in &ls {
                    acc += l[i] * l[j].conj() - 0.5 * (l[i].norm_sqr() + l[j].norm_sqr());
                }
                acc
            });
            return Generator::Diagonal(g);
        }
        let mut h_eff = h.matrix().clone();
        let mut jumps = Vec::new();
        for c in collapse {
            let l = linalg::scale(c.op.matrix(), re(c.rate.sqrt()));
            let ld = linalg::adjoint(&l);
            h_eff = &h_eff - &linalg::scale(&(&ld * &l), C64::new(0.0, 0.5));
            jumps.push((l, ld));
        }
        let h_eff_adj = linalg::adjoint(&h_eff);
        Generator::Sparse { h_eff, h_eff_adj, jumps }
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        match self {
            Generator::Diagonal(g) => g.component_mul(rho),
            Generator::Sparse { h_eff, h_eff_adj, jumps } => {
                let mut d = (linalg::spmm(h_eff, rho) - linalg::mmsp(rho, h_eff_adj)) * (-I);
                for (l, ld) in jumps {
                    d += linalg::mmsp(&linalg::spmm(l, rho), ld);
                }
                d
            }
        }
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper<'a> {
    gen: &'a Generator,
    opts: LindbladOptions,
    h: f64,
    k_first: Option<CMatrix>,
}

impl Stepper<'_> {
    /// Advances `rho` from `t0` to `t1` adaptively.
    fn advance(&mut self, rho: &mut CMatrix, t0: f64, t1: f64, diag: &mut Diagnostics) -> Result<()> {
        let mut t = t0;
        let mut rejects = 0;
        while t < t1 {
            let h = self.h.min(t1 - t);
            let k1 = self.k_first.take().unwrap_or_else(|| self.gen.apply(rho));
            let mut ks: Vec<CMatrix> = vec![k1];
            for s in 1..7 {
                let mut y = rho.clone();
                for (r, k) in ks.iter().enumerate() {
                    if A[s][r] != 0.0 {
                        y += k * re(h * A[s][r]);
                    }
                }
                ks.push(self.gen.apply(&y));
            }
            let mut y5 = rho.clone();
            let mut err = CMatrix::zeros(rho.nrows(), rho.ncols());
            for (s, k) in ks.iter().enumerate() {
                if B5[s] != 0.0 {
                    y5 += k * re(h * B5[s]);
                }
                if B5[s] != B4[s] {
                    err += k * re(h * (B5[s] - B4[s]));
                }
            }
            let mut acc = 0.0;
            for (e, (a, b)) in err.iter().zip(rho.iter().zip(y5.iter())) {
                let sc = self.opts.atol + self.opts.rtol * a.norm().max(b.norm());
                acc += (e.norm() / sc).powi(2);
            }
            let en = (acc / err.len() as f64).sqrt();
            if en <= 1.0 {
                t += h;
                // re-Hermitize to remove round-off asymmetry
                *rho = (&y5 + y5.adjoint()) * re(0.5);
                self.k_first = None;
                diag.steps += 1;
                diag.max_error = diag.max_error.max(en);
                rejects = 0;
                let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                if h == self.h || fac < 1.0 {
                    self.h *= fac;
                }
            } else {
                diag.rejected += 1;
                rejects += 1;
                if rejects > self.opts.max_halvings {
                    return Err(Error::IntegratorFailure(format!(
                        "step size collapsed at t = {t:.6e} (error norm {en:.3e})"
                    )));
                }
                let fac = if en.is_finite() { (0.9 * en.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
                self.h *= fac;
                self.k_first = Some(ks.swap_remove(0));
            }
        }
        Ok(())
    }
}

/// Master-equation evolution at `n_snapshots` evenly spaced times in `[0, t]`.
pub fn evolve_lindblad(
    h: &OperatorMatrix,
    collapse: &[Collapse],
    rho: &QuantumState,
    t: f64,
    n_snapshots: usize,
) -> Result<EvolutionResult> {
    if !(t >= 0.0) {
        return Err(Error::param("t", "must be non-negative"));
    }
    evolve_lindblad_at(h, collapse, rho, &snapshot_times(t, n_snapshots), LindbladOptions::default())
}

/// `dρ/dt = −i[H,ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`, integrated by an
/// embedded Dormand–Prince 5(4) scheme.
pub fn evolve_lindblad_at(
    h: &OperatorMatrix,
    collapse: &[Collapse],
    rho0: &QuantumState,
    times: &[f64],
    opts: LindbladOptions,
) -> Result<EvolutionResult> {
    h.require_hermitian()?;
    check_times(times)?;
    let dim = rho0.dim();
    if h.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: h.dim() });
    }
    for c in collapse {
        if c.op.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: c.op.dim() });
        }
    }
    let store = opts.store_states.unwrap_or(dim <= 128);
    let spin_ops = SpinOperators::on(rho0.space()).ok();
    let gen = Generator::new(h, collapse);
    let span = times.last().copied().unwrap_or(0.0);
    let scale = match &gen {
        Generator::Diagonal(g) => g.iter().map(|v| v.norm()).fold(0.0, f64::max),
        Generator::Sparse { h_eff, .. } => linalg::max_abs(h_eff) * (dim as f64).sqrt(),
    };
    let h0 = if scale > 0.0 { (0.01 / scale).min(span.max(1e-12)) } else { span.max(1e-12) };
    let mut stepper = Stepper { gen: &gen, opts, h: h0, k_first: None };
    let mut diag = Diagnostics::new(Method::RungeKutta45);
    let mut rho = rho0.density();
    let mut prev = 0.0;
    let mut states = Vec::new();
    let mut spin_moments = Vec::new();
    for &t in times {
        if t > prev {
            stepper.advance(&mut rho, prev, t, &mut diag)?;
        }
        prev = t;
        diag.trace_drift = diag.trace_drift.max((rho.trace().re - 1.0).abs());
        let st = QuantumState::mixed_unchecked(rho0.space().clone(), rho.clone());
        if let Some(ops) = &spin_ops {
            spin_moments.push(spin_moments_with(&st, ops)?);
        }
        if store {
            states.push(st);
        }
    }
    Ok(EvolutionResult { times: times.to_vec(), states, spin_moments, diagnostics: diag })
}

/// Squeezing diagnostics of one-axis twisting with cavity dephasing.
#[derive(Debug, Clone, Serialize)]
pub struct DissipativeOat {
    pub n_atoms: u32,
    pub chi: f64,
    pub d: f64,
    /// Dephasing rate `γ = (χ/N)·(2/d)`.
    pub gamma: f64,
    pub times: Vec<f64>,
    /// Twisting strength `Q = χt`.
    pub q: Vec<f64>,
    pub v_min: Vec<f64>,
    pub v_max: Vec<f64>,
    pub xi2: Vec<f64>,
    pub mean_length: Vec<f64>,
    pub diagnostics: Diagnostics,
}

/// One-axis twisting `H = (χ/N)S_z²` with dephasing `L = √γ S_z`,
/// `γ = (χ/N)(2/d)`, starting from the coherent state along `+x`.
/// `d = ±∞` turns off the dephasing.
pub fn dissipative_oat(chi: f64, d: f64, spin: SpinSpace, times: &[f64]) -> Result<DissipativeOat> {
    if d == 0.0 || d.is_nan() {
        return Err(Error::param("d", "resonant drive (d = 0) is a pure measurement channel"));
    }
    if !chi.is_finite() {
        return Err(Error::param("chi", "must be finite"));
    }
    let n = spin.n_atoms();
    let h = crate::hamiltonians::h_oat(chi, spin)?;
    let gamma = chi / n as f64 * 2.0 / d;
    if gamma < 0.0 {
        return Err(Error::param("d", "dephasing rate χ·2/(N·d) must be non-negative; take d with the sign of χ"));
    }
    let ops = SpinOperators::on(h.space())?;
    let collapse = if gamma > 0.0 { vec![Collapse::new(ops.sz.clone(), gamma)?] } else { vec![] };
    let psi = coherent_spin_state(spin, std::f64::consts::FRAC_PI_2, 0.0);
    let rho = psi.to_mixed();
    let opts = LindbladOptions { store_states: Some(false), ..LindbladOptions::default() };
    let run = evolve_lindblad_at(&h, &collapse, &rho, times, opts)?;
    let mut out = DissipativeOat {
        n_atoms: n,
        chi,
        d,
        gamma,
        times: times.to_vec(),
        q: times.iter().map(|t| chi * t).collect(),
        v_min: vec![],
        v_max: vec![],
        xi2: vec![],
        mean_length: vec![],
        diagnostics: run.diagnostics,
    };
    for m in &run.spin_moments {
        let (vmin, vmax, len) = ellipse_extremes(m)?;
        out.v_min.push(vmin);
        out.v_max.push(vmax);
        out.xi2.push(n as f64 * vmin / (len * len));
        out.mean_length.push(len);
    }
    Ok(out)
}

pub(crate) fn ellipse_extremes(m: &SpinMoments) -> Result<(f64, f64, f64)> {
    let e = ellipse_from_moments(m, 64)?;
    Ok((e.v_min, e.v_max, m.length()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_unitary_at;
    use crate::hamiltonians::{h_oat, h_tavis_cummings};
    use crate::spin::{spin_operators, CompositeSpace};

    #[test]
    fn matches_unitary_without_collapse() {
        let spin = SpinSpace::new(1.0).unwrap();
        let h = h_tavis_cummings(0.7, 0.3, spin, 3).unwrap();
        let space = h.space().clone();
        let psi = QuantumState::basis(space.clone(), space.flatten(&[0, 1])).unwrap();
        let t = [0.0, 0.7, 2.5];
        let a = evolve_lindblad_at(&h, &[], &psi.to_mixed(), &t, LindbladOptions::default()).unwrap();
        let b = evolve_unitary_at(&h, &psi, &t).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!((x.fidelity(y).unwrap() - 1.0).abs() < 1e-7);
        }
        assert!(a.diagnostics.trace_drift < 1e-7);
    }

    #[test]
    fn qubit_dephasing_closed_form() {
        let spin = SpinSpace::from_atoms(1);
        let ops = spin_operators(spin);
        let space = CompositeSpace::spin(spin);
        let h = OperatorMatrix::zero(space);
        let gamma = 0.8;
        let psi = coherent_spin_state(spin, std::f64::consts::FRAC_PI_2, 0.0);
        let times: Vec<f64> = (0..6).map(|k| 0.5 * k as f64).collect();
        let r = evolve_lindblad_at(
            &h,
            &[Collapse::new(ops.sz.clone(), gamma).unwrap()],
            &psi.to_mixed(),
            &times,
            LindbladOptions::default(),
        )
        .unwrap();
        for (t, s) in times.iter().zip(&r.states) {
            let sp = s.expect(&ops.sp).unwrap();
            // ⟨S₊⟩(0) = ½ for the +x state
            assert!((sp.norm() - 0.5 * (-gamma * t / 2.0).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn diagonal_dephasing_matches_exact_solution_and_purity_decreases() {
        let spin = SpinSpace::from_atoms(12);
        let (chi, gamma) = (1.0, 0.05);
        let h = h_oat(chi, spin).unwrap();
        let ops = spin_operators(spin);
        let psi = coherent_spin_state(spin, 1.2, 0.4);
        let times = [0.0, 0.3, 0.9, 1.7];
        let r = evolve_lindblad_at(
            &h,
            &[Collapse::new(ops.sz.clone(), gamma).unwrap()],
            &psi.to_mixed(),
            &times,
            LindbladOptions::default(),
        )
        .unwrap();
        let rho0 = psi.density();
        let mut last_purity = 1.0 + 1e-12;
        for (t, s) in times.iter().zip(&r.states) {
            let rho = s.density();
            for i in 0..spin.dim() {
                for j in 0..spin.dim() {
                    let (mi, mj) = (spin.m(i), spin.m(j));
                    let phase = -chi / 12.0 * (mi * mi - mj * mj) * t;
                    let decay = (-0.5 * gamma * (mi - mj).powi(2) * t).exp();
                    let want = rho0[(i, j)] * C64::from_polar(decay, phase);
                    assert!((rho[(i, j)] - want).norm() < 1e-8);
                }
            }
            let p = s.purity();
            assert!(p <= last_purity);
            last_purity = p;
        }
    }

    #[test]
    fn dissipative_oat_limits() {
        let spin = SpinSpace::from_atoms(20);
        let times = [0.0, 0.2, 0.5];
        let free = dissipative_oat(1.0, f64::INFINITY, spin, &times).unwrap();
        assert_eq!(free.gamma, 0.0);
        let h = h_oat(1.0, spin).unwrap();
        let psi = coherent_spin_state(spin, std::f64::consts::FRAC_PI_2, 0.0);
        let u = evolve_unitary_at(&h, &psi, &times).unwrap();
        for (k, m) in u.spin_moments.iter().enumerate() {
            let (vmin, vmax, _) = ellipse_extremes(m).unwrap();
            assert!((free.v_min[k] - vmin).abs() < 1e-6);
            assert!((free.v_max[k] - vmax).abs() < 1e-6);
        }
        assert!(dissipative_oat(1.0, 0.0, spin, &times).is_err());
    }
}
