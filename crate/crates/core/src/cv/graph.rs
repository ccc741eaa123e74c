use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

use super::state::CovarianceState;

/// Adjacency matrix of a weighted undirected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    a: DMatrix<f64>,
}

impl GraphSpec {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
        }
        let asym = (&a - a.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::NotSymmetric(asym));
        }
        if a.diagonal().iter().any(|d| *d != 0.0) {
            return Err(Error::param("A", "adjacency diagonal must vanish"));
        }
        Ok(GraphSpec { a })
    }

    /// Unweighted cycle on `m ≥ 3` vertices; `m = 2` gives the single edge.
    pub fn cycle(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::param("M", "a cycle needs at least two vertices"));
        }
        let mut a = DMatrix::zeros(m, m);
        for i in 0..m {
            let j = (i + 1) % m;
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        GraphSpec::new(a)
    }

    pub fn n_modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CollectiveMode {
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
    /// Squeezed quadrature `cosφ X + sinφ P` with `φ = arctan λ`.
    pub angle: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SqueezingPrescription {
    pub modes: Vec<CollectiveMode>,
}

/// Squeezes `cosφ X_v + sinφ P_v` of the collective mode `X_v = Σ v_i x_i`
/// by `e^{−r}` and its conjugate by `e^{r}`; the orthogonal complement is
/// untouched.
pub fn squeeze_collective_mode(state: &CovarianceState, v: &[f64], phi: f64, r: f64) -> Result<CovarianceState> {
    let m = state.n_modes();
    if v.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: v.len() });
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::param("v", format!("mode vector must be unit norm, got {norm}")));
    }
    state.apply_symplectic(&collective_squeezer(v, phi, r))
}

fn collective_squeezer(v: &[f64], phi: f64, r: f64) -> DMatrix<f64> {
    let m = v.len();
    let (c, s) = (phi.cos(), phi.sin());
    let (d1, d2) = ((-r).exp(), r.exp());
    // Rᵀ diag(e^{−r}, e^{r}) R with R the rotation taking (X, P) to the
    // squeezed/anti-squeezed pair
    let k = [
        [c * c * d1 + s * s * d2, c * s * (d1 - d2)],
        [c * s * (d1 - d2), s * s * d1 + c * c * d2],
    ];
    let mut out = DMatrix::identity(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let p = v[i] * v[j];
            out[(i, j)] += (k[0][0] - 1.0) * p;
            out[(i, m + j)] += k[0][1] * p;
            out[(m + i, j)] += k[1][0] * p;
            out[(m + i, m + j)] += (k[1][1] - 1.0) * p;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalOp {
    /// Phase-space rotation `x → cosθ x + sinθ p`, `p → −sinθ x + cosθ p`.
    Rotation(f64),
    /// `(x, p) → (−x, −p)`.
    PiFlip,
}

pub fn local_ops(state: &CovarianceState, sites: &[usize], op: LocalOp) -> Result<CovarianceState> {
    let m = state.n_modes();
    if let Some(&bad) = sites.iter().find(|&&i| i >= m) {
        return Err(Error::param("sites", format!("site {bad} out of range for M = {m}")));
    }
    let theta = match op {
        LocalOp::Rotation(t) => t,
        LocalOp::PiFlip => std::f64::consts::PI,
    };
    let (c, s) = (theta.cos(), theta.sin());
    let mut sym = DMatrix::identity(2 * m, 2 * m);
    for &i in sites {
        sym[(i, i)] = c;
        sym[(i, m + i)] = s;
        sym[(m + i, i)] = -s;
        sym[(m + i, m + i)] = c;
    }
    state.apply_symplectic(&sym)
}

/// Eigenmodes of the adjacency matrix with squeezing angles `arctan λ_μ`.
pub fn prescription_from_adjacency(a: &GraphSpec) -> SqueezingPrescription {
    let (vals, vecs) = linalg::symmetric_eigh(a.matrix());
    let modes = (0..vals.len())
        .rev()
        .map(|k| CollectiveMode {
            vector: vecs.column(k).iter().copied().collect(),
            eigenvalue: vals[k],
            angle: vals[k].atan(),
        })
        .collect();
    SqueezingPrescription { modes }
}

#[derive(Debug, Clone)]
pub struct GraphState {
    pub state: CovarianceState,
    pub prescription: SqueezingPrescription,
    pub nullifier_variances: Vec<f64>,
}

/// Squeezes every adjacency eigenmode with strength `r` at its prescribed
/// angle, starting from vacuum, then rotates all sites by −π/2 so that the
/// squeezed combinations become the nullifiers `p_i − Σ_j A_ij x_j`.
pub fn prepare_graph_state(a: &GraphSpec, r: f64) -> Result<GraphState> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::param("r", format!("squeezing strength must be finite and non-negative, got {r}")));
    }
    let prescription = prescription_from_adjacency(a);
    let mut state = CovarianceState::vacuum(a.n_modes())?;
    for mode in &prescription.modes {
        state = squeeze_collective_mode(&state, &mode.vector, mode.angle, r)?;
    }
    let all: Vec<usize> = (0..a.n_modes()).collect();
    state = local_ops(&state, &all, LocalOp::Rotation(-FRAC_PI_2))?;
    let nullifier_variances = nullifier_variances(&state, a)?;
    Ok(GraphState { state, prescription, nullifier_variances })
}

/// `Var(p_i − Σ_j A_ij x_j)` for every site.
pub fn nullifier_variances(state: &CovarianceState, a: &GraphSpec) -> Result<Vec<f64>> {
    let m = state.n_modes();
    if a.n_modes() != m {
        return Err(Error::DimensionMismatch { expected: m, got: a.n_modes() });
    }
    Ok((0..m)
        .map(|i| {
            let mut c = DVector::zeros(2 * m);
            for j in 0..m {
                c[j] = -a.matrix()[(i, j)];
            }
            c[m + i] = 1.0;
            state.variance(&c)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EprWitness {
    /// `Var(X_i − X_j) + Var(P_i + P_j)` minimized over a common local
    /// rotation of both sites.
    pub v_sum: f64,
    /// Rotation angle attaining `v_sum`.
    pub theta: f64,
    /// The same sum without rotation.
    pub v_sum_raw: f64,
    /// `v_sum < 2`, below the value for two vacua.
    pub entangled: bool,
}

pub fn epr_criterion(state: &CovarianceState, i: usize, j: usize) -> Result<EprWitness> {
    let m = state.n_modes();
    if i == j {
        return Err(Error::param("j", "EPR criterion needs two distinct sites"));
    }
    if i >= m || j >= m {
        return Err(Error::param("sites", format!("site out of range for M = {m}")));
    }
    // V(θ) = a + b cos2θ + c sin2θ under a common rotation θ
    let v = |theta: f64| -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        let mut xm = DVector::zeros(2 * m);
        xm[i] = c;
        xm[j] = -c;
        xm[m + i] = s;
        xm[m + j] = -s;
        let mut pp = DVector::zeros(2 * m);
        pp[i] = -s;
        pp[j] = -s;
        pp[m + i] = c;
        pp[m + j] = c;
        state.variance(&xm) + state.variance(&pp)
    };
    let (v0, v45, v90) = (v(0.0), v(std::f64::consts::FRAC_PI_4), v(FRAC_PI_2));
    let a = 0.5 * (v0 + v90);
    let b = 0.5 * (v0 - v90);
    let c = v45 - a;
    let v_sum = a - b.hypot(c);
    let theta = 0.5 * (-c).atan2(-b);
    Ok(EprWitness { v_sum, theta, v_sum_raw: v0, entangled: v_sum < 2.0 })
}

/// Von Neumann entropy (nats) of the reduced state on `subset`; the global
/// state must be pure.
pub fn entanglement_entropy(state: &CovarianceState, subset: &[usize]) -> Result<f64> {
    if let Some(nu) = state.symplectic_eigenvalues().iter().find(|nu| (*nu - 0.5).abs() > 1e-6) {
        return Err(Error::InvalidState(format!("global state is mixed (symplectic eigenvalue {nu})")));
    }
    let red = state.reduced(subset)?;
    Ok(red.symplectic_eigenvalues().iter().map(|&nu| entropy_term(nu)).sum())
}

pub(crate) fn entropy_term(nu: f64) -> f64 {
    let (a, b) = (nu + 0.5, nu - 0.5);
    let xlx = |x: f64| if x <= 1e-14 { 0.0 } else { x * x.ln() };
    xlx(a) - xlx(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn epr() -> GraphSpec {
        GraphSpec::cycle(2).unwrap()
    }

    #[test]
    fn single_mode_squeeze() {
        let v = CovarianceState::vacuum(1).unwrap();
        let s = squeeze_collective_mode(&v, &[1.0], 0.0, 0.7).unwrap();
        assert!((s.var_x(0) - 0.5 * (-1.4f64).exp()).abs() < 1e-14);
        let twice = squeeze_collective_mode(&squeeze_collective_mode(&v, &[1.0], 0.3, 0.2).unwrap(), &[1.0], 0.3, 0.5)
            .unwrap();
        let once = squeeze_collective_mode(&v, &[1.0], 0.3, 0.7).unwrap();
        assert!((twice.sigma() - once.sigma()).amax() < 1e-13);
        assert!(squeeze_collective_mode(&v, &[0.9], 0.0, 0.1).is_err());
    }

    #[test]
    fn local_rotations() {
        let v = CovarianceState::vacuum(2).unwrap();
        let s = squeeze_collective_mode(&v, &[1.0, 0.0], 0.0, 0.5).unwrap();
        let full = local_ops(&s, &[0], LocalOp::Rotation(2.0 * std::f64::consts::PI)).unwrap();
        assert!((full.sigma() - s.sigma()).amax() < 1e-14);
        let quarter = local_ops(&s, &[0], LocalOp::Rotation(FRAC_PI_2)).unwrap();
        assert!((quarter.var_x(0) - s.var_p(0)).abs() < 1e-14);
        assert!((quarter.var_p(0) - s.var_x(0)).abs() < 1e-14);
    }

    #[test]
    fn pi_flip_swaps_epr_quadratures() {
        let g = prepare_graph_state(&epr(), 0.8).unwrap().state;
        let flipped = local_ops(&g, &[1], LocalOp::PiFlip).unwrap();
        let var = |s: &CovarianceState, c: [f64; 4]| s.variance(&DVector::from_row_slice(&c));
        assert!((var(&g, [1.0, -1.0, 0.0, 0.0]) - var(&flipped, [1.0, 1.0, 0.0, 0.0])).abs() < 1e-13);
        assert!((var(&g, [1.0, 1.0, 0.0, 0.0]) - var(&flipped, [1.0, -1.0, 0.0, 0.0])).abs() < 1e-13);
    }

    #[test]
    fn epr_prescription_angles() {
        let p = prescription_from_adjacency(&epr());
        assert_eq!(p.modes[0].angle, FRAC_PI_4);
        assert_eq!(p.modes[1].angle, -FRAC_PI_4);
        let s = 0.5f64.sqrt();
        assert!((p.modes[0].vector[0].abs() - s).abs() < 1e-15);
        assert!((p.modes[0].vector[0] - p.modes[0].vector[1]).abs() < 1e-15);
        assert!((p.modes[1].vector[0] + p.modes[1].vector[1]).abs() < 1e-15);
    }

    #[test]
    fn square_graph_angles() {
        let p = prescription_from_adjacency(&GraphSpec::cycle(4).unwrap());
        let angles: Vec<f64> = p.modes.iter().map(|m| m.angle).collect();
        let want = [2f64.atan(), 0.0, 0.0, -2f64.atan()];
        for (a, w) in angles.iter().zip(want) {
            assert!((a - w).abs() < 1e-12);
        }
    }

    #[test]
    fn epr_witness_closed_form() {
        for r in [0.0, 0.3, 1.0, 2.0] {
            let g = prepare_graph_state(&epr(), r).unwrap();
            let w = epr_criterion(&g.state, 0, 1).unwrap();
            assert!((w.v_sum - 2.0 * (-2.0 * r).exp()).abs() < 1e-10, "{r}: {}", w.v_sum);
            assert_eq!(w.entangled, r > 0.0);
        }
        let vac = CovarianceState::vacuum(2).unwrap();
        let w = epr_criterion(&vac, 0, 1).unwrap();
        assert!((w.v_sum - 2.0).abs() < 1e-14 && !w.entangled);
    }

    #[test]
    fn nullifiers_match_mode_sum() {
        let a = GraphSpec::cycle(4).unwrap();
        let r = 0.6;
        let g = prepare_graph_state(&a, r).unwrap();
        for i in 0..4 {
            // independent squeezed modes: Σ_μ v_μi² (1 + λ_μ²) e^{−2r}/2
            let want: f64 = g
                .prescription
                .modes
                .iter()
                .map(|m| m.vector[i].powi(2) * (1.0 + m.eigenvalue.powi(2)) * (-2.0 * r).exp() / 2.0)
                .sum();
            assert!((g.nullifier_variances[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn epr_entropy_closed_form() {
        let r = 1.0;
        let g = prepare_graph_state(&epr(), r).unwrap();
        let c = (2.0 * r).cosh() / 2.0;
        let want = (c + 0.5) * (c + 0.5).ln() - (c - 0.5) * (c - 0.5).ln();
        let got = entanglement_entropy(&g.state, &[0]).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        assert!(entanglement_entropy(&CovarianceState::vacuum(3).unwrap(), &[0, 2]).unwrap().abs() < 1e-12);
    }
}
