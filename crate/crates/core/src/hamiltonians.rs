//! Hamiltonian constructors. Units: ħ = 1, all couplings are angular frequencies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, re, Csr, C64};
use crate::spin::{
    annihilation, number, CompositeSpace, Factor, FockSpace, LocalSpin, OperatorMatrix,
    QuantumState, SpinSpace,
};
use crate::tol;

fn finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite, got {x}")))
    }
}

/// Spin ⊗ Fock ladder operators lifted to the joint space.
struct SpinCavity {
    space: CompositeSpace,
    sp: Csr,
    sm: Csr,
    sz: Csr,
    a: Csr,
    ad: Csr,
    n: Csr,
}

impl SpinCavity {
    fn new(spin: SpinSpace, n_max: usize) -> Result<Self> {
        let fock = FockSpace::new(n_max)?;
        let space = CompositeSpace::spin_fock(spin, fock);
        let l = LocalSpin::new(spin);
        let a = space.embed(1, &annihilation(fock));
        Ok(SpinCavity {
            sp: space.embed(0, &l.sp),
            sm: space.embed(0, &l.sm),
            sz: space.embed(0, &l.sz),
            ad: linalg::adjoint(&a),
            n: space.embed(1, &number(fock)),
            a,
            space,
        })
    }
}

/// `g(a†s⁻ + a s⁺) + Δ s^z` on spin-½ ⊗ Fock(n_max).
pub fn h_jaynes_cummings(g: f64, delta: f64, n_max: usize) -> Result<OperatorMatrix> {
    h_tavis_cummings(g, delta, SpinSpace::from_atoms(1), n_max)
}

/// `g(a†S₋ + a S₊) + Δ S_z` on spin-S ⊗ Fock(n_max).
pub fn h_tavis_cummings(g: f64, delta: f64, spin: SpinSpace, n_max: usize) -> Result<OperatorMatrix> {
    finite("g", g)?;
    finite("delta", delta)?;
    let o = SpinCavity::new(spin, n_max)?;
    let hop = &(&o.ad * &o.sm) + &(&o.a * &o.sp);
    let h = &linalg::scale(&hop, re(g)) + &linalg::scale(&o.sz, re(delta));
    Ok(OperatorMatrix::new(o.space, h)?)
}

/// Total excitation number `a†a + S_z + S` on spin ⊗ Fock.
pub fn excitation_number(spin: SpinSpace, n_max: usize) -> Result<OperatorMatrix> {
    let o = SpinCavity::new(spin, n_max)?;
    let shift = linalg::scale(&linalg::csr_identity(o.space.dim()), re(spin.s()));
    let m = &(&o.n + &o.sz) + &shift;
    OperatorMatrix::new(o.space, m)
}

/// Emitter for the dispersive coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Emitter {
    /// One two-level atom; couples through the Pauli operator `σ^z = 2s^z`.
    Single,
    /// Collective spin; couples through `S_z`.
    Collective(SpinSpace),
}

/// `Ω₁ a†a σ^z` (single atom) or `Ω₁ a†a S_z` (collective).
pub fn h_dispersive(omega1: f64, n_max: usize, emitter: Emitter) -> Result<OperatorMatrix> {
    finite("omega1", omega1)?;
    let (spin, factor) = match emitter {
        Emitter::Single => (SpinSpace::from_atoms(1), 2.0),
        Emitter::Collective(s) => (s, 1.0),
    };
    let o = SpinCavity::new(spin, n_max)?;
    let h = linalg::scale(&(&o.n * &o.sz), re(omega1 * factor));
    OperatorMatrix::new(o.space, h)
}

/// One-axis twisting `χ S_z² / N`.
pub fn h_oat(chi: f64, spin: SpinSpace) -> Result<OperatorMatrix> {
    finite("chi", chi)?;
    let n = spin.n_atoms();
    if n == 0 {
        return Err(Error::param("S", "one-axis twisting needs S ≥ 1/2"));
    }
    let diag: Vec<C64> = (0..spin.dim())
        .map(|i| re(chi * spin.m(i).powi(2) / n as f64))
        .collect();
    OperatorMatrix::new(CompositeSpace::spin(spin), linalg::csr_diag(&diag))
}

#[derive(Debug, Clone)]
pub struct DrivenIsing {
    /// `field·S_z + J·S_z²`.
    pub h_eff: OperatorMatrix,
    pub j: f64,
    /// Linear Stark-shift coefficient `n₀Ω₁`, removable by spin echo.
    pub field: f64,
}

/// Ising coupling from a drive detuned by `δ` from a cavity of linewidth `κ`:
/// `J = (4n₀Ω₁²/κ)·d/(1+d²)` with `d = 2δ/κ`.
pub fn ising_coupling(n0: f64, omega1: f64, kappa: f64, delta: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::param("kappa", format!("must be positive, got {kappa}")));
    }
    finite("n0", n0)?;
    finite("omega1", omega1)?;
    finite("delta", delta)?;
    let d = 2.0 * delta / kappa;
    Ok(4.0 * n0 * omega1 * omega1 / kappa * d / (1.0 + d * d))
}

pub fn h_driven_ising(n0: f64, omega1: f64, kappa: f64, delta: f64, spin: SpinSpace) -> Result<DrivenIsing> {
    let j = ising_coupling(n0, omega1, kappa, delta)?;
    let field = n0 * omega1;
    let diag: Vec<C64> = (0..spin.dim())
        .map(|i| {
            let m = spin.m(i);
            re(field * m + j * m * m)
        })
        .collect();
    let h_eff = OperatorMatrix::new(CompositeSpace::spin(spin), linalg::csr_diag(&diag))?;
    Ok(DrivenIsing { h_eff, j, field })
}

/// Raman spin exchange `(χ₋S₊S₋ + χ₊S₋S₊)/N`.
pub fn h_xy_raman(chi_plus: f64, chi_minus: f64, spin: SpinSpace) -> Result<OperatorMatrix> {
    finite("chi_plus", chi_plus)?;
    finite("chi_minus", chi_minus)?;
    let n = spin.n_atoms();
    if n == 0 {
        return Err(Error::param("S", "spin exchange needs S ≥ 1/2"));
    }
    let l = LocalSpin::new(spin);
    let h = &linalg::scale(&(&l.sp * &l.sm), re(chi_minus / n as f64))
        + &linalg::scale(&(&l.sm * &l.sp), re(chi_plus / n as f64));
    OperatorMatrix::new(CompositeSpace::spin(spin), h)
}

/// Collective XXZ model `J_xy(S_x² + S_y²) + J_z S_z²`.
pub fn h_xxz(j_xy: f64, j_z: f64, spin: SpinSpace) -> Result<OperatorMatrix> {
    finite("j_xy", j_xy)?;
    finite("j_z", j_z)?;
    let l = LocalSpin::new(spin);
    let h = &linalg::scale(&(&(&l.sx * &l.sx) + &(&l.sy * &l.sy)), re(j_xy))
        + &linalg::scale(&(&l.sz * &l.sz), re(j_z));
    OperatorMatrix::new(CompositeSpace::spin(spin), h)
}

/// Tensor-product space of `n_sites` spins of length `site`, capped at
/// [`tol::PER_SITE_MAX_DIM`].
pub fn site_space(site: SpinSpace, n_sites: usize) -> Result<CompositeSpace> {
    if n_sites == 0 {
        return Err(Error::param("n_sites", "need at least one site"));
    }
    let mut dim: usize = 1;
    for _ in 0..n_sites {
        dim = dim.saturating_mul(site.dim());
        if dim > tol::PER_SITE_MAX_DIM {
            return Err(Error::DimensionOverflow(dim, tol::PER_SITE_MAX_DIM));
        }
    }
    Ok(CompositeSpace::new(vec![Factor::Spin(site); n_sites]))
}

/// Per-site spin operators on a tensor-product space.
pub struct SiteOperators {
    pub space: CompositeSpace,
    pub sp: Vec<Csr>,
    pub sm: Vec<Csr>,
    pub sz: Vec<Csr>,
}

impl SiteOperators {
    pub fn new(site: SpinSpace, n_sites: usize) -> Result<Self> {
        let space = site_space(site, n_sites)?;
        let l = LocalSpin::new(site);
        let lift = |m: &Csr| (0..n_sites).map(|k| space.embed(k, m)).collect::<Vec<_>>();
        Ok(SiteOperators {
            sp: lift(&l.sp),
            sm: lift(&l.sm),
            sz: lift(&l.sz),
            space,
        })
    }

    /// `Σ_j w_j op_j`.
    pub fn weighted(&self, ops: &[Csr], w: &[f64]) -> Csr {
        let n = self.space.dim();
        let entries = ops
            .iter()
            .zip(w)
            .flat_map(|(o, &wj)| o.triplet_iter().map(move |(i, j, v)| (i, j, v * wj)))
            .collect();
        Csr::from_triplets(n, n, entries)
    }
}

/// Weighted XXZ model `J_xy(ℱ₊ℱ₋ + ℱ₋ℱ₊) + J_z ℱ_z²` with `ℱ = Σ_j c_j f⃗_j`.
///
/// With `c_j = 1` this equals `h_xxz(2·J_xy, J_z)` on the total spin.
pub fn h_xxz_weighted(j_xy: f64, j_z: f64, weights: &[f64], site: SpinSpace) -> Result<OperatorMatrix> {
    finite("j_xy", j_xy)?;
    finite("j_z", j_z)?;
    for &w in weights {
        finite("weights", w)?;
    }
    let o = SiteOperators::new(site, weights.len())?;
    let fp = o.weighted(&o.sp, weights);
    let fm = o.weighted(&o.sm, weights);
    let fz = o.weighted(&o.sz, weights);
    let h = &linalg::scale(&(&(&fp * &fm) + &(&fm * &fp)), re(j_xy)) + &linalg::scale(&(&fz * &fz), re(j_z));
    OperatorMatrix::new(o.space, h)
}

/// Global spin exchange in an inhomogeneous field,
/// `(J_xy/2) Σ_ij (s⁺_i s⁻_j + h.c.) + Σ_j h_j s^z_j`.
pub fn h_xy_inhomogeneous(j_xy: f64, fields: &[f64], site: SpinSpace) -> Result<OperatorMatrix> {
    finite("j_xy", j_xy)?;
    for &h in fields {
        finite("fields", h)?;
    }
    let o = SiteOperators::new(site, fields.len())?;
    let ones = vec![1.0; fields.len()];
    let fp = o.weighted(&o.sp, &ones);
    let fm = o.weighted(&o.sm, &ones);
    let xy = linalg::scale(&(&(&fp * &fm) + &(&fm * &fp)), re(0.5 * j_xy));
    let h = &xy + &o.weighted(&o.sz, fields);
    OperatorMatrix::new(o.space, h)
}

/// Dicke model `ω₀S_z + ω_c a†a + 𝒢(a† + a)(S₊ + S₋)`.
pub fn h_dicke(omega0: f64, omega_c: f64, coupling: f64, spin: SpinSpace, n_max: usize) -> Result<OperatorMatrix> {
    finite("omega0", omega0)?;
    finite("omega_c", omega_c)?;
    finite("coupling", coupling)?;
    let o = SpinCavity::new(spin, n_max)?;
    let x = &o.a + &o.ad;
    let sx2 = &o.sp + &o.sm;
    let h = &(&linalg::scale(&o.sz, re(omega0)) + &linalg::scale(&o.n, re(omega_c)))
        + &linalg::scale(&(&x * &sx2), re(coupling));
    OperatorMatrix::new(o.space, h)
}

/// ℤ₂ parity `exp(iπ(a†a + S_z + S))` on spin ⊗ Fock.
pub fn dicke_parity(spin: SpinSpace, n_max: usize) -> Result<OperatorMatrix> {
    let fock = FockSpace::new(n_max)?;
    let space = CompositeSpace::spin_fock(spin, fock);
    let diag: Vec<C64> = (0..space.dim())
        .map(|idx| {
            let mi = space.unflatten(idx);
            // S + m = number of up spins = dim − 1 − i
            let k = spin.dim() - 1 - mi[0] + mi[1];
            re(if k % 2 == 0 { 1.0 } else { -1.0 })
        })
        .collect();
    OperatorMatrix::new(space, linalg::csr_diag(&diag))
}

/// Faraday coupling `Ω₁(a₊†a₊ − a₋†a₋)S_z` on spin ⊗ Fock(σ₊) ⊗ Fock(σ₋).
pub fn h_faraday(omega1: f64, spin: SpinSpace, n_max: usize) -> Result<OperatorMatrix> {
    finite("omega1", omega1)?;
    let fock = FockSpace::new(n_max)?;
    let space = CompositeSpace::new(vec![Factor::Spin(spin), Factor::Fock(fock), Factor::Fock(fock)]);
    let diag: Vec<C64> = (0..space.dim())
        .map(|idx| {
            let mi = space.unflatten(idx);
            re(omega1 * (mi[1] as f64 - mi[2] as f64) * spin.m(mi[0]))
        })
        .collect();
    OperatorMatrix::new(space, linalg::csr_diag(&diag))
}

/// Population in the highest Fock level of factor `k`.
pub fn fock_tail_population(state: &QuantumState, k: usize) -> Result<f64> {
    let space = state.space();
    let top = match space.factors().get(k) {
        Some(Factor::Fock(f)) => f.n_max(),
        _ => return Err(Error::param("k", "factor is not a Fock mode")),
    };
    Ok(state
        .populations()
        .iter()
        .enumerate()
        .filter(|(idx, _)| space.unflatten(*idx)[k] == top)
        .map(|(_, p)| p)
        .sum())
}

/// Serializable description of any supported Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HamiltonianSpec {
    JaynesCummings { g: f64, delta: f64, n_max: usize },
    TavisCummings { g: f64, delta: f64, s: f64, n_max: usize },
    Dispersive { omega1: f64, n_max: usize },
    DispersiveCollective { omega1: f64, s: f64, n_max: usize },
    Oat { chi: f64, s: f64 },
    DrivenIsing { n0: f64, omega1: f64, kappa: f64, delta: f64, s: f64 },
    XyRaman { chi_plus: f64, chi_minus: f64, s: f64 },
    Xxz { j_xy: f64, j_z: f64, s: f64 },
    WeightedXxz { j_xy: f64, j_z: f64, weights: Vec<f64>, f: f64 },
    InhomXy { j_xy: f64, fields: Vec<f64>, f: f64 },
    Dicke { omega0: f64, omega_c: f64, coupling: f64, s: f64, n_max: usize },
    Faraday { omega1: f64, s: f64, n_max: usize },
}

impl HamiltonianSpec {
    pub fn build(&self) -> Result<OperatorMatrix> {
        use HamiltonianSpec::*;
        let sp = SpinSpace::new;
        match self {
            JaynesCummings { g, delta, n_max } => h_jaynes_cummings(*g, *delta, *n_max),
            TavisCummings { g, delta, s, n_max } => h_tavis_cummings(*g, *delta, sp(*s)?, *n_max),
            Dispersive { omega1, n_max } => h_dispersive(*omega1, *n_max, Emitter::Single),
            DispersiveCollective { omega1, s, n_max } => {
                h_dispersive(*omega1, *n_max, Emitter::Collective(sp(*s)?))
            }
            Oat { chi, s } => h_oat(*chi, sp(*s)?),
            DrivenIsing { n0, omega1, kappa, delta, s } => {
                Ok(h_driven_ising(*n0, *omega1, *kappa, *delta, sp(*s)?)?.h_eff)
            }
            XyRaman { chi_plus, chi_minus, s } => h_xy_raman(*chi_plus, *chi_minus, sp(*s)?),
            Xxz { j_xy, j_z, s } => h_xxz(*j_xy, *j_z, sp(*s)?),
            WeightedXxz { j_xy, j_z, weights, f } => h_xxz_weighted(*j_xy, *j_z, weights, sp(*f)?),
            InhomXy { j_xy, fields, f } => h_xy_inhomogeneous(*j_xy, fields, sp(*f)?),
            Dicke { omega0, omega_c, coupling, s, n_max } => {
                h_dicke(*omega0, *omega_c, *coupling, sp(*s)?, *n_max)
            }
            Faraday { omega1, s, n_max } => h_faraday(*omega1, sp(*s)?, *n_max),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigh;
    use crate::spin::spin_operators;

    fn spectrum(h: &OperatorMatrix) -> Vec<f64> {
        hermitian_eigh(&h.to_dense()).0.iter().copied().collect()
    }

    #[test]
    fn jc_coupling_element_is_g_sqrt_n_plus_one() {
        let g = 0.7;
        let h = h_jaynes_cummings(g, 0.0, 6).unwrap();
        let sp = h.space().clone();
        for n in 0..6 {
            // |e,n⟩ is spin index 0, |g,n+1⟩ is spin index 1
            let e = sp.flatten(&[0, n]);
            let gd = sp.flatten(&[1, n + 1]);
            let v = h.matrix().get(gd, e);
            assert!((v.re - g * ((n + 1) as f64).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn tc_reduces_to_jc_for_one_atom() {
        let a = h_jaynes_cummings(1.1, 0.3, 5).unwrap();
        let b = h_tavis_cummings(1.1, 0.3, SpinSpace::from_atoms(1), 5).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn tc_conserves_excitations_and_splits_by_g_sqrt_n() {
        let spin = SpinSpace::new(5.0).unwrap();
        let h = h_tavis_cummings(0.5, 0.0, spin, 4).unwrap();
        let nexc = excitation_number(spin, 4).unwrap();
        assert!(h.commutator(&nexc).max_abs() < 1e-12);
        assert!(h.is_hermitian());
        // single-excitation sector: |S,−S+1;0⟩ and |S,−S;1⟩
        let sp = h.space().clone();
        let a = sp.flatten(&[spin.dim() - 2, 0]);
        let b = sp.flatten(&[spin.dim() - 1, 1]);
        let v = h.matrix().get(a, b).re;
        assert!((2.0 * v - 2.0 * 0.5 * 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dispersive_commutes_and_phases() {
        let h = h_dispersive(0.2, 5, Emitter::Single).unwrap();
        let fock = FockSpace::new(5).unwrap();
        let space = h.space().clone();
        let n = OperatorMatrix::new(space.clone(), space.embed(1, &number(fock))).unwrap();
        let sz = spin_operators_on(&space);
        assert!(h.commutator(&n).max_abs() < 1e-12);
        assert!(h.commutator(&sz).max_abs() < 1e-12);
        // E(e,n) − E(g,n) = 2nΩ₁
        let e3 = h.matrix().get(space.flatten(&[0, 3]), space.flatten(&[0, 3])).re;
        let g3 = h.matrix().get(space.flatten(&[1, 3]), space.flatten(&[1, 3])).re;
        assert!((e3 - g3 - 2.0 * 3.0 * 0.2).abs() < 1e-14);
        assert_eq!(h_dispersive(0.0, 3, Emitter::Single).unwrap().max_abs(), 0.0);
    }

    fn spin_operators_on(space: &CompositeSpace) -> OperatorMatrix {
        crate::spin::SpinOperators::on(space).unwrap().sz
    }

    #[test]
    fn oat_spectrum() {
        let h = h_oat(1.0, SpinSpace::from_atoms(2)).unwrap();
        let d: Vec<f64> = h.diagonal().iter().map(|v| v.re).collect();
        assert_eq!(d, vec![0.5, 0.0, 0.5]);
    }

    #[test]
    fn ising_coupling_shape() {
        let (n0, w, k) = (3.0, 0.2, 2.0);
        let j1 = ising_coupling(n0, w, k, k / 2.0).unwrap();
        assert!((j1 - 2.0 * n0 * w * w / k).abs() < 1e-14);
        for d in [0.5, 0.9, 1.1, 3.0] {
            assert!(ising_coupling(n0, w, k, d * k / 2.0).unwrap() < j1);
        }
        let far = ising_coupling(n0, w, k, 20.0 * k / 2.0).unwrap();
        let delta = 20.0 * k / 2.0;
        assert!((far / (2.0 * n0 * w * w / delta) - 1.0).abs() < 0.01);
        assert_eq!(ising_coupling(n0, w, k, -0.3).unwrap(), -ising_coupling(n0, w, k, 0.3).unwrap());
        assert!(ising_coupling(n0, w, 0.0, 1.0).is_err());
    }

    #[test]
    fn raman_identity() {
        for n in [4, 20] {
            let spin = SpinSpace::from_atoms(n);
            let chi = 0.37;
            let h = h_xy_raman(chi, chi, spin).unwrap();
            let s = spin.s();
            let diag: Vec<C64> = (0..spin.dim())
                .map(|i| re(2.0 * chi / n as f64 * (s * (s + 1.0) - spin.m(i).powi(2))))
                .collect();
            let target = OperatorMatrix::new(CompositeSpace::spin(spin), linalg::csr_diag(&diag)).unwrap();
            assert!(h.max_diff(&target) < 1e-12);
        }
    }

    #[test]
    fn isotropic_xxz_is_rotation_invariant() {
        let spin = SpinSpace::new(3.5).unwrap();
        let h = h_xxz(0.8, 0.8, spin).unwrap();
        let o = spin_operators(spin);
        for a in o.cartesian() {
            assert!(h.commutator(a).max_abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_weights_match_collective_sectors() {
        let site = SpinSpace::new(0.5).unwrap();
        let (jxy, jz) = (0.6, -0.25);
        let h = h_xxz_weighted(jxy, jz, &[1.0; 4], site).unwrap();
        let mut got = spectrum(&h);
        // four spin-½: S=2 once, S=1 three times, S=0 twice
        let mut want = Vec::new();
        for (s, mult) in [(2.0, 1), (1.0, 3), (0.0, 2)] {
            let e = spectrum(&h_xxz(2.0 * jxy, jz, SpinSpace::new(s).unwrap()).unwrap());
            for _ in 0..mult {
                want.extend(e.iter().copied());
            }
        }
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn field_gradient_penalizes_exchange() {
        let site = SpinSpace::new(0.5).unwrap();
        let (j, wb) = (1e-3, 1.0);
        let h = h_xy_inhomogeneous(j, &[0.0, wb], site).unwrap();
        // single-excitation block on |↑↓⟩ (index 1), |↓↑⟩ (index 2)
        let m = h.matrix();
        let (a, b, off) = (m.get(1, 1).re, m.get(2, 2).re, m.get(1, 2).re);
        assert!((off - j).abs() < 1e-15);
        let gap = ((a - b).powi(2) + 4.0 * off * off).sqrt();
        assert!((gap - (wb * wb + 4.0 * j * j).sqrt()).abs() < 1e-12);
        assert!(((b - a) - wb).abs() < 1e-12);
        let pure = h_xy_inhomogeneous(j, &[0.0, 0.0], site).unwrap();
        assert_eq!(pure.matrix().get(1, 1), pure.matrix().get(2, 2));
    }

    #[test]
    fn dicke_parity_symmetry() {
        let spin = SpinSpace::new(2.0).unwrap();
        let h = h_dicke(1.0, 1.3, 0.4, spin, 6).unwrap();
        let p = dicke_parity(spin, 6).unwrap();
        assert!(h.commutator(&p).max_abs() < 1e-10);
        let h0 = h_dicke(1.0, 1.3, 0.0, spin, 6).unwrap();
        assert!(h0.is_diagonal());
    }

    #[test]
    fn faraday_diagonal() {
        let h = h_faraday(0.3, SpinSpace::new(1.0).unwrap(), 2).unwrap();
        assert!(h.is_diagonal() && h.is_hermitian());
        let sp = h.space().clone();
        let v = h.matrix().get(sp.flatten(&[0, 1, 0]), sp.flatten(&[0, 1, 0])).re;
        assert!((v - 0.3).abs() < 1e-15);
    }

    #[test]
    fn overflow_and_tail() {
        assert!(matches!(
            h_xy_inhomogeneous(1.0, &[0.0; 13], SpinSpace::new(0.5).unwrap()),
            Err(Error::DimensionOverflow(..))
        ));
        let space = CompositeSpace::spin_fock(SpinSpace::new(0.5).unwrap(), FockSpace::new(3).unwrap());
        let st = QuantumState::basis(space.clone(), space.flatten(&[0, 3])).unwrap();
        assert_eq!(fock_tail_population(&st, 1).unwrap(), 1.0);
        assert!(fock_tail_population(&st, 0).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        let s = HamiltonianSpec::Oat { chi: 1.0, s: 2.0 };
        let j = serde_json::to_string(&s).unwrap();
        let back: HamiltonianSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back.build().unwrap().max_diff(&h_oat(1.0, SpinSpace::new(2.0).unwrap()).unwrap()), 0.0);
    }
}
