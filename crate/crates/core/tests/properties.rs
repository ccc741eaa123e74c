use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use proptest::prelude::*;

use cavityspin::budget::{cooperativity, phase_shift, twisting_geometry};
use cavityspin::cv::{local_ops, nullifier_variances, prepare_graph_state, squeeze_collective_mode, CovarianceState, GraphSpec, LocalOp};
use cavityspin::floquet::{
    builder_sachdev_ye, builder_tree, corr_to_geometry, couplings_to_spectrum, gaussian_quench, spectrum_to_couplings,
    Boundary, DistanceTable,
};
use cavityspin::hamiltonians::{h_dicke, h_faraday, h_oat, h_tavis_cummings, h_xxz, h_xy_raman};
use cavityspin::linalg::{CVector, C64};
use cavityspin::metrology::{allan_deviation, oat_state, qfi_optimal, wineland_xi2};
use cavityspin::qnd::{paint, PaintTarget, PulseShape};
use cavityspin::spin::CompositeSpace;
use cavityspin::{coherent_spin_state, rotate, spin_operators, squeezing_ellipse, Axis, QuantumState, SpinSpace};

fn random_state(n: u32, seed: &[f64]) -> QuantumState {
    let spin = SpinSpace::from_atoms(n);
    let d = spin.dim();
    let v = CVector::from_fn(d, |i, _| C64::new(seed[(2 * i) % seed.len()] + 0.1 * i as f64, seed[(2 * i + 1) % seed.len()]));
    QuantumState::pure(CompositeSpace::spin(spin), v).unwrap()
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn su2_and_casimir(twice_s in 1u32..=50) {
        let sp = SpinSpace::from_atoms(twice_s);
        let ops = spin_operators(sp);
        let [x, y, z] = ops.cartesian();
        let s = sp.s();
        prop_assert!(x.commutator(y).max_diff(&z.scaled_c(C64::i())) < 1e-12);
        prop_assert!(y.commutator(z).max_diff(&x.scaled_c(C64::i())) < 1e-12);
        prop_assert!(z.commutator(x).max_diff(&y.scaled_c(C64::i())) < 1e-12);
        let (xd, yd, zd) = (x.to_dense(), y.to_dense(), z.to_dense());
        let cas = &xd * &xd + &yd * &yd + &zd * &zd;
        let want = DMatrix::<C64>::identity(sp.dim(), sp.dim()) * C64::new(s * (s + 1.0), 0.0);
        prop_assert!((cas - want).camax() < 1e-10);
    }

    #[test]
    fn rotations_compose(n in 1u32..=20, a in -PI..PI, b in -PI..PI, ax in prop::array::uniform3(-1.0f64..1.0), th in 0.0..PI, ph in 0.0..2.0*PI) {
        prop_assume!(ax.iter().map(|x| x * x).sum::<f64>() > 0.01);
        let axis = Axis::Unit(unit(ax));
        let css = coherent_spin_state(SpinSpace::from_atoms(n), th, ph);
        let two = rotate(&rotate(&css, axis, a).unwrap(), axis, b).unwrap();
        let one = rotate(&css, axis, a + b).unwrap();
        prop_assert!((two.amplitudes().unwrap().norm() - 1.0).abs() < 1e-10);
        prop_assert!((two.amplitudes().unwrap() - one.amplitudes().unwrap()).camax() < 1e-10);
    }

    #[test]
    fn ellipse_period_and_robertson(n in 2u32..=24, seed in prop::collection::vec(-1.0f64..1.0, 8)) {
        let st = random_state(n, &seed);
        if let Ok(e) = squeezing_ellipse(&st, 32) {
            for th in [0.1, 0.7, 2.0] {
                prop_assert!((e.variance_at(th) - e.variance_at(th + PI)).abs() < 1e-10);
            }
            let len2: f64 = e.mean_spin.iter().map(|x| x * x).sum();
            prop_assert!(e.v_min * e.v_max >= len2 / 4.0 - 1e-8);
        }
    }

    #[test]
    fn hamiltonians_are_hermitian(n in 1u32..=8, g in -2.0f64..2.0, d in -2.0f64..2.0, n_max in 1usize..6) {
        let sp = SpinSpace::from_atoms(n);
        for h in [
            h_tavis_cummings(g, d, sp, n_max).unwrap(),
            h_oat(g, sp).unwrap(),
            h_xxz(g, d, sp).unwrap(),
            h_xy_raman(g, d, sp).unwrap(),
            h_dicke(1.0, d, g, sp, n_max).unwrap(),
            h_faraday(g, sp, n_max).unwrap(),
        ] {
            prop_assert!(h.hermiticity_defect() < 1e-10);
        }
    }

    #[test]
    fn dimensionless_budget_outputs_are_scale_free(g in 0.1f64..10.0, k in 0.1f64..10.0, gm in 0.1f64..10.0, lam in 0.01f64..100.0) {
        let eta = cooperativity(g, k, gm);
        prop_assert!((cooperativity(lam * g, lam * k, lam * gm) / eta - 1.0).abs() < 1e-12);
        let phi = phase_shift(3.0 * k, 2.0, g, k, gm);
        prop_assert!((phase_shift(3.0 * lam * k, 2.0, lam * g, lam * k, lam * gm) / phi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn twisting_area_respects_uncertainty(q in 0.0f64..50.0, d in 0.01f64..1e3) {
        let t = twisting_geometry(q, d).unwrap();
        prop_assert!(t.sigma2_sq * t.sigma2_anti >= 1.0 - 1e-12);
    }

    #[test]
    fn painting_never_amplifies(
        n in 2u32..=16,
        pulse in prop::collection::vec((0.0f64..5.0, -1.0f64..1.0, -1.0f64..1.0), 1..8),
        omega in 0.1f64..3.0,
        kappa in 0.0f64..2.0,
        th in 0.0..PI,
    ) {
        let mut samples: Vec<(f64, C64)> = pulse.iter().map(|&(t, a, b)| (t, C64::new(a, b))).collect();
        samples.sort_by(|x, y| x.0.total_cmp(&y.0));
        prop_assume!(samples.iter().any(|s| s.1.norm() > 1e-3));
        let css = coherent_spin_state(SpinSpace::from_atoms(n), th, 0.4);
        let out = paint(&css, &PulseShape::Samples { samples }, omega, kappa, &PaintTarget::None).unwrap();
        prop_assert!(out.probability >= 0.0 && out.probability <= 1.0 + 1e-12);
    }

    #[test]
    fn allan_homogeneous_in_tau(tau in 1e-3f64..1e5, lam in 1e-3f64..1e3) {
        let a = allan_deviation(0.3, 1e3, 10.0, 0.1, 0.5, &[tau, lam * tau]).unwrap();
        prop_assert!((a[1] * lam.sqrt() / a[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_round_trip(entries in prop::collection::btree_map(1usize..9, -2.0f64..2.0, 0..6)) {
        let table: DistanceTable = entries.into_iter().filter(|(_, v)| *v != 0.0).collect();
        let spec = couplings_to_spectrum(&table, 50.0).unwrap();
        let back = spectrum_to_couplings(&spec, 18, Boundary::Periodic).unwrap();
        for (&r, &v) in &table {
            prop_assert!((back.couplings.get(0, r) - v).abs() < 1e-12);
        }
        prop_assert!((spec.table().into_iter().map(|(r, v)| (v - table[&r]).abs()).fold(0.0, f64::max)) < 1e-12);
    }

    #[test]
    fn builders_symmetric(m in 2usize..24, seed in 0u64..1000, s in -2.0f64..2.0) {
        for j in [builder_sachdev_ye(m, 1.0, seed).unwrap(), builder_tree(s, m).unwrap()] {
            let a = j.matrix();
            prop_assert!((a - a.transpose()).amax() == 0.0);
            prop_assert!((0..m).all(|i| a[(i, i)] == 0.0));
        }
    }

    #[test]
    fn geometry_scale_invariant(m in 3usize..12, lam in 1e-3f64..1e3, width in 0.5f64..3.0) {
        let c = DMatrix::from_fn(m, m, |a, b| (-((a as f64 - b as f64) / width).powi(2)).exp());
        let g1 = corr_to_geometry(&c).unwrap();
        let g2 = corr_to_geometry(&(c * lam)).unwrap();
        prop_assert!((g1.distances - g2.distances).amax() < 1e-12);
    }

    #[test]
    fn quench_is_symplectic(m in 2usize..8, seed in 0u64..500, q in 0.1f64..1.5, t in 0.0f64..2.0) {
        let j = builder_sachdev_ye(m, 0.5, seed).unwrap();
        let track = gaussian_quench(&j, q, &[t]).unwrap();
        prop_assert!(track.symplectic_defect < 1e-8);
        prop_assert!(track.states[0].physicality() > -1e-8);
        prop_assert!((track.states[0].purity() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_ops_stay_physical(
        m in 1usize..6,
        ops in prop::collection::vec((0usize..6, -1.0f64..1.0, 0.0f64..1.5, -PI..PI), 1..6),
    ) {
        let mut st = CovarianceState::vacuum(m).unwrap();
        for (k, (site, phi, r, theta)) in ops.into_iter().enumerate() {
            let mut v = vec![0.0; m];
            v[site % m] = 1.0;
            if m > 1 {
                v[(site + 1) % m] = phi;
            }
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= n);
            st = squeeze_collective_mode(&st, &v, phi * 3.0, r).unwrap();
            st = local_ops(&st, &[k % m], LocalOp::Rotation(theta)).unwrap();
            prop_assert!((st.sigma() - st.sigma().transpose()).amax() < 1e-12);
            prop_assert!(st.physicality() > -1e-8);
            prop_assert!((st.purity() - 1.0).abs() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn wineland_never_beats_qfi(n in 4u32..=40, frac in 0.0f64..1.0) {
        let state = oat_state(n, 1.0, frac * n as f64).unwrap();
        if let Ok(xi2) = wineland_xi2(&state, n) {
            let q = qfi_optimal(&state).unwrap();
            prop_assert!(xi2 >= q.xi2 - 1e-10, "{} < {}", xi2, q.xi2);
        }
    }
}

#[test]
fn nullifiers_shrink_with_squeezing() {
    let a = GraphSpec::cycle(4).unwrap();
    let mut last = f64::INFINITY;
    for k in 0..=30 {
        let g = prepare_graph_state(&a, 0.1 * k as f64).unwrap();
        let worst = g.nullifier_variances.iter().copied().fold(0.0, f64::max);
        assert!(worst <= last + 1e-12);
        last = worst;
    }
}

#[test]
fn degenerate_eigenspace_basis_is_irrelevant() {
    // C₄ has a doubly degenerate zero eigenvalue; mix its basis by 0.7 rad
    let a = GraphSpec::cycle(4).unwrap();
    let r = 0.8;
    let reference = prepare_graph_state(&a, r).unwrap();
    let modes = &reference.prescription.modes;
    let zero: Vec<usize> = (0..4).filter(|&k| modes[k].eigenvalue.abs() < 1e-9).collect();
    assert_eq!(zero.len(), 2);
    let (u, w) = (&modes[zero[0]].vector, &modes[zero[1]].vector);
    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    let mixed = [
        u.iter().zip(w).map(|(x, y)| c * x + s * y).collect::<Vec<_>>(),
        u.iter().zip(w).map(|(x, y)| -s * x + c * y).collect::<Vec<_>>(),
    ];
    let mut st = CovarianceState::vacuum(4).unwrap();
    let mut j = 0;
    for (k, mode) in modes.iter().enumerate() {
        let v = if zero.contains(&k) {
            j += 1;
            &mixed[j - 1]
        } else {
            &mode.vector
        };
        st = squeeze_collective_mode(&st, v, mode.angle, r).unwrap();
    }
    st = local_ops(&st, &[0, 1, 2, 3], LocalOp::Rotation(-FRAC_PI_2)).unwrap();
    assert!((st.sigma() - reference.state.sigma()).amax() < 1e-8);
    let nv = nullifier_variances(&st, &a).unwrap();
    assert!(nv.iter().zip(&reference.nullifier_variances).all(|(x, y)| (x - y).abs() < 1e-8));
}
