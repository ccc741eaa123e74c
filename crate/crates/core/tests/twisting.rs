use std::time::Instant;

use cavityspin::budget::twisting_geometry;
use cavityspin::dynamics::{dissipative_oat, evolve_unitary_at};
use cavityspin::hamiltonians::h_oat;
use cavityspin::metrology::oat_state;
use cavityspin::{coherent_spin_state, SpinSpace};

#[test]
fn dephased_twisting_degrades_both_axes() {
    let spin = SpinSpace::from_atoms(100);
    let times = [0.25, 0.5, 0.75, 1.0];
    let start = Instant::now();
    let lossy = dissipative_oat(1.0, 1.0, spin, &times).unwrap();
    let free = dissipative_oat(1.0, f64::INFINITY, spin, &times).unwrap();
    assert!(start.elapsed().as_secs_f64() < 30.0);
    let k = times.len() - 1;
    assert!((lossy.q[k] - 1.0).abs() < 1e-15);
    assert!(lossy.v_max[k] > free.v_max[k]);
    assert!(lossy.v_min[k] > free.v_min[k]);
    // linearized ellipse, variances in units of N/4
    for (k, q) in lossy.q.iter().enumerate() {
        for (run, d) in [(&lossy, 1.0), (&free, f64::INFINITY)] {
            let model = twisting_geometry(*q, d).unwrap().sigma2_sq;
            let v = run.v_min[k] / 25.0;
            assert!((v / model - 1.0).abs() < 0.05, "Q = {q}, d = {d}: {v} vs {model}");
        }
    }
}

#[test]
fn weak_dephasing_recovers_unitary() {
    let spin = SpinSpace::from_atoms(30);
    let times = [0.5, 1.0, 2.0];
    let weak = dissipative_oat(1.0, 1e9, spin, &times).unwrap();
    let h = h_oat(1.0, spin).unwrap();
    let exact = evolve_unitary_at(&h, &coherent_spin_state(spin, std::f64::consts::FRAC_PI_2, 0.0), &times).unwrap();
    for (k, m) in exact.spin_moments.iter().enumerate() {
        let e = cavityspin::spin::ellipse_from_moments(m, 64).unwrap();
        assert!((weak.v_min[k] - e.v_min).abs() < 1e-6);
        assert!((weak.v_max[k] - e.v_max).abs() < 1e-6);
        let direct = oat_state(30, 1.0, times[k]).unwrap();
        assert!(exact.states[k].fidelity(&direct).unwrap() > 1.0 - 1e-8);
    }
}
