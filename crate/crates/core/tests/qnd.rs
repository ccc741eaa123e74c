use std::f64::consts::{FRAC_PI_2, PI};

use cavityspin::budget::squeezing_exponent;
use cavityspin::linalg::{CVector, C64};
use cavityspin::optimize;
use cavityspin::qnd::*;
use cavityspin::{coherent_spin_state, dicke_state, SpinSpace};

fn poisson_even(alpha: f64) -> f64 {
    // direct sum over even photon numbers
    let mu = alpha * alpha;
    let mut term = (-mu).exp();
    let mut sum = term;
    for n in 1..400 {
        term *= mu / n as f64;
        if n % 2 == 0 {
            sum += term;
        }
    }
    sum
}

#[test]
fn parity_probabilities_match_poisson_sum() {
    for alpha in [0.5, 1.0, 2.0, 3.0, 4.0] {
        let n_max = (alpha * alpha + 6.0 * alpha + 10.0f64).ceil() as usize;
        let h = parity_herald(C64::new(alpha, 0.0), PI, n_max).unwrap();
        assert!((h.even.probability + h.odd.probability - 1.0).abs() < 1e-9);
        assert!((h.even.probability - poisson_even(alpha)).abs() < 1e-9, "α = {alpha}");
        assert!((h.even.probability - 0.5 * (1.0 + (-2.0 * alpha * alpha).exp())).abs() < 1e-9);
    }
}

#[test]
fn parity_branches_are_cats() {
    let h = parity_herald(C64::new(2.0, 0.0), PI, 40).unwrap();
    assert!((h.even.probability - 0.5 * (1.0 + (-8.0f64).exp())).abs() < 1e-12);
    // independent target: explicit (|2i⟩ + |−2i⟩) in the Fock basis
    let mut amps = CVector::zeros(41);
    let mut c = C64::new((-2.0f64).exp(), 0.0);
    for n in 0..=40 {
        if n > 0 {
            c *= C64::new(0.0, 2.0) / (n as f64).sqrt();
        }
        amps[n] = if n % 2 == 0 { c * 2.0 } else { C64::new(0.0, 0.0) };
    }
    let v = h.even.state.as_ref().unwrap().amplitudes().unwrap();
    let f = v.dotc(&amps).norm_sqr() / amps.norm_squared();
    assert!(f > 1.0 - 1e-8);
    assert!(h.even.fidelity.unwrap() > 1.0 - 1e-8);
    assert!(h.odd.fidelity.unwrap() > 1.0 - 1e-8);
    // parity purity
    for (branch, sign) in [(&h.even, 1.0), (&h.odd, -1.0)] {
        let pops = branch.state.as_ref().unwrap().populations();
        let parity: f64 = pops.iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -*p }).sum();
        assert!((parity - sign).abs() < 1e-8);
    }
}

#[test]
fn collapse_resolves_residue_mod_8() {
    let runs = 200;
    let hits = (0..runs)
        .filter(|&seed| {
            let t = progressive_collapse(2.0, PI / 4.0, 60, &DEFAULT_SCHEDULE, seed).unwrap();
            let c = *t.concentration.last().unwrap();
            let mut classes = [0.0; 8];
            for (n, p) in t.posterior.iter().enumerate() {
                classes[n % 8] += p;
            }
            c > 0.99 && classes[t.hidden_n % 8] == c
        })
        .count();
    assert!(hits as f64 >= 0.9 * runs as f64, "{hits}/{runs}");
}

#[test]
fn collapse_entropy_decreases_on_average() {
    let seeds = 100;
    let atoms = 40;
    let tracks: Vec<Vec<f64>> = (0..seeds)
        .map(|seed| progressive_collapse(2.0, PI / 4.0, atoms, &DEFAULT_SCHEDULE, 1000 + seed).unwrap().entropy)
        .collect();
    for k in 0..atoms {
        // per-step change, averaged over seeds, must not rise beyond sampling noise
        let d: Vec<f64> = tracks.iter().map(|e| e[k + 1] - e[k]).collect();
        let mean = d.iter().sum::<f64>() / seeds as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
        assert!(mean <= 3.0 * (var / seeds as f64).sqrt(), "step {k}: {mean}");
    }
    let first: f64 = tracks.iter().map(|e| e[0]).sum::<f64>() / seeds as f64;
    let last: f64 = tracks.iter().map(|e| e[atoms]).sum::<f64>() / seeds as f64;
    assert!(last < 0.2 * first);
    let prior = progressive_collapse(2.0, PI / 4.0, 0, &DEFAULT_SCHEDULE, 1).unwrap();
    let mu: f64 = prior.prior.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    assert!((mu - 4.0).abs() < 1e-9);
}

#[test]
fn conditional_squeezing_tracks_budget_scaling() {
    let raman = 0.5;
    let xs = optimize::logspace(1e3, 1e6, 7);
    let best: Vec<f64> = xs
        .iter()
        .map(|&n_eta| {
            let grid: Vec<f64> = (0..=300).map(|k| (-10.0 + 10.0 * k as f64 / 300.0) * std::f64::consts::LN_10).collect();
            optimize::grid_then_golden(
                |ln_y| {
                    let y = ln_y.exp();
                    conditional_squeeze_gaussian(1e4, 1.0 / (n_eta * y), y, raman).unwrap().xi2
                },
                &grid,
                1e-9,
            )
            .1
        })
        .collect();
    let slope = optimize::log_log_slope(&xs, &best);
    assert!((slope - squeezing_exponent(&xs, raman)).abs() < 0.02, "{slope}");
    assert!((slope + 0.5).abs() < 0.05);
}

#[test]
fn w_state_small_phase() {
    let w = herald_w_faraday(4, 0.01).unwrap();
    assert!(w.outcome.fidelity.unwrap() > 0.99);
    assert!(w.mean_sz.abs() < 1e-12);
    assert!(!w.aliasing);
    let tiny = herald_w_faraday(10, 1e-3).unwrap();
    assert!(tiny.css_overlap < 1e-6);
    // series: ‖sin(ΦS_z)ψ‖² ≈ Φ²⟨S_z²⟩ = Φ² N/4
    for (n, phi) in [(10u32, 1e-3), (40, 1e-4)] {
        let p = herald_w_faraday(n, phi).unwrap().outcome.probability;
        let lead = phi * phi * n as f64 / 4.0;
        assert!((p / lead - 1.0).abs() < 1e-4 * n as f64, "{p} {lead}");
    }
}

#[test]
fn faraday_sz_distribution_is_bimodal() {
    // small Φ: P(m) ∝ m² e^{−m²/2σ²}, whose half-lobes give Ashman's D = 4.74
    let lobe_mean = 2.0 * (2.0 / PI).sqrt();
    let lobe_var = 3.0 - lobe_mean * lobe_mean;
    let continuum = 2f64.sqrt() * 2.0 * lobe_mean / (2.0 * lobe_var).sqrt();
    let w = herald_w_faraday(400, 1e-3).unwrap();
    assert!(w.bimodality > 2.0);
    assert!((w.bimodality / continuum - 1.0).abs() < 0.03, "{}", w.bimodality);
}

#[test]
fn faraday_kitten_is_odd_cat() {
    let (n, phi) = (100u32, 0.3);
    let spin = SpinSpace::from_atoms(n);
    let w = herald_w_faraday(n, phi).unwrap();
    assert!(w.aliasing);
    let cat = cat_state(spin, FRAC_PI_2, phi, -phi, -1.0).unwrap();
    assert!(w.outcome.state.as_ref().unwrap().fidelity(&cat).unwrap() > 1.0 - 1e-9);
    // the two lobes are nearly orthogonal once Φ ≫ 1/√N
    let a = coherent_spin_state(spin, FRAC_PI_2, phi);
    let b = coherent_spin_state(spin, FRAC_PI_2, -phi);
    assert!(a.fidelity(&b).unwrap() < 1e-3);
}

#[test]
fn delta_pulse_rotates_css() {
    let spin = SpinSpace::from_atoms(12);
    let css = coherent_spin_state(spin, FRAC_PI_2, 0.0);
    let pulse = PulseShape::Samples { samples: vec![(0.7, C64::new(0.0, 2.0))] };
    let target = PaintTarget::State(coherent_spin_state(spin, FRAC_PI_2, 1.3 * 0.7));
    let out = paint(&css, &pulse, 1.3, 0.4, &target).unwrap();
    assert!((out.probability - 1.0).abs() < 1e-12);
    assert!((out.fidelity.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn circle_beats_kitten_on_dicke_zero() {
    let omega = 1.0;
    let mut ratios = Vec::new();
    for n in [10u32, 20, 40] {
        let spin = SpinSpace::from_atoms(n);
        let css = coherent_spin_state(spin, FRAC_PI_2, 0.0);
        let circle = paint(&css, &PulseShape::ExpCircle { period: 2.0 * PI / omega, rate: 1e-9 }, omega, 0.0, &PaintTarget::Dicke(0.0))
            .unwrap();
        let kitten = paint(&css, &PulseShape::TwoPulse { dt: PI / omega }, omega, 0.0, &PaintTarget::Dicke(0.0)).unwrap();
        let (fc, fk) = (circle.fidelity.unwrap(), kitten.fidelity.unwrap());
        assert!(fc > fk, "N = {n}: {fc} vs {fk}");
        // oracle: the pulse projects onto m = 0 and the kitten keeps the even-m weight
        let weight0 = css.populations()[spin.index_of(0.0).unwrap()];
        assert!((circle.probability - weight0).abs() < 1e-6 * weight0.max(1e-12));
        ratios.push(fc / fk);
    }
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
}

#[test]
fn two_pulse_even_cat() {
    let spin = SpinSpace::from_atoms(10);
    let css = coherent_spin_state(spin, FRAC_PI_2, 0.0);
    let target = cat_state(spin, FRAC_PI_2, 0.2, 0.2 + PI, 1.0).unwrap();
    let pulse = PulseShape::Samples { samples: vec![(0.2, C64::new(1.0, 0.0)), (0.2 + PI, C64::new(1.0, 0.0))] };
    let out = paint(&css, &pulse, 1.0, 0.0, &PaintTarget::State(target)).unwrap();
    assert!(out.fidelity.unwrap() > 0.99);
}

#[test]
fn time_reversed_pulse_conjugates_state() {
    let spin = SpinSpace::from_atoms(8);
    let css = coherent_spin_state(spin, 1.1, 0.0);
    let samples = vec![(0.0, C64::new(1.0, 0.3)), (0.4, C64::new(-0.2, 0.5)), (1.5, C64::new(0.7, 0.0))];
    let reversed: Vec<(f64, C64)> = samples.iter().rev().map(|(t, f)| (-t, f.conj())).collect();
    let a = paint(&css, &PulseShape::Samples { samples }, 0.9, 0.0, &PaintTarget::None).unwrap();
    let b = paint(&css, &PulseShape::Samples { samples: reversed }, 0.9, 0.0, &PaintTarget::None).unwrap();
    assert!((a.probability - b.probability).abs() < 1e-12);
    let va = a.state.unwrap().amplitudes().unwrap().map(|c| c.conj());
    let vb = b.state.unwrap().amplitudes().unwrap().clone();
    assert!((va - vb).camax() < 1e-12);
}

#[test]
fn empty_pulse_rejected() {
    let css = coherent_spin_state(SpinSpace::from_atoms(4), FRAC_PI_2, 0.0);
    assert!(paint(&css, &PulseShape::Samples { samples: vec![] }, 1.0, 0.0, &PaintTarget::None).is_err());
    assert!(dicke_state(SpinSpace::from_atoms(4), 0.0).is_ok());
}

#[test]
fn vacuum_rabi_splitting() {
    let g = 1.0;
    for (n, want) in [(1u32, 2.0), (16, 8.0)] {
        let reach = 3.5 * g * (n as f64).sqrt();
        let grid = optimize::linspace(-reach, reach, 2001);
        let s = vacuum_rabi_spectrum(g, n, g / 10.0, g / 10.0, &grid).unwrap();
        let split = s.splitting.unwrap();
        assert!((split / want - 1.0).abs() < 0.01, "N = {n}: {split}");
    }
    assert!(vacuum_rabi_spectrum(1.0, 4, 0.1, 0.1, &optimize::linspace(-3.0, 3.0, 100)).is_err());
}
