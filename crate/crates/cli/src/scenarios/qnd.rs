use std::f64::consts::{FRAC_PI_2, PI};

use cavityspin::budget::{squeezing_budget, squeezing_limits, SqueezingMode};
use cavityspin::linalg::C64;
use cavityspin::qnd::{
    cat_state, conditional_squeeze_gaussian, cutoff_bound, herald_w_faraday, paint, parity_herald,
    progressive_collapse, PaintTarget, PulseShape, DEFAULT_SCHEDULE,
};
use cavityspin::{coherent_spin_state, QuantumState, SpinSpace};
use rayon::prelude::*;

use super::{choice, count, int, list, logspace, num, opt, req, Kind, Scenario};
use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Report, Table};

/// Populations of a spin state, labelled by `m`.
fn spin_populations(file: &str, state: &QuantumState, spin: SpinSpace) -> Table {
    let mut t = Table::new(file, &["m", "population"]);
    for (i, p) in state.populations().into_iter().enumerate() {
        t.push(vec![spin.m(i).into(), p.into()]);
    }
    t
}

pub static QND_SQUEEZE: Scenario = Scenario {
    name: "qnd_squeeze",
    summary: "measurement-induced squeezing versus probe strength with free-space scattering",
    params: &[
        req("N", Kind::Number, "atom number"),
        req("eta", Kind::Number, "single-atom cooperativity"),
        num("raman", 1.0, "Raman branching factor r; 0 for a cycling transition"),
        num("y_min", 1e-4, "smallest scattered fraction Gamma_sc t"),
        num("y_max", 1.0, "largest scattered fraction Gamma_sc t"),
        int("points", 81, "probe strengths, log spaced"),
    ],
    run: run_qnd_squeeze,
};

fn run_qnd_squeeze(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let (n, eta, raman) = (cfg.number("N"), cfg.number("eta"), cfg.number("raman"));
    let ys = logspace(cfg.number("y_min"), cfg.number("y_max"), count(cfg, "points")? as usize);
    let mut t = Table::new("xi2_vs_probe.csv", &["gamma_t", "sigma2_m", "var_sz", "var_sy", "xi2", "xi2_budget"]);
    for &y in &ys {
        let sigma2 = 1.0 / (n * eta * y);
        let c = conditional_squeeze_gaussian(n, sigma2, y, raman)?;
        t.push(vec![y.into(), sigma2.into(), c.var_sz.into(), c.var_sy.into(), c.xi2.into(), squeezing_budget(y, n * eta, raman).into()]);
    }
    rep.table(t);
    let cyc = squeezing_limits(n, eta, raman, SqueezingMode::Measurement, true)?;
    let ram = squeezing_limits(n, eta, raman, SqueezingMode::Measurement, false)?;
    rep.number("xi2_opt_cycling", cyc.xi2_opt);
    rep.number("gamma_t_opt_cycling", cyc.gamma_t_opt);
    rep.number("xi2_opt_raman", ram.xi2_opt);
    rep.number("gamma_t_opt_raman", ram.gamma_t_opt);
    rep.number("local_exponent_cycling", cyc.exponent);
    rep.number("local_exponent_raman", ram.exponent);
    Ok(())
}

pub static PARITY_CAT: Scenario = Scenario {
    name: "parity_cat",
    summary: "single-atom parity herald of a coherent field and the resulting cat states",
    params: &[
        req("alpha", Kind::Number, "coherent amplitude (real)"),
        num("phi1", PI, "single-photon phase shift"),
        opt("n_max", "Fock cutoff; defaults to a safe bound for the largest amplitude"),
        list("alpha_list", &[0.5, 1.0, 2.0, 3.0], "amplitudes for the parity table"),
    ],
    run: run_parity_cat,
};

fn run_parity_cat(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let alpha = cfg.number("alpha");
    let phi1 = cfg.number("phi1");
    let amps = cfg.list("alpha_list");
    let largest = amps.iter().fold(alpha.abs(), |m, a| m.max(a.abs()));
    let n_max = match cfg.maybe_number("n_max") {
        Some(x) if x >= 0.0 && x.fract() == 0.0 => x as usize,
        Some(x) => return Err(CliError::config(format!("`n_max` must be a non-negative integer, got {x}"))),
        None => cutoff_bound(largest),
    };
    let mut t = Table::new("parity.csv", &["alpha", "p_even", "p_even_poisson", "fidelity_even", "fidelity_odd"]);
    for &a in amps {
        let h = parity_herald(C64::new(a, 0.0), phi1, n_max)?;
        let closed = 0.5 * (1.0 + (-2.0 * a * a).exp());
        t.push(vec![
            a.into(),
            h.even.probability.into(),
            closed.into(),
            h.even.fidelity.unwrap_or(f64::NAN).into(),
            h.odd.fidelity.unwrap_or(f64::NAN).into(),
        ]);
    }
    rep.table(t);

    let h = parity_herald(C64::new(alpha, 0.0), phi1, n_max)?;
    rep.scalar("n_max", n_max);
    rep.number("truncation_tail", h.tail);
    rep.number("p_even", h.even.probability);
    rep.number("p_odd", h.odd.probability);
    rep.number("fidelity_even", h.even.fidelity.unwrap_or(f64::NAN));
    rep.number("fidelity_odd", h.odd.fidelity.unwrap_or(f64::NAN));
    let mut dist = Table::new("photon_number.csv", &["n", "even", "odd"]);
    let pops = |s: &Option<QuantumState>| s.as_ref().map(|s| s.populations()).unwrap_or_else(|| vec![0.0; n_max + 1]);
    let (pe, po) = (pops(&h.even.state), pops(&h.odd.state));
    for n in 0..=n_max {
        dist.push(vec![n.into(), pe[n].into(), po[n].into()]);
    }
    rep.table(dist);
    Ok(())
}

pub static FOCK_COLLAPSE: Scenario = Scenario {
    name: "fock_collapse",
    summary: "progressive collapse of a coherent field onto photon-number classes by repeated atomic probes",
    params: &[
        req("alpha", Kind::Number, "coherent amplitude"),
        num("phi1", PI / 4.0, "single-photon phase shift"),
        int("atoms", 60, "atoms sent through the cavity per run"),
        int("runs", 200, "independent runs"),
        list("schedule", &DEFAULT_SCHEDULE, "readout phases cycled over the atoms"),
        num("threshold", 0.9, "posterior weight counted as a collapsed run"),
    ],
    run: run_fock_collapse,
};

fn run_fock_collapse(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let (alpha, phi1) = (cfg.number("alpha"), cfg.number("phi1"));
    let atoms = cfg.integer("atoms") as usize;
    let runs = count(cfg, "runs")? as u64;
    let schedule = cfg.list("schedule").to_vec();
    let threshold = cfg.number("threshold");
    // run k uses seed + k, so results do not depend on the thread count
    let tracks = (0..runs)
        .into_par_iter()
        .map(|k| progressive_collapse(alpha, phi1, atoms, &schedule, cfg.seed.wrapping_add(k)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut per_run = Table::new("collapse_runs.csv", &["run", "hidden_n", "final_entropy", "final_concentration", "collapsed"]);
    for (k, tr) in tracks.iter().enumerate() {
        let h = *tr.entropy.last().expect("entropy track");
        let c = *tr.concentration.last().expect("concentration track");
        per_run.push(vec![k.into(), tr.hidden_n.into(), h.into(), c.into(), (c >= threshold).into()]);
    }
    rep.table(per_run);

    let steps = atoms + 1;
    let r = tracks.len() as f64;
    let mut curve = Table::new("entropy_vs_atoms.csv", &["atoms", "mean_entropy", "stderr_entropy", "mean_concentration"]);
    for s in 0..steps {
        let mean = tracks.iter().map(|t| t.entropy[s]).sum::<f64>() / r;
        let var = tracks.iter().map(|t| (t.entropy[s] - mean).powi(2)).sum::<f64>() / (r - 1.0).max(1.0);
        let conc = tracks.iter().map(|t| t.concentration[s]).sum::<f64>() / r;
        curve.push(vec![s.into(), mean.into(), (var / r).sqrt().into(), conc.into()]);
    }
    rep.table(curve);
    let collapsed = tracks.iter().filter(|t| *t.concentration.last().unwrap() >= threshold).count();
    rep.scalar("period", tracks[0].period);
    rep.scalar("n_max", tracks[0].n_max);
    rep.number("collapsed_fraction", collapsed as f64 / r);
    rep.number("initial_entropy", tracks[0].entropy[0]);
    rep.number("mean_final_entropy", tracks.iter().map(|t| *t.entropy.last().unwrap()).sum::<f64>() / r);
    Ok(())
}

pub static W_STATE: Scenario = Scenario {
    name: "w_state",
    summary: "heralding a W state from a coherent spin state with a weak Faraday probe",
    params: &[
        req("N", Kind::Integer, "atom number"),
        req("phi", Kind::Number, "Faraday rotation per unit S_z"),
    ],
    run: run_w_state,
};

fn run_w_state(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let n = count(cfg, "N")?;
    let w = herald_w_faraday(n, cfg.number("phi"))?;
    rep.number("probability", w.outcome.probability);
    rep.number("fidelity", w.outcome.fidelity.unwrap_or(f64::NAN));
    rep.number("css_overlap", w.css_overlap);
    rep.number("mean_sz", w.mean_sz);
    rep.number("bimodality", w.bimodality);
    rep.scalar("aliasing", w.aliasing);
    if let Some(state) = &w.outcome.state {
        rep.table(spin_populations("populations.csv", state, SpinSpace::from_atoms(n)));
    }
    Ok(())
}

pub static PAINT: Scenario = Scenario {
    name: "paint",
    summary: "state painting: heralded single-photon kernel shaped by the emission pulse",
    params: &[
        req("N", Kind::Integer, "atom number; the input is the coherent state along +x"),
        choice("pulse", "two_pulse", &["two_pulse", "circle", "exp_circle"], "emission pulse shape"),
        num("dt", PI, "separation of the two pulses"),
        num("period", 2.0 * PI, "duration of the circular pulses"),
        num("rate", 0.0, "exponential growth rate of exp_circle"),
        num("omega1", 1.0, "single-photon precession rate"),
        num("kappa", 0.0, "cavity decay rate"),
        choice("target", "cat", &["none", "dicke", "cat"], "reference state for the fidelity"),
        num("target_m", 0.0, "Dicke projection for target = dicke"),
        num("cat_sign", 1.0, "relative sign of the two lobes for target = cat"),
    ],
    run: run_paint,
};

fn run_paint(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let n = count(cfg, "N")?;
    if n > 2000 {
        return Err(CliError::config(format!("`N` = {n} is beyond exact simulation")));
    }
    let spin = SpinSpace::from_atoms(n);
    let omega1 = cfg.number("omega1");
    let pulse = match cfg.text("pulse") {
        "two_pulse" => PulseShape::TwoPulse { dt: cfg.number("dt") },
        "circle" => PulseShape::Circle { period: cfg.number("period") },
        _ => PulseShape::ExpCircle { period: cfg.number("period"), rate: cfg.number("rate") },
    };
    let target = match cfg.text("target") {
        "none" => PaintTarget::None,
        "dicke" => PaintTarget::Dicke(cfg.number("target_m")),
        _ => {
            if cfg.text("pulse") != "two_pulse" {
                return Err(CliError::config("target = cat needs pulse = two_pulse"));
            }
            let phi_b = omega1 * cfg.number("dt");
            PaintTarget::State(cat_state(spin, FRAC_PI_2, 0.0, phi_b, cfg.number("cat_sign"))?)
        }
    };
    let css = coherent_spin_state(spin, FRAC_PI_2, 0.0);
    let out = paint(&css, &pulse, omega1, cfg.number("kappa"), &target)?;
    rep.number("probability", out.probability);
    if let Some(f) = out.fidelity {
        rep.number("fidelity", f);
    }
    if let Some(state) = &out.state {
        rep.table(spin_populations("populations.csv", state, spin));
    }
    Ok(())
}
