use cavityspin::dynamics::dissipative_oat;
use cavityspin::metrology::{
    allan_deviation, echo_protocol, echo_scan, oat_optimum_scan, oat_scaling, EchoAxis, EchoProtocol,
};
use cavityspin::SpinSpace;

use super::{choice, count, int, linspace, list, logspace, num, opt, req, Kind, Scenario};
use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Report, Table};

pub static OAT: Scenario = Scenario {
    name: "oat",
    summary: "one-axis twisting squeezing curve, optional cavity dephasing and optimum scaling",
    params: &[
        req("N", Kind::Integer, "atom number"),
        req("chi", Kind::Number, "twisting strength; H = chi Sz^2 / N"),
        req("t_max", Kind::Number, "final time"),
        int("points", 101, "time samples including t = 0"),
        opt("d", "normalized detuning 2delta/kappa setting the dephasing; none for unitary"),
        list("N_list", &[], "atom numbers for the optimum scaling fit; empty to skip"),
    ],
    run: run_oat,
};

fn atoms(cfg: &ScenarioConfig, key: &str) -> CliResult<u32> {
    let n = count(cfg, key)?;
    if n > 100_000 {
        return Err(CliError::config(format!("`{key}` = {n} is beyond exact simulation")));
    }
    Ok(n)
}

fn run_oat(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let n = atoms(cfg, "N")?;
    let chi = cfg.number("chi");
    let d = cfg.maybe_number("d").unwrap_or(f64::INFINITY);
    let times = linspace(0.0, cfg.number("t_max"), count(cfg, "points")? as usize);
    let run = dissipative_oat(chi, d, SpinSpace::from_atoms(n), &times)?;
    let mut curve = Table::new("xi2_vs_t.csv", &["t", "xi2", "Vmin", "Vmax"]);
    for k in 0..times.len() {
        curve.push(vec![times[k].into(), run.xi2[k].into(), run.v_min[k].into(), run.v_max[k].into()]);
    }
    rep.table(curve);
    let (k_best, xi2_best) = run
        .xi2
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, x)| if x < acc.1 { (k, x) } else { acc });
    rep.number("gamma", run.gamma);
    rep.number("xi2_min_on_grid", xi2_best);
    rep.number("t_min_on_grid", times[k_best]);
    if n >= 4 {
        let best = oat_optimum_scan(n)?;
        rep.number("t_opt_unitary", best.t_opt / chi);
        rep.number("mu_opt_unitary", best.mu_opt);
        rep.number("xi2_opt_unitary", best.xi2_min);
    }

    let ns = cfg.list("N_list");
    if !ns.is_empty() {
        let ns: Vec<u32> = ns
            .iter()
            .map(|&x| {
                if x >= 4.0 && x.fract() == 0.0 && x <= 5000.0 {
                    Ok(x as u32)
                } else {
                    Err(CliError::config(format!("N_list entries must be integers in [4, 5000], got {x}")))
                }
            })
            .collect::<CliResult<_>>()?;
        let scaling = oat_scaling(&ns)?;
        let mut t = Table::new("oat_scaling.csv", &["N", "chi_t_opt", "mu_opt", "xi2_min"]);
        for p in &scaling.points {
            t.push(vec![p.n.into(), p.t_opt.into(), p.mu_opt.into(), p.xi2_min.into()]);
        }
        rep.table(t);
        rep.number("xi2_min_exponent", scaling.exponent);
    }
    Ok(())
}

pub static ECHO: Scenario = Scenario {
    name: "echo",
    summary: "twist-untwist echo: amplification gain and echo squeezing versus twisting time",
    params: &[
        req("N", Kind::Integer, "atom number"),
        num("chi", 1.0, "twisting strength; H = chi Sz^2 / N"),
        opt("t_max", "largest twisting time; defaults to 2 sqrt(N) / chi"),
        int("points", 60, "number of twisting times"),
        choice("axis", "anti_squeezed", &["x", "y", "z", "anti_squeezed"], "perturbation rotation axis"),
    ],
    run: run_echo,
};

fn run_echo(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let n = atoms(cfg, "N")?;
    let chi = cfg.number("chi");
    if !(chi > 0.0) {
        return Err(CliError::config("`chi` must be positive"));
    }
    let axis = match cfg.text("axis") {
        "x" => EchoAxis::X,
        "y" => EchoAxis::Y,
        "z" => EchoAxis::Z,
        _ => EchoAxis::AntiSqueezed,
    };
    let t_max = cfg.maybe_number("t_max").unwrap_or(2.0 * (n as f64).sqrt() / chi);
    let points = count(cfg, "points")? as usize;
    let times = linspace(t_max / points as f64, t_max, points);
    let scan = echo_scan(n, chi, axis, &times)?;
    let mut t = Table::new("echo_vs_t.csv", &["t", "gain", "xi2_echo"]);
    for p in &scan {
        t.push(vec![p.t.into(), p.gain.into(), p.xi2_echo.into()]);
    }
    rep.table(t);
    let peak = scan.iter().max_by(|a, b| a.gain.total_cmp(&b.gain)).expect("non-empty scan");
    let best = scan.iter().min_by(|a, b| a.xi2_echo.total_cmp(&b.xi2_echo)).expect("non-empty scan");
    rep.number("gain_peak", peak.gain);
    rep.number("t_gain_peak", peak.t);
    rep.number("xi2_echo_best", best.xi2_echo);
    rep.number("t_xi2_echo_best", best.t);
    let at_peak = echo_protocol(&EchoProtocol { chi, t_fwd: peak.t, axis, phi: 0.0, t_rev: None, n })?;
    rep.number("return_fidelity_at_peak", at_peak.return_fidelity);
    if n >= 4 {
        rep.number("xi2_oat_optimum", oat_optimum_scan(n)?.xi2_min);
    }
    Ok(())
}

pub static ALLAN: Scenario = Scenario {
    name: "allan",
    summary: "projection-noise Allan deviation of a Ramsey clock with and without squeezing",
    params: &[
        req("N", Kind::Integer, "atom number"),
        opt("xi2", "Wineland parameter of the probe state; defaults to the one-axis-twisting optimum at N"),
        num("omega", 2.0 * std::f64::consts::PI * 4.29e14, "clock transition frequency (rad/s)"),
        num("T", 1.0, "Ramsey interrogation time (s)"),
        num("T_cycle", 1.5, "cycle time including dead time (s)"),
        num("tau_min", 1.0, "shortest averaging time (s)"),
        num("tau_max", 1e4, "longest averaging time (s)"),
        int("points", 41, "averaging times, log spaced"),
    ],
    run: run_allan,
};

fn run_allan(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let n = atoms(cfg, "N")?;
    let xi2 = match cfg.maybe_number("xi2") {
        Some(x) => x,
        None => oat_optimum_scan(n)?.xi2_min,
    };
    let taus = logspace(cfg.number("tau_min"), cfg.number("tau_max"), count(cfg, "points")? as usize);
    let (omega, t, tc) = (cfg.number("omega"), cfg.number("T"), cfg.number("T_cycle"));
    let css = allan_deviation(1.0, n as f64, omega, t, tc, &taus)?;
    let sq = allan_deviation(xi2.sqrt(), n as f64, omega, t, tc, &taus)?;
    let mut table = Table::new("allan.csv", &["tau", "sigma_css", "sigma_squeezed"]);
    for k in 0..taus.len() {
        table.push(vec![taus[k].into(), css[k].into(), sq[k].into()]);
    }
    rep.table(table);
    rep.number("xi2", xi2);
    rep.number("gain_db", -10.0 * xi2.log10());
    rep.number("sigma_squeezed_at_1s", allan_deviation(xi2.sqrt(), n as f64, omega, t, tc, &[1.0])?[0]);
    Ok(())
}
