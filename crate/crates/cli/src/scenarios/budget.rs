use cavityspin::budget::{
    cooperativity_geometric, ising_budget, phase_shift_ceiling, rates_from_geometry, squeezing_limits,
    twisting_geometry, CavityGeometry, SqueezingMode,
};
use cavityspin::optimize::log_log_slope;

use super::{count, int, linspace, list, logspace, num, opt, req, Kind, Scenario};
use crate::config::ScenarioConfig;
use crate::error::CliResult;
use crate::output::{Report, Table};

pub static BUDGET: Scenario = Scenario {
    name: "budget",
    summary: "cooperativity, phase ceiling, Ising optimum and squeezing limits of a cavity geometry",
    params: &[
        req("finesse", Kind::Number, "cavity finesse F"),
        req("waist", Kind::Number, "mode waist w0 (m)"),
        req("wavelength", Kind::Number, "wavelength (m)"),
        opt("length", "mirror separation (m); enables linewidth, coupling and phase ceiling"),
        num("gamma", 2.0 * std::f64::consts::PI * 6.065e6, "atomic linewidth (rad/s)"),
        num("nbar", 1.0, "mean probe photon number for the phase ceiling"),
        list("eta_list", &[10.0, 100.0, 1000.0], "cooperativities for the Ising optimum"),
        num("n0", 1.0, "intracavity photon number of the Ising drive"),
        num("omega1", 1.0, "single-atom shift of the Ising drive"),
        num("kappa_ising", 1.0, "cavity linewidth used by the Ising budget"),
        num("n_eta_min", 1e2, "smallest N*eta for the squeezing limits"),
        num("n_eta_max", 1e6, "largest N*eta for the squeezing limits"),
        int("n_eta_points", 9, "number of N*eta values"),
        num("raman", 1.0, "Raman branching factor r"),
        num("twist_d", 1.0, "normalized detuning d = 2delta/kappa for the twisting ellipse"),
        num("twist_q_max", 3.0, "largest twisting strength Q"),
        int("twist_points", 61, "number of Q values"),
    ],
    run,
};

fn run(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let geom = CavityGeometry::new(
        cfg.number("finesse"),
        cfg.number("waist"),
        cfg.number("wavelength"),
        cfg.maybe_number("length"),
    )?;
    let eta = cooperativity_geometric(&geom);
    rep.number("eta", eta);
    if geom.length.is_some() {
        let rates = rates_from_geometry(&geom, cfg.number("gamma"))?;
        rep.number("kappa", rates.kappa);
        rep.number("g", rates.g);
        let ceiling = phase_shift_ceiling(cfg.number("nbar"), rates.g, rates.kappa, cfg.number("gamma"))?;
        rep.number("phi1_max", ceiling.phi1_max);
        rep.number("phi1_delta_opt", ceiling.delta_opt);
        rep.number("phi1_scan", ceiling.phi1_scan);
    }

    let mut ising = Table::new(
        "ising_budget.csv",
        &["eta", "delta_opt", "delta_opt_analytic", "ratio_opt", "ratio_opt_analytic"],
    );
    let etas = cfg.list("eta_list");
    let (mut deltas, mut ratios) = (vec![], vec![]);
    let kappa = cfg.number("kappa_ising");
    for &e in etas {
        let b = ising_budget(cfg.number("n0"), cfg.number("omega1"), kappa, kappa, e, None)?;
        ising.push(vec![e.into(), b.delta_opt.into(), b.delta_opt_analytic.into(), b.ratio_opt.into(), b.ratio_opt_analytic.into()]);
        deltas.push(b.delta_opt);
        ratios.push(b.ratio_opt);
    }
    if etas.len() >= 2 {
        rep.number("ising_ratio_exponent", log_log_slope(etas, &ratios));
        rep.number("ising_delta_exponent", log_log_slope(etas, &deltas));
    }
    rep.table(ising);

    let raman = cfg.number("raman");
    let grid = logspace(cfg.number("n_eta_min"), cfg.number("n_eta_max"), count(cfg, "n_eta_points")? as usize);
    let mut limits = Table::new("squeezing_limits.csv", &["n_eta", "xi2_cycling", "gt_cycling", "xi2_raman", "gt_raman"]);
    let (mut xc, mut xr) = (vec![], vec![]);
    for &x in &grid {
        let c = squeezing_limits(x, 1.0, raman, SqueezingMode::Measurement, true)?;
        let r = squeezing_limits(x, 1.0, raman, SqueezingMode::Measurement, false)?;
        limits.push(vec![x.into(), c.xi2_opt.into(), c.gamma_t_opt.into(), r.xi2_opt.into(), r.gamma_t_opt.into()]);
        xc.push(c.xi2_opt);
        xr.push(r.xi2_opt);
    }
    if grid.len() >= 2 {
        rep.number("squeezing_exponent_cycling", log_log_slope(&grid, &xc));
        rep.number("squeezing_exponent_raman", log_log_slope(&grid, &xr));
    }
    rep.table(limits);

    let d = cfg.number("twist_d");
    let mut twist = Table::new("twisting_geometry.csv", &["Q", "sigma2_sq", "sigma2_anti", "tilt", "sigma2_sq_interp"]);
    for q in linspace(0.0, cfg.number("twist_q_max"), count(cfg, "twist_points")? as usize) {
        let t = twisting_geometry(q, d)?;
        twist.push(vec![q.into(), t.sigma2_sq.into(), t.sigma2_anti.into(), t.tilt.into(), t.sigma2_sq_interp.into()]);
    }
    rep.table(twist);
    Ok(())
}
