use cavityspin::dynamics::mean_field_dicke;

use super::{count, int, linspace, num, Scenario};
use crate::config::ScenarioConfig;
use crate::error::CliResult;
use crate::output::{Report, Table};

pub static DICKE_MEANFIELD: Scenario = Scenario {
    name: "dicke_meanfield",
    summary: "mean-field superradiant transition of the Dicke model",
    params: &[
        num("omega0", 1.0, "atomic splitting"),
        num("omega_c", 1.0, "cavity frequency"),
        num("S", 10.0, "collective spin length"),
        num("g_max_ratio", 3.0, "largest coupling in units of the threshold estimate"),
        int("points", 61, "coupling samples"),
    ],
    run,
};

fn run(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let (w0, wc, s) = (cfg.number("omega0"), cfg.number("omega_c"), cfg.number("S"));
    // normal-phase stability boundary of the linearized equations
    let closed = (w0 * wc / (8.0 * s)).sqrt();
    let grid = linspace(0.0, cfg.number("g_max_ratio") * closed, count(cfg, "points")? as usize);
    let mf = mean_field_dicke(w0, wc, &grid, s)?;
    let mut t = Table::new(
        "order_parameter.csv",
        &["g", "alpha_plus", "alpha_minus", "sx_plus", "sz_plus", "sx_minus", "sz_minus", "iterations"],
    );
    for p in &mf.points {
        t.push(vec![
            p.coupling.into(),
            p.alpha[0].into(),
            p.alpha[1].into(),
            p.spin[0][0].into(),
            p.spin[0][2].into(),
            p.spin[1][0].into(),
            p.spin[1][2].into(),
            p.iterations.into(),
        ]);
    }
    rep.table(t);
    rep.number("threshold", mf.threshold);
    rep.number("threshold_linear_stability", closed);
    rep.number("threshold_rel_diff", (mf.threshold / closed - 1.0).abs());
    Ok(())
}
