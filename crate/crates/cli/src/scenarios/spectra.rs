use cavityspin::hamiltonians::{excitation_number, h_tavis_cummings};
use cavityspin::qnd::vacuum_rabi_spectrum;
use cavityspin::SpinSpace;

use super::{count, int, linspace, list, num, req, Kind, Scenario};
use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Report, Table};

pub static JC_SPECTRUM: Scenario = Scenario {
    name: "jc_spectrum",
    summary: "vacuum Rabi splitting of N atoms in a cavity and excitation-number conservation",
    params: &[
        req("g", Kind::Number, "single-atom coupling"),
        list("N_list", &[1.0, 16.0], "atom numbers"),
        num("kappa", 0.1, "cavity linewidth"),
        num("gamma", 0.1, "atomic linewidth"),
        num("span", 4.0, "half-width of the detuning window in units of g*sqrt(N)"),
        int("points", 2001, "detuning samples per spectrum"),
        int("n_max", 6, "Fock cutoff for the conservation check"),
    ],
    run,
};

fn run(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let g = cfg.number("g");
    let (kappa, gamma) = (cfg.number("kappa"), cfg.number("gamma"));
    let points = count(cfg, "points")? as usize;
    let n_max = cfg.integer("n_max") as usize;
    let mut summary = Table::new("splitting.csv", &["N", "splitting", "expected", "rel_error", "excitation_commutator"]);
    for &nf in cfg.list("N_list") {
        if nf < 1.0 || nf.fract() != 0.0 || nf > 1e6 {
            return Err(CliError::config(format!("N_list entries must be positive integers, got {nf}")));
        }
        let n = nf as u32;
        let half = cfg.number("span") * g * nf.sqrt();
        let grid = linspace(-half, half, points);
        let spec = vacuum_rabi_spectrum(g, n, kappa, gamma, &grid)?;
        let mut curve = Table::new(format!("transmission_N{n}.csv"), &["detuning", "transmission"]);
        for (d, t) in spec.detuning.iter().zip(&spec.transmission) {
            curve.push(vec![(*d).into(), (*t).into()]);
        }
        rep.table(curve);

        let spin = SpinSpace::from_atoms(n);
        let h = h_tavis_cummings(g, 0.0, spin, n_max)?;
        let comm = h.commutator(&excitation_number(spin, n_max)?).max_abs();
        let expected = 2.0 * g * nf.sqrt();
        let split = spec.splitting.unwrap_or(f64::NAN);
        summary.push(vec![n.into(), split.into(), expected.into(), (split / expected - 1.0).abs().into(), comm.into()]);
        rep.number(&format!("splitting_N{n}"), split);
        rep.number(&format!("excitation_commutator_N{n}"), comm);
    }
    rep.table(summary);
    Ok(())
}
