
use cavityspin::floquet::{
    bit_reversed_order, builder_mobius, builder_sachdev_ye, builder_tree, coarse_grain_tree, corr_to_geometry,
    couplings_to_spectrum, gaussian_quench, magnon_dispersion, matrix_to_csv, spectrum_to_couplings, Boundary,
    DistanceTable, ModulationSpectrum, Tone,
};
use cavityspin::linalg::symmetric_eigh;

use super::{choice, count, int, linspace, list, num, Scenario};
use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Report, Table};

pub static FLOQUET_GRAPH: Scenario = Scenario {
    name: "floquet_graph",
    summary: "coupling graph programmed by drive tones: matrix, tone spectrum and magnon dispersion",
    params: &[
        int("M", 18, "number of sites"),
        choice("builder", "mobius", &["mobius", "tones"], "Mobius ladder or explicit tone list"),
        num("j_rail", 1.0, "rail coupling (distance 1) of the Mobius ladder"),
        num("j_rung", -1.0, "rung coupling (distance M/2) of the Mobius ladder"),
        num("omega_b", 10.0, "gradient frequency omega_B"),
        choice("boundary", "periodic", &["open", "periodic"], "boundary rule for builder = tones"),
        list("tone_r", &[], "tone distances for builder = tones"),
        list("tone_amp", &[], "tone amplitudes"),
        list("tone_phase", &[], "tone phases (rad)"),
    ],
    run: run_floquet_graph,
};

fn tones_from_lists(cfg: &ScenarioConfig) -> CliResult<Vec<Tone>> {
    let (r, a, p) = (cfg.list("tone_r"), cfg.list("tone_amp"), cfg.list("tone_phase"));
    if r.len() != a.len() || r.len() != p.len() {
        return Err(CliError::config("tone_r, tone_amp and tone_phase must have the same length"));
    }
    r.iter()
        .zip(a)
        .zip(p)
        .map(|((&r, &amp), &phase)| {
            if r >= 1.0 && r.fract() == 0.0 {
                Ok(Tone { r: r as usize, amp, phase })
            } else {
                Err(CliError::config(format!("tone distances must be positive integers, got {r}")))
            }
        })
        .collect()
}

fn run_floquet_graph(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let m = count(cfg, "M")? as usize;
    let omega_b = cfg.number("omega_b");
    let (spec, boundary, built) = if cfg.text("builder") == "mobius" {
        if m % 2 != 0 {
            return Err(CliError::config("the Mobius ladder needs an even M"));
        }
        let j = builder_mobius(m, cfg.number("j_rail"), cfg.number("j_rung"))?;
        let table: DistanceTable = [(1, cfg.number("j_rail")), (m / 2, cfg.number("j_rung"))].into_iter().collect();
        (couplings_to_spectrum(&table, omega_b)?, Boundary::Periodic, Some(j))
    } else {
        let boundary = if cfg.text("boundary") == "open" { Boundary::Open } else { Boundary::Periodic };
        (ModulationSpectrum::new(omega_b, tones_from_lists(cfg)?)?, boundary, None)
    };
    let programmed = spectrum_to_couplings(&spec, m, boundary)?;
    let j = built.unwrap_or_else(|| programmed.couplings.clone());
    rep.number("programmed_vs_builder", (programmed.couplings.matrix() - j.matrix()).amax());
    let back = couplings_to_spectrum(&spec.table(), omega_b)?;
    rep.scalar("round_trip_exact", back == spec);
    rep.scalar("rwa_valid", programmed.rwa_valid);
    let mut distances: Vec<usize> = j.bonds().iter().map(|&(a, b, _)| a.abs_diff(b)).collect();
    distances.sort_unstable();
    distances.dedup();
    rep.scalar("bond_index_distances", distances);

    rep.file("couplings.csv", j.to_csv());
    rep.file("couplings.json", serde_json::to_string_pretty(&j.to_json()).expect("serializable") + "\n");
    rep.file("spectrum.json", serde_json::to_string_pretty(&spec.to_json()).expect("serializable") + "\n");
    if boundary == Boundary::Periodic {
        let disp = magnon_dispersion(&spec.table(), m, boundary)?;
        let mut t = Table::new("dispersion.csv", &["k", "energy"]);
        for (k, e) in disp.k.iter().zip(&disp.energy) {
            t.push(vec![(*k).into(), (*e).into()]);
        }
        rep.table(t);
    }
    Ok(())
}

pub static QUENCH_GEOMETRY: Scenario = Scenario {
    name: "quench_geometry",
    summary: "Gaussian quench on a power-law tree graph, correlation hierarchy and emergent geometry",
    params: &[
        num("s", 0.5, "tree exponent"),
        int("M", 16, "number of sites (power of two)"),
        num("q", 0.5, "on-site frequency"),
        num("t", 0.3, "quench duration"),
        int("points", 31, "time samples"),
    ],
    run: run_quench_geometry,
};

fn run_quench_geometry(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let m = count(cfg, "M")? as usize;
    let j = builder_tree(cfg.number("s"), m)?;
    let t_final = cfg.number("t");
    if !(t_final > 0.0) {
        return Err(CliError::config("`t` must be positive"));
    }
    let times = linspace(0.0, t_final, count(cfg, "points")?.max(2) as usize);
    let track = gaussian_quench(&j, cfg.number("q"), &times)?;
    rep.number("symplectic_defect", track.symplectic_defect);
    rep.number("instability_rate", track.instability_rate);
    rep.scalar("unstable", track.unstable);

    let far = m / 2;
    let mut curve = Table::new("correlations_vs_t.csv", &["t", "c_self", "c_nearest", "c_half"]);
    for (t, c) in times.iter().zip(&track.cxx) {
        curve.push(vec![(*t).into(), c[(0, 0)].into(), c[(0, 1.min(m - 1))].into(), c[(0, far)].into()]);
    }
    rep.table(curve);

    let c = track.cxx.last().expect("at least one time");
    rep.file("cxx_final.csv", matrix_to_csv(c));
    let tree = coarse_grain_tree(c)?;
    let mut merges = Table::new("merges.csv", &["step", "left", "right", "strength"]);
    for (k, mg) in tree.merges.iter().enumerate() {
        merges.push(vec![k.into(), mg.left.into(), mg.right.into(), mg.strength.into()]);
    }
    rep.table(merges);
    let pairs = tree.leaf_pairs();
    rep.scalar("leaf_pair_distances", pairs.iter().map(|(a, b)| a.abs_diff(*b)).collect::<Vec<_>>());
    rep.scalar("leaf_order", tree.leaf_order());
    if let Some(order) = bit_reversed_order(m) {
        rep.scalar("leaf_order_is_bit_reversed", tree.leaf_order() == order);
    }

    let geom = corr_to_geometry(c)?;
    rep.number("mds_stress", geom.stress);
    let mut eig = Table::new("mds_eigenvalues.csv", &["index", "eigenvalue"]);
    for (k, e) in geom.eigenvalues.iter().enumerate() {
        eig.push(vec![k.into(), (*e).into()]);
    }
    rep.table(eig);
    let mut emb = Table::new("embedding.csv", &["site", "x", "y", "z"]);
    for (i, p) in geom.embedding.iter().enumerate() {
        emb.push(vec![i.into(), p[0].into(), p[1].into(), p[2].into()]);
    }
    rep.table(emb);
    rep.file("distances.csv", matrix_to_csv(&geom.distances));
    Ok(())
}

pub static SY_BUILD: Scenario = Scenario {
    name: "sy_build",
    summary: "seeded all-to-all Gaussian random couplings and their spectrum",
    params: &[
        int("M", 32, "number of sites"),
        num("variance", 1.0, "coupling variance times M"),
    ],
    run: run_sy_build,
};

fn run_sy_build(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let m = count(cfg, "M")? as usize;
    let j = builder_sachdev_ye(m, cfg.number("variance"), cfg.seed)?;
    let vals: Vec<f64> = j.bonds().iter().map(|b| b.2).collect();
    let pairs = (m * (m - 1) / 2) as f64;
    // bonds() skips exact zeros, which have probability zero here
    let mean = vals.iter().sum::<f64>() / pairs;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (pairs - 1.0).max(1.0);
    rep.number("mean", mean);
    rep.number("variance_times_m", var * m as f64);
    let (eigs, _) = symmetric_eigh(j.matrix());
    let mut t = Table::new("eigenvalues.csv", &["index", "eigenvalue"]);
    for (k, e) in eigs.iter().enumerate() {
        t.push(vec![k.into(), (*e).into()]);
    }
    rep.table(t);
    rep.number("largest_eigenvalue", eigs.max());
    // couplings have variance var/M, so the semicircle edge sits at 2 sqrt(var)
    rep.number("semicircle_edge", 2.0 * cfg.number("variance").sqrt());
    rep.file("couplings.csv", j.to_csv());
    Ok(())
}
