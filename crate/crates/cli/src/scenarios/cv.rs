use cavityspin::cv::{entanglement_entropy, epr_criterion, prepare_graph_state, GraphSpec};

use super::{count, int, list, Scenario};
use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Report, Table};

pub static GRAPH_STATE: Scenario = Scenario {
    name: "graph_state",
    summary: "continuous-variable cycle graph state: nullifiers, EPR witness and entanglement entropy",
    params: &[
        int("M", 4, "modes on the cycle"),
        list("r_list", &[0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0], "squeezing parameters"),
        int("epr_i", 0, "first mode of the EPR witness"),
        int("epr_j", 1, "second mode of the EPR witness"),
    ],
    run,
};

fn run(cfg: &ScenarioConfig, rep: &mut Report) -> CliResult<()> {
    let m = count(cfg, "M")? as usize;
    let graph = GraphSpec::cycle(m)?;
    let (i, j) = (cfg.integer("epr_i") as usize, cfg.integer("epr_j") as usize);
    if i >= m || j >= m || i == j {
        return Err(CliError::config(format!("EPR modes ({i}, {j}) must be distinct and below M = {m}")));
    }
    let rs = cfg.list("r_list");
    if rs.is_empty() {
        return Err(CliError::config("`r_list` is empty"));
    }
    let mut cols = vec!["r".to_string()];
    cols.extend((0..m).map(|k| format!("nullifier_{k}")));
    let mut null = Table::with_columns("nullifiers.csv", cols);
    let mut wit = Table::new("epr_entropy.csv", &["r", "v_sum", "theta", "entangled", "entropy_half", "entropy_complement"]);
    let half: Vec<usize> = (0..m / 2).collect();
    let rest: Vec<usize> = (m / 2..m).collect();
    let mut last = None;
    for &r in rs {
        let gs = prepare_graph_state(&graph, r)?;
        let mut row = vec![r.into()];
        row.extend(gs.nullifier_variances.iter().map(|&v| v.into()));
        null.push(row);
        let w = epr_criterion(&gs.state, i, j)?;
        let sa = entanglement_entropy(&gs.state, &half)?;
        let sb = entanglement_entropy(&gs.state, &rest)?;
        wit.push(vec![r.into(), w.v_sum.into(), w.theta.into(), w.entangled.into(), sa.into(), sb.into()]);
        last = Some(gs);
    }
    rep.table(null);
    rep.table(wit);
    let gs = last.expect("non-empty r_list");
    let angles: Vec<f64> = gs.prescription.modes.iter().map(|md| md.angle).collect();
    let eigenvalues: Vec<f64> = gs.prescription.modes.iter().map(|md| md.eigenvalue).collect();
    rep.scalar("prescription_angles", angles);
    rep.scalar("adjacency_eigenvalues", eigenvalues);
    rep.number("purity", gs.state.purity());
    rep.file("covariance.csv", gs.state.to_csv());
    rep.file("covariance.json", serde_json::to_string_pretty(&gs.state.to_json()).expect("serializable") + "\n");
    Ok(())
}
