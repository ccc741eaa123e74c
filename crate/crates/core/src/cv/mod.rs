//! Gaussian continuous-variable states and graph-state compilation.

mod graph;
mod state;

pub use graph::{
    entanglement_entropy, epr_criterion, local_ops, nullifier_variances, prepare_graph_state,
    prescription_from_adjacency, squeeze_collective_mode, CollectiveMode, EprWitness, GraphSpec, GraphState, LocalOp,
    SqueezingPrescription,
};
pub use state::{symplectic_defect, symplectic_form, CovarianceState};
