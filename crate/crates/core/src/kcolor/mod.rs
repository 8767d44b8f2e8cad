//! Graph k-coloring with QAOA, in a one-hot qubit encoding and natively on
//! `k`-level qudits, plus the photonic resource model comparing the two.

mod cluster;
mod hamiltonian;
mod instance;
mod layer;
mod qaoa;
mod resources;

pub use cluster::{cost_layer_pattern, verify_cost_layer_pattern};
pub use hamiltonian::{
    binary_cost, qubit_cost_hamiltonian, qubit_cost_split, qudit_cost_hamiltonian, CostHamiltonian,
    Formulation, QUBIT_CAP, QUBIT_LAYER_CAP, QUDIT_CAP,
};
pub use instance::{ColoringInstance, Graph};
pub use layer::{qubit_layer_unitary, qudit_layer_unitary, LayerUnitary, DENSE_CAP, LAYER_TOLERANCE};
pub use qaoa::{run_qaoa, Qaoa, QaoaConfig, QaoaReport};
pub use resources::{er_graph_sweep, resource_estimate, ResourceEstimate, SweepConfig, SweepRow};
