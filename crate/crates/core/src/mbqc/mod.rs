//! Measurement-based computation on qudit cluster states.
//!
//! A cluster is a graph of qudits joined by `CZ` or `CZ†` edges and grouped
//! into logical wires. Measuring a wire node in the basis `P(θ)` followed by
//! `H†` (on a `CZ` edge) or `H` (on a `CZ†` edge) teleports its state to the
//! next node as `H P(θ)` or `H† P(θ)` up to an `X^m` byproduct. Byproducts
//! are tracked as Pauli frames and absorbed into later angles.

mod compile;
mod graph;
mod pattern;
mod run;
mod state;

pub use compile::{compile_zz_rotation, cx_phase_cx_dagger, PatternBuilder};
pub use graph::{prepare_cluster, ClusterGraph, Edge};
pub use pattern::{adapt_angles, Measurement, MeasurementBasis, MeasurementPattern, PauliFrame};
pub use run::{
    measure_node, run_pattern, run_pattern_with_outcomes, MeasurementRecord, PatternRun,
};
pub use state::QuditState;

/// Largest register (`d^{nodes}`) the simulator will hold at once.
pub const REGISTER_CAP: usize = 59_049;
