//! Numerical synthesis of heralded linear-optical gates.
//!
//! A gate `T` on computational Fock states is sought as an interferometer `u`
//! on computational, single-photon ancilla and vacuum ancilla modes, such
//! that heralding the ancillas on `|1⟩^{N_a}|0⟩^{N_v}` applies `e^{iφ}√P·T`.
//! The optimizer maximizes `L = F + λP + σC` over unconstrained complex `u`.

mod objective;
mod problem;
mod search;
mod synthesize;

pub use objective::{build_u_tilde, objective, Evaluation, Objective};
pub use problem::{NamedTarget, SynthesisProblem};
pub use search::{ancilla_search, SearchEntry};
pub use synthesize::{
    restart, synthesize, verify, RestartOutcome, StageRecord, SynthesisResult, SynthesisStatus,
    Verification,
};
