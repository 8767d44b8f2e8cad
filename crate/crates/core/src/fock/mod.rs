//! Bosonic Fock-space simulation of linear interferometers.
//!
//! An interferometer `u` acts on single photons as the matrix `u` itself
//! (`|e_j⟩ ↦ Σ_i u_ij |e_i⟩`). Multi-photon transition amplitudes are
//! normalized permanents,
//!
//! ```text
//! ⟨m| U |n⟩ = Per(u[m, n]) / sqrt(∏ m_i! ∏ n_j!)
//! ```
//!
//! where `u[m, n]` repeats row `i` of `u` `m_i` times and column `j` `n_j`
//! times. With this normalization the Fock-space representation of a unitary
//! `u` is itself unitary.

mod evolve;
mod permanent;
mod state;

pub use evolve::{
    evolve, fock_amplitude, postselect, transition_matrix, AmplitudeKernel, FockSuperposition,
    Interferometer, Postselection, StateVector,
};
pub use permanent::{permanent, permanent_unchecked};
pub use state::{FockBasis, FockState};
