//! Multi-rail photonic qudits: one photon spread over `d` optical modes.
//!
//! Qudit `q` at level `l` occupies optical mode `q·d + l`. Single-qudit
//! unitaries compile to rectangular beamsplitter meshes; entangling gates
//! need postselected nonlinear phase shifts (NS gates).

mod cascade;
mod clements;
mod ns;
mod register;

pub use cascade::{naive_czbar, CascadeElement, CascadeVerification, NaiveCzBar};
pub use clements::{beamsplitter, clements_compile, Beamsplitter, BeamsplitterMesh};
pub use ns::{ns_gate, ns_matrix, ns_success_probability, NsGate, NsSimulation};
pub use register::{Decoded, MultiRailRegister};
