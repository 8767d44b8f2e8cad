//! Photonic qudits on linear optics.
//!
//! A `d`-level qudit is one photon spread over `d` modes. This crate
//! simulates such registers through bosonic Fock space, designs heralded
//! entangling gates, runs measurement patterns on qudit cluster states and
//! compares qubit and qudit encodings of graph coloring.
//!
//! - [`fock`]: permanents, Fock bases, interferometer evolution, postselection.
//! - [`qudit`]: Weyl operators, Fourier gate, controlled gates on `d`-level registers.
//! - [`multirail`]: the multi-rail encoding, Clements meshes, NS gates.
//! - [`synth`]: numerical synthesis of heralded gates.
//! - [`mbqc`]: cluster graphs, measurement patterns, Pauli frames.
//! - [`kcolor`]: coloring Hamiltonians, QAOA and cluster resource estimates.
//!
//! ```
//! use qudit_optics::multirail::ns_gate;
//!
//! let ns = ns_gate(std::f64::consts::PI)?;
//! assert!((ns.success_probability - 0.25).abs() < 1e-9);
//! # Ok::<(), qudit_optics::Error>(())
//! ```

pub mod error;
pub mod fock;
pub mod kcolor;
pub mod linalg;
pub mod mbqc;
pub mod multirail;
pub mod optim;
pub mod qudit;
pub mod synth;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/fock.md")]
pub mod book_fock {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/multirail.md")]
pub mod book_multirail {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/synthesis.md")]
pub mod book_synthesis {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/mbqc.md")]
pub mod book_mbqc {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/coloring.md")]
pub mod book_coloring {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod book_cli {}
