//! Local optimizers used across the crate.

mod golden;
mod lm;
mod nelder_mead;
mod trust_region;

pub use golden::golden_section_maximize;
pub use lm::{levenberg_marquardt, LmOptions, LmReport};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadReport};
pub use trust_region::{minimize, Termination, TrustRegionOptions, TrustRegionReport};
