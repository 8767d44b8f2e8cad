use serde::{Deserialize, Serialize};

use super::problem::SynthesisProblem;
use super::synthesize::{synthesize, SynthesisResult, SynthesisStatus};
use crate::error::Result;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchEntry {
    pub ancilla_photons: usize,
    pub vacuum_modes: usize,
    pub result: SynthesisResult,
}

impl SearchEntry {
    pub fn succeeded(&self) -> bool {
        self.result.status == SynthesisStatus::Verified
    }
}

/// Sweeps ancilla budgets downward from `(na_max, nv_max)`.
///
/// Order: `N_a` from `na_max` down to 0, and for each `N_a`, `N_v` from
/// `nv_max` down to 0. A solution with fewer ancillas embeds into any larger
/// budget (extra ancillas pass straight through), so once a budget fails the
/// inner sweep stops, and once `(N_a, nv_max)` fails the whole sweep stops.
/// Every other setting of `template` (schedule, restarts, seed) is reused.
pub fn ancilla_search(
    template: &SynthesisProblem,
    na_max: usize,
    nv_max: usize,
) -> Result<Vec<SearchEntry>> {
    let mut entries = Vec::new();
    for na in (0..=na_max).rev() {
        for nv in (0..=nv_max).rev() {
            let problem = SynthesisProblem {
                ancilla_photons: na,
                vacuum_modes: nv,
                ..template.clone()
            };
            problem.validate()?;
            let entry = SearchEntry {
                ancilla_photons: na,
                vacuum_modes: nv,
                result: synthesize(&problem)?,
            };
            let ok = entry.succeeded();
            entries.push(entry);
            if !ok {
                if nv == nv_max {
                    return Ok(entries);
                }
                break;
            }
        }
    }
    Ok(entries)
}
