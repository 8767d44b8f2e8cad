use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::clements::beamsplitter;
use super::ns::ns_gate;
use super::register::MultiRailRegister;
use crate::error::{invalid, Error, Result};
use crate::fock::{evolve, postselect, FockState, Interferometer, StateVector};
use crate::linalg::{binomial, CMatrix, ZERO};
use crate::qudit::one_level_cz;

/// Largest Fock basis the end-to-end verification will enumerate.
const VERIFY_BASIS_CAP: u64 = 200_000;

/// One stage of the cascade.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CascadeElement {
    /// Symmetric coupler `[[cos θ, −sin θ], [sin θ, cos θ]]` on `modes`.
    Beamsplitter { modes: (usize, usize), theta: f64 },
    /// NS gate on `mode` using the two ancilla modes (prepared `|1,0⟩`).
    Ns {
        mode: usize,
        ancillas: (usize, usize),
        phi: f64,
        success_probability: f64,
    },
}

/// The beamsplitter + NS construction of `CZ̄` on two multi-rail qudits.
///
/// Modes `0..d` hold the control, `d..2d` the target, and every NS gate owns
/// two further ancilla modes after that.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NaiveCzBar {
    pub d: usize,
    pub total_modes: usize,
    pub elements: Vec<CascadeElement>,
    pub success_probability: f64,
}

/// End-to-end check of a cascade against the ideal gate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CascadeVerification {
    /// Codespace process fidelity of the heralded map.
    pub fidelity: f64,
    /// Heralding probability for each computational input.
    pub probabilities: Vec<f64>,
    /// Largest heralded weight outside the codespace.
    pub leakage: f64,
}

/// Builds the cascade for `d ≥ 2`.
pub fn naive_czbar(d: usize) -> Result<NaiveCzBar> {
    if d < 2 {
        return Err(invalid(format!("qudit dimension must be at least 2, got {d}")));
    }
    let control = d - 1;
    let mut next_ancilla = 2 * d;
    let mut elements = Vec::with_capacity(4 * (d - 1));
    let mut probability = 1.0;
    for l in 1..d {
        let target = d + l;
        let gate = ns_gate(2.0 * PI * l as f64 / d as f64)?;
        elements.push(CascadeElement::Beamsplitter {
            modes: (control, target),
            theta: PI / 4.0,
        });
        for mode in [control, target] {
            elements.push(CascadeElement::Ns {
                mode,
                ancillas: (next_ancilla, next_ancilla + 1),
                phi: gate.phi,
                success_probability: gate.success_probability,
            });
            next_ancilla += 2;
            probability *= gate.success_probability;
        }
        elements.push(CascadeElement::Beamsplitter {
            modes: (control, target),
            theta: -PI / 4.0,
        });
    }
    Ok(NaiveCzBar {
        d,
        total_modes: next_ancilla,
        elements,
        success_probability: probability,
    })
}

impl NaiveCzBar {
    pub fn ns_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, CascadeElement::Ns { .. }))
            .count()
    }

    pub fn beamsplitter_count(&self) -> usize {
        self.elements.len() - self.ns_count()
    }

    pub fn ancilla_modes(&self) -> Vec<usize> {
        (2 * self.d..self.total_modes).collect()
    }

    /// Ancilla preparation, which is also the heralding pattern.
    pub fn ancilla_pattern(&self) -> Vec<u32> {
        (2 * self.d..self.total_modes)
            .map(|m| u32::from((m - 2 * self.d).is_multiple_of(2)))
            .collect()
    }

    /// The whole cascade as one interferometer on `total_modes` modes.
    pub fn interferometer(&self) -> Result<Interferometer> {
        let mut total = Interferometer::identity(self.total_modes);
        for e in &self.elements {
            let stage = match e {
                CascadeElement::Beamsplitter { modes, theta } => {
                    Interferometer::unitary(beamsplitter(*theta, 0.0))?
                        .embed(&[modes.0, modes.1], self.total_modes)?
                }
                CascadeElement::Ns {
                    mode, ancillas, phi, ..
                } => ns_gate(*phi)?
                    .interferometer()
                    .embed(&[*mode, ancillas.0, ancillas.1], self.total_modes)?,
            };
            total = total.then(&stage)?;
        }
        Ok(total)
    }

    /// Simulates every codeword input through the full Fock space and
    /// heralds on the ancilla pattern.
    pub fn verify(&self) -> Result<CascadeVerification> {
        let photons = 2 + self.ns_count() as u64;
        let size = binomial(self.total_modes as u64 + photons - 1, photons);
        if size > VERIFY_BASIS_CAP {
            return Err(Error::SizeCap {
                what: "cascade Fock basis",
                size: size as usize,
                cap: VERIFY_BASIS_CAP as usize,
            });
        }
        let ifm = self.interferometer()?;
        let reg = MultiRailRegister::new(2, self.d)?;
        let words = reg.codewords();
        let ancilla = FockState::new(self.ancilla_pattern());
        let anc_modes = self.ancilla_modes();
        let n = words.len();
        let mut process = CMatrix::zeros(n, n);
        let mut probabilities = Vec::with_capacity(n);
        let mut leakage: f64 = 0.0;
        for (c, w) in words.iter().enumerate() {
            let out = evolve(&ifm, &StateVector::basis_state(&w.concat(&ancilla)))?;
            let post = postselect(&out, &anc_modes, &self.ancilla_pattern())?;
            let p = post.probability();
            probabilities.push(p);
            let Some(state) = post.state() else { continue };
            let scale = Complex64::new(p.sqrt(), 0.0);
            let mut inside = 0.0;
            for (r, v) in words.iter().enumerate() {
                let a = state.amplitude(v);
                process[(r, c)] = a * scale;
                inside += a.norm_sqr();
            }
            leakage = leakage.max(p * (1.0 - inside));
        }
        let target = one_level_cz(self.d)?.into_matrix();
        let overlap = process
            .iter()
            .zip(target.iter())
            .fold(ZERO, |acc, (m, t)| acc + m.conj() * t);
        let norm = process.norm_squared() * target.norm_squared();
        let fidelity = if norm > 0.0 { overlap.norm_sqr() / norm } else { 0.0 };
        Ok(CascadeVerification {
            fidelity,
            probabilities,
            leakage,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_and_probability() {
        for d in 2..=4 {
            let c = naive_czbar(d).unwrap();
            assert_eq!(c.ns_count(), 2 * (d - 1));
            assert_eq!(c.beamsplitter_count(), 2 * (d - 1));
            assert!(c.success_probability <= 16f64.powi(-(d as i32 - 1)) + 1e-12);
        }
        let c = naive_czbar(2).unwrap();
        assert!((c.success_probability - 1.0 / 16.0).abs() < 1e-8);
        let c = naive_czbar(3).unwrap();
        assert!((c.success_probability - 0.0016).abs() < 1e-4);
        assert!(naive_czbar(1).is_err());
    }

    #[test]
    fn qubit_cascade_is_cz() {
        let c = naive_czbar(2).unwrap();
        let v = c.verify().unwrap();
        assert!(v.fidelity > 1.0 - 1e-10, "{}", v.fidelity);
        for p in &v.probabilities {
            assert!((p - c.success_probability).abs() < 1e-10);
        }
        assert!(v.leakage < 1e-12);
    }
}
