use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fock::{evolve, FockState, Interferometer, StateVector};
use crate::linalg::{CMatrix, ONE};
use crate::optim::golden_section_maximize;

const EDGE: f64 = 1e-9;

/// A postselected nonlinear phase shift `NS_φ` on one signal mode.
///
/// Mode 0 carries the signal; modes 1 and 2 are ancillas prepared in
/// `|1,0⟩` and heralded on `(1,0)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NsGate {
    pub phi: f64,
    #[serde(with = "crate::linalg::serde_cmatrix")]
    pub u: CMatrix,
    /// The free parameter `|U₁₂|` at the optimum.
    pub u12: f64,
    pub success_probability: f64,
}

/// Result of running the gate on `α₀|0⟩ + α₁|1⟩ + α₂|2⟩`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NsSimulation {
    /// Heralding probability for this input.
    pub probability: f64,
    /// Unnormalized heralded signal amplitudes.
    pub output: [Complex64; 3],
    /// Overlap with `α₀|0⟩ + α₁|1⟩ + e^{iφ}α₂|2⟩`, both normalized.
    pub fidelity: f64,
}

impl NsGate {
    pub fn interferometer(&self) -> Interferometer {
        Interferometer::unitary(self.u.clone()).expect("NS interferometer is unitary")
    }

    /// Heralded action on a signal with at most two photons, by Fock
    /// evolution of each photon-number sector.
    pub fn simulate(&self, alpha: [Complex64; 3]) -> Result<NsSimulation> {
        let ifm = self.interferometer();
        let mut output = [Complex64::new(0.0, 0.0); 3];
        for (n, out) in output.iter_mut().enumerate() {
            let s = FockState::new(vec![n as u32, 1, 0]);
            let evolved = evolve(&ifm, &StateVector::basis_state(&s))?;
            *out = alpha[n] * evolved.amplitude(&s);
        }
        let ideal = [alpha[0], alpha[1], alpha[2] * Complex64::from_polar(1.0, self.phi)];
        let norm = |v: &[Complex64; 3]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let probability = norm(&output);
        let overlap: Complex64 = ideal.iter().zip(&output).map(|(a, b)| a.conj() * b).sum();
        let fidelity = if probability > 0.0 {
            overlap.norm_sqr() / (probability * norm(&ideal))
        } else {
            0.0
        };
        Ok(NsSimulation {
            probability,
            output,
            fidelity,
        })
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if !phi.is_finite() || phi <= 0.0 || phi >= 2.0 * PI {
        let hint = if phi == 0.0 {
            "; φ = 0 is the identity and needs no ancillas"
        } else {
            ""
        };
        return Err(invalid(format!("NS phase must lie in (0, 2π), got {phi}{hint}")));
    }
    Ok(())
}

fn u11(phi: f64) -> Complex64 {
    ONE - (ONE - Complex64::from_polar(1.0, phi)).sqrt()
}

/// Upper end of the admissible `|U₁₂|` interval.
fn u12_max(phi: f64) -> f64 {
    (1.0 - u11(phi).norm_sqr()).max(0.0).sqrt()
}

/// Heralding probability as a function of `x = |U₁₂|`.
///
/// Returns 0 outside the open admissible interval.
pub fn ns_success_probability(phi: f64, x: f64) -> f64 {
    let a = u11(phi);
    let x2 = x * x;
    let u13_sq = 1.0 - a.norm_sqr() - x2;
    if x <= 0.0 || u13_sq <= 0.0 {
        return 0.0;
    }
    let first = ((a.conj() * (ONE - a) / x2 + ONE) * x).norm_sqr() / u13_sq;
    let second = (ONE - a).norm_sqr() / x2;
    1.0 / (first + second + 1.0)
}

/// The optimal-family interferometer at `x = |U₁₂|`, with `U₁₂` and `U₂₂` real.
pub fn ns_matrix(phi: f64, x: f64) -> Result<CMatrix> {
    check_phi(phi)?;
    let a = u11(phi);
    let u13_sq = 1.0 - a.norm_sqr() - x * x;
    if x <= 0.0 || u13_sq <= 0.0 {
        return Err(invalid(format!(
            "|U12| = {x} outside (0, {}) for φ = {phi}",
            u12_max(phi)
        )));
    }
    let sp = ns_success_probability(phi, x).sqrt();
    let (u12, u13) = (Complex64::new(x, 0.0), Complex64::new(u13_sq.sqrt(), 0.0));
    let u21 = sp * (ONE - a) / u12;
    let u22 = Complex64::new(sp, 0.0);
    let u23 = sp * (a.norm_sqr() - a.conj() - x * x) / (u12 * u13);
    let r1 = [a, u12, u13];
    let r2 = [u21, u22, u23];
    let r3: Vec<Complex64> = (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            (r1[j] * r2[k] - r1[k] * r2[j]).conj()
        })
        .collect();
    Ok(CMatrix::from_row_slice(
        3,
        3,
        &[r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], r3[0], r3[1], r3[2]],
    ))
}

/// The success-optimal NS gate for phase `phi ∈ (0, 2π)`.
pub fn ns_gate(phi: f64) -> Result<NsGate> {
    check_phi(phi)?;
    let hi = u12_max(phi) - EDGE;
    if hi <= EDGE {
        return Err(invalid(format!("φ = {phi} is too close to 0 to resolve an NS gate")));
    }
    let (x, p) = golden_section_maximize(|x| ns_success_probability(phi, x), EDGE, hi, 1e-10);
    Ok(NsGate {
        phi,
        u: ns_matrix(phi, x)?,
        u12: x,
        success_probability: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::postselect;
    use crate::linalg::random_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use crate::linalg::{cis, max_diff_up_to_phase, unitarity_defect};

    #[test]
    fn sign_flip_values() {
        let g = ns_gate(PI).unwrap();
        assert!((g.success_probability - 0.25).abs() < 1e-6);
        assert!((g.u[(0, 0)] - Complex64::new(1.0 - 2f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!(unitarity_defect(&g.u) < 1e-8);
    }

    #[test]
    fn bad_phases_rejected() {
        let err = ns_gate(0.0).unwrap_err().to_string();
        assert!(err.contains("identity"), "{err}");
        assert!(ns_gate(-1.0).is_err());
        assert!(ns_gate(2.0 * PI).is_err());
        assert!(ns_gate(f64::NAN).is_err());
    }

    #[test]
    fn optimum_is_local_and_global_on_a_grid() {
        for phi in [0.3, 1.0, 2.0 * PI / 3.0, PI, 4.0 * PI / 3.0, 5.5] {
            let g = ns_gate(phi).unwrap();
            let p = g.success_probability;
            for dx in [-1e-3, 1e-3] {
                assert!(ns_success_probability(phi, g.u12 + dx) <= p);
            }
            let hi = u12_max(phi);
            for k in 1..2000 {
                let x = hi * k as f64 / 2000.0;
                assert!(ns_success_probability(phi, x) <= p + 1e-12);
            }
            assert!(p <= 0.25 + 1e-9);
        }
    }

    #[test]
    fn probability_equals_row_two_weight() {
        for phi in [0.5, PI, 4.0] {
            let x = 0.6 * u12_max(phi);
            let u = ns_matrix(phi, x).unwrap();
            assert!(unitarity_defect(&u) < 1e-10);
            assert!((u[(1, 1)].re.powi(2) - ns_success_probability(phi, x)).abs() < 1e-12);
        }
    }

    // Fock simulation with ancillas |1,0⟩ and heralding on (1,0).
    #[test]
    fn simulated_action_is_nonlinear_phase() {
        for phi in [0.4, 2.0 * PI / 3.0, PI, 4.0 * PI / 3.0] {
            let g = ns_gate(phi).unwrap();
            let ifm = g.interferometer();
            let mut outs = Vec::new();
            for n in 0..=2u32 {
                let input = StateVector::basis_state(&FockState::new(vec![n, 1, 0]));
                let out = evolve(&ifm, &input).unwrap();
                let post = postselect(&out, &[1, 2], &[1, 0]).unwrap();
                assert!((post.probability() - g.success_probability).abs() < 1e-10);
                let s = post.state().unwrap();
                outs.push(s.amplitude(&FockState::new(vec![n])));
            }
            let want = [ONE, ONE, cis(phi)];
            assert!(max_diff_up_to_phase(&outs, &want) < 1e-8);
        }
    }

    #[test]
    fn random_inputs_get_the_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = ns_gate(PI).unwrap();
        for _ in 0..20 {
            let a = random_state(3, &mut rng);
            let sim = g.simulate([a[0], a[1], a[2]]).unwrap();
            assert!(sim.fidelity > 1.0 - 1e-10);
            assert!((sim.probability - 0.25).abs() < 1e-9);
        }
    }
}
