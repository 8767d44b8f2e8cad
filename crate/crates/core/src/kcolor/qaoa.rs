use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{
    is_proper_state, qubit_cost_hamiltonian, qudit_cost_hamiltonian, CostHamiltonian, Formulation,
};
use super::instance::ColoringInstance;
use crate::error::{invalid, Result};
use crate::linalg::{cis, CMatrix, ZERO};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::qudit::hadamard;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaConfig {
    pub formulation: Formulation,
    /// Number of layers.
    pub p: usize,
    /// Objective evaluations allowed to the outer optimizer.
    pub budget: usize,
    pub seed: u64,
    /// Range `r` of the qudit mixer `Σ_{i=1}^r (X^i + X^{†i})`.
    #[serde(default = "default_range")]
    pub mixer_range: usize,
}

fn default_range() -> usize {
    1
}

impl Default for QaoaConfig {
    fn default() -> Self {
        Self {
            formulation: Formulation::Qudit,
            p: 1,
            budget: 500,
            seed: 0,
            mixer_range: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaReport {
    pub config: QaoaConfig,
    /// Mixer angles `α`.
    pub alpha: Vec<f64>,
    /// Cost angles `β`.
    pub beta: Vec<f64>,
    pub initial_alpha: Vec<f64>,
    pub initial_beta: Vec<f64>,
    pub initial_energy: f64,
    pub energy: f64,
    pub ground_energy: f64,
    /// Probability mass on proper colorings at the returned angles.
    pub success_probability: f64,
    /// The same mass for the uniform starting state.
    pub baseline_probability: f64,
    pub evaluations: usize,
    /// Best energy after each evaluation.
    pub energy_trace: Vec<f64>,
}

/// Statevector QAOA for one instance and formulation.
///
/// The one-hot cost only ranks colorings lowest when
/// [`ColoringInstance::penalty_dominates`] holds. Nothing here checks it.
pub struct Qaoa {
    formulation: Formulation,
    sites: usize,
    d: usize,
    cost: CostHamiltonian,
    proper: Vec<bool>,
    mixer_eigenvalues: Vec<f64>,
    fourier: CMatrix,
}

impl Qaoa {
    pub fn new(inst: &ColoringInstance, formulation: Formulation, mixer_range: usize) -> Result<Self> {
        let (cost, sites, d) = match formulation {
            Formulation::Qubit => (qubit_cost_hamiltonian(inst)?, inst.k * inst.vertex_count(), 2),
            Formulation::Qudit => (qudit_cost_hamiltonian(inst)?, inst.vertex_count(), inst.k),
        };
        if mixer_range == 0 {
            return Err(invalid("mixer range must be at least 1"));
        }
        let proper = (0..cost.len()).map(|x| is_proper_state(inst, formulation, x)).collect();
        // Both mixers are circulant on one site, so the Fourier gate
        // diagonalizes them. The qubit mixer X has eigenvalues ±1.
        let mixer_eigenvalues = match formulation {
            Formulation::Qubit => vec![1.0, -1.0],
            Formulation::Qudit => (0..d)
                .map(|j| {
                    (1..=mixer_range)
                        .map(|i| 2.0 * (2.0 * PI * (i * j) as f64 / d as f64).cos())
                        .sum()
                })
                .collect(),
        };
        Ok(Self {
            formulation,
            sites,
            d,
            cost,
            proper,
            mixer_eigenvalues,
            fourier: hadamard(d)?.into_matrix(),
        })
    }

    pub fn cost(&self) -> &CostHamiltonian {
        &self.cost
    }

    /// `exp(iα h)` for the single-site mixer term `h`.
    pub fn mixer_unitary(&self, alpha: f64) -> CMatrix {
        let n = self.d;
        let phases = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                cis(alpha * self.mixer_eigenvalues[i])
            } else {
                ZERO
            }
        });
        // X = H† Z H, so h = H† diag(λ) H.
        self.fourier.adjoint() * phases * &self.fourier
    }

    /// State after the layers; layer `n` applies `e^{iβ_n H_C}` and then
    /// `e^{iα_n H_M}`.
    pub fn state(&self, alpha: &[f64], beta: &[f64]) -> Vec<Complex64> {
        let size = self.cost.len();
        let amp = Complex64::new((size as f64).sqrt().recip(), 0.0);
        let mut psi = vec![amp; size];
        let mut buf = vec![ZERO; self.d];
        for (&a, &b) in alpha.iter().zip(beta) {
            for (z, &e) in psi.iter_mut().zip(&self.cost.diagonal) {
                *z *= cis(b * e);
            }
            let m = self.mixer_unitary(a);
            for site in 0..self.sites {
                let s = self.d.pow((self.sites - 1 - site) as u32);
                for base in 0..size {
                    if !(base / s).is_multiple_of(self.d) {
                        continue;
                    }
                    for (k, v) in buf.iter_mut().enumerate() {
                        *v = psi[base + k * s];
                    }
                    for r in 0..self.d {
                        psi[base + r * s] = (0..self.d).map(|c| m[(r, c)] * buf[c]).sum();
                    }
                }
            }
        }
        psi
    }

    pub fn energy(&self, psi: &[Complex64]) -> f64 {
        psi.iter().zip(&self.cost.diagonal).map(|(z, e)| z.norm_sqr() * e).sum()
    }

    pub fn success_probability(&self, psi: &[Complex64]) -> f64 {
        psi.iter().zip(&self.proper).filter(|(_, &ok)| ok).map(|(z, _)| z.norm_sqr()).sum()
    }

    /// Ground states of the cost and how many of them are proper colorings.
    pub fn proper_ground_states(&self, tol: f64) -> (usize, usize) {
        let g = self.cost.ground_states(tol);
        let proper = g.iter().filter(|&&x| self.proper[x]).count();
        (g.len(), proper)
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }
}

/// Minimizes `⟨H_C⟩` over `(α, β)` with Nelder–Mead from a seeded random
/// start. The returned energy never exceeds the starting one.
pub fn run_qaoa(inst: &ColoringInstance, config: &QaoaConfig) -> Result<QaoaReport> {
    let q = Qaoa::new(inst, config.formulation, config.mixer_range)?;
    let p = config.p;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let x0: Vec<f64> = (0..2 * p).map(|_| rng.random_range(0.0..PI / 2.0)).collect();
    let split = |x: &[f64]| (x[..p].to_vec(), x[p..].to_vec());
    let objective = |x: &[f64]| {
        let (a, b) = split(x);
        q.energy(&q.state(&a, &b))
    };
    let report = nelder_mead(
        objective,
        &x0,
        &NelderMeadOptions {
            max_evaluations: config.budget.max(1),
            ..Default::default()
        },
    );
    let (alpha, beta) = split(&report.x);
    let (initial_alpha, initial_beta) = split(&x0);
    let psi = q.state(&alpha, &beta);
    let baseline = q.state(&[], &[]);
    Ok(QaoaReport {
        config: config.clone(),
        alpha,
        beta,
        initial_alpha,
        initial_beta,
        initial_energy: report.initial_value,
        energy: q.energy(&psi),
        ground_energy: q.cost.ground_energy(),
        success_probability: q.success_probability(&psi),
        baseline_probability: q.success_probability(&baseline),
        evaluations: report.evaluations,
        energy_trace: report.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kcolor::Graph;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn triangle(k: usize) -> ColoringInstance {
        ColoringInstance::new(Graph::complete(3), k).unwrap()
    }

    #[test]
    fn mixer_matches_symmetric_eigensolver() {
        for (d, r) in [(2, 1), (3, 1), (4, 1), (5, 2), (4, 2)] {
            let inst = ColoringInstance::new(Graph::path(2), d).unwrap();
            let q = Qaoa::new(&inst, Formulation::Qudit, r).unwrap();
            let h = DMatrix::<f64>::from_fn(d, d, |a, b| {
                (1..=r)
                    .map(|i| {
                        let up = ((b + i) % d == a) as u8 as f64;
                        let down = ((b + d - i % d) % d == a) as u8 as f64;
                        up + down
                    })
                    .sum()
            });
            let eig = SymmetricEigen::new(h);
            let alpha = 0.73;
            let want = CMatrix::from_fn(d, d, |a, b| {
                (0..d)
                    .map(|j| {
                        cis(alpha * eig.eigenvalues[j]) * eig.eigenvectors[(a, j)] * eig.eigenvectors[(b, j)]
                    })
                    .sum()
            });
            assert!((q.mixer_unitary(alpha) - want).camax() < 1e-12, "d = {d}, r = {r}");
        }
    }

    #[test]
    fn zero_layers_give_uniform_baseline() {
        let q = Qaoa::new(&triangle(3), Formulation::Qudit, 1).unwrap();
        let psi = q.state(&[], &[]);
        assert!((q.success_probability(&psi) - 6.0 / 27.0).abs() < 1e-12);
        let cfg = QaoaConfig {
            p: 0,
            ..Default::default()
        };
        let r = run_qaoa(&triangle(3), &cfg).unwrap();
        assert!((r.success_probability - 6.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn states_stay_normalized() {
        for f in [Formulation::Qubit, Formulation::Qudit] {
            let q = Qaoa::new(&triangle(3), f, 1).unwrap();
            let psi = q.state(&[0.3, 1.2], &[0.9, -0.4]);
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_budget_evaluates_start_only() {
        let cfg = QaoaConfig {
            p: 2,
            budget: 0,
            ..Default::default()
        };
        let r = run_qaoa(&triangle(3), &cfg).unwrap();
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.alpha, r.initial_alpha);
        assert!((r.energy - r.initial_energy).abs() < 1e-12);
    }

    #[test]
    fn optimizer_never_worsens_energy() {
        for f in [Formulation::Qubit, Formulation::Qudit] {
            for seed in 0..3 {
                let cfg = QaoaConfig {
                    formulation: f,
                    p: 1,
                    budget: 60,
                    seed,
                    mixer_range: 1,
                };
                let r = run_qaoa(&triangle(3), &cfg).unwrap();
                assert!(r.energy <= r.initial_energy + 1e-12);
            }
        }
    }

    #[test]
    fn both_formulations_agree_on_ground_states() {
        let inst = ColoringInstance::with_weights(Graph::complete(3), 3, 3.0, 1.0).unwrap();
        let qb = Qaoa::new(&inst, Formulation::Qubit, 1).unwrap();
        let qd = Qaoa::new(&inst, Formulation::Qudit, 1).unwrap();
        assert_eq!(qb.cost().ground_energy(), 0.0);
        assert!(qd.cost().ground_energy().abs() < 1e-12);
        let gb = qb.cost().ground_states(1e-12);
        let gd = qd.cost().ground_states(1e-9);
        assert_eq!(gb.len(), 6);
        assert_eq!(gd.len(), 6);
        assert!(gb.iter().all(|&x| qb.proper[x]));
        assert!(gd.iter().all(|&x| qd.proper[x]));
    }
}
