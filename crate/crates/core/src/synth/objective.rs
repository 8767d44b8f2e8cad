use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::problem::SynthesisProblem;
use crate::error::{Error, Result};
use crate::fock::{AmplitudeKernel, FockBasis, FockState};
use crate::linalg::{CMatrix, ZERO};

/// Value of the synthesis objective and its parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// `L = F + λP + σC`
    pub objective: f64,
    pub fidelity: f64,
    pub probability: f64,
    pub constraint: f64,
}

/// Precomputed amplitude kernels for the heralded sub-matrix `Ũ`.
///
/// Rows are every computational Fock state whose photon number occurs among
/// the inputs; columns are the inputs. Both carry the heralding pattern on
/// the ancilla modes.
#[derive(Clone, Debug)]
pub struct Objective {
    modes: usize,
    rows: Vec<FockState>,
    cols: usize,
    kernels: Vec<(usize, usize, AmplitudeKernel)>,
    target: CMatrix,
    target_norm: f64,
}

impl Objective {
    pub fn new(problem: &SynthesisProblem) -> Result<Self> {
        problem.validate()?;
        let m = problem.computational_modes();
        let ancilla = problem.ancilla_pattern();
        let rows: Vec<FockState> = problem
            .photon_numbers()
            .into_iter()
            .flat_map(|n| FockBasis::shared(m, n).states().to_vec())
            .collect();
        let cols = problem.inputs.len();
        let mut kernels = Vec::new();
        let mut target = CMatrix::zeros(rows.len(), cols);
        for (r, out) in rows.iter().enumerate() {
            let full_out = out.concat(&ancilla);
            let in_target = problem.inputs.iter().position(|s| s == out);
            for (c, input) in problem.inputs.iter().enumerate() {
                if let Some(k) = AmplitudeKernel::new(&input.concat(&ancilla), &full_out) {
                    kernels.push((r, c, k));
                }
                if let Some(i) = in_target {
                    target[(r, c)] = problem.target[(i, c)];
                }
            }
        }
        Ok(Self {
            modes: problem.total_modes(),
            rows,
            cols,
            target_norm: target.norm_squared(),
            kernels,
            target,
        })
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    /// Computational output states indexing the rows of `Ũ`.
    pub fn row_states(&self) -> &[FockState] {
        &self.rows
    }

    /// The zero-padded target on the same rows and columns as `Ũ`.
    pub fn padded_target(&self) -> &CMatrix {
        &self.target
    }

    fn check(&self, u: &CMatrix) -> Result<()> {
        if u.nrows() != self.modes || u.ncols() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: if u.nrows() != self.modes { u.nrows() } else { u.ncols() },
            });
        }
        Ok(())
    }

    pub fn u_tilde(&self, u: &CMatrix) -> Result<CMatrix> {
        self.check(u)?;
        let mut a = CMatrix::zeros(self.rows.len(), self.cols);
        for (r, c, k) in &self.kernels {
            a[(*r, *c)] = k.amplitude(u);
        }
        Ok(a)
    }

    fn parts(&self, a: &CMatrix, u: &CMatrix, lambda: f64, sigma: f64) -> (Evaluation, Complex64, f64) {
        let overlap = a
            .iter()
            .zip(self.target.iter())
            .fold(ZERO, |acc, (x, t)| acc + x.conj() * t);
        let weight = a.norm_squared();
        let fidelity = if weight > 0.0 {
            overlap.norm_sqr() / (weight * self.target_norm)
        } else {
            0.0
        };
        let probability = weight / self.target_norm;
        let n = u.nrows();
        let defect = u * u.adjoint() - CMatrix::identity(n, n);
        let constraint = -defect.norm_squared();
        let eval = Evaluation {
            objective: fidelity + lambda * probability + sigma * constraint,
            fidelity,
            probability,
            constraint,
        };
        (eval, overlap, weight)
    }

    pub fn evaluate(&self, u: &CMatrix, lambda: f64, sigma: f64) -> Result<Evaluation> {
        let a = self.u_tilde(u)?;
        Ok(self.parts(&a, u, lambda, sigma).0)
    }

    /// Also writes `∂L/∂Re u + i·∂L/∂Im u` into `grad`.
    pub fn evaluate_with_gradient(
        &self,
        u: &CMatrix,
        lambda: f64,
        sigma: f64,
        grad: &mut CMatrix,
    ) -> Result<Evaluation> {
        self.check(u)?;
        let mut a = CMatrix::zeros(self.rows.len(), self.cols);
        let mut partials = Vec::with_capacity(self.kernels.len());
        let mut scratch = Vec::new();
        for (r, c, k) in &self.kernels {
            a[(*r, *c)] = k.amplitude_and_gradient(u, &mut scratch);
            partials.push(scratch.clone());
        }
        let (eval, t, w) = self.parts(&a, u, lambda, sigma);
        let tau = self.target_norm;

        // Q = Σ_rc (∂L/∂Ũ_rc)·(∂Ũ_rc/∂u); then ∂L/∂ū = conj(Q) for the F and P parts.
        let mut q = CMatrix::zeros(self.modes, self.modes);
        for ((r, c, k), d) in self.kernels.iter().zip(&partials) {
            let x = a[(*r, *c)];
            let mut wt = x.conj() * (lambda / tau);
            if w > 0.0 {
                let tt = self.target[(*r, *c)].conj();
                wt += (t * tt * w - x.conj() * t.norm_sqr()) / (w * w * tau);
            }
            let nc = k.cols().len();
            for (ia, &(row, _)) in k.rows().iter().enumerate() {
                for (ib, &(col, _)) in k.cols().iter().enumerate() {
                    q[(row, col)] += wt * d[ia * nc + ib];
                }
            }
        }
        let n = u.nrows();
        let defect = u * u.adjoint() - CMatrix::identity(n, n);
        let eu = defect * u;
        *grad = q.map(|z| z.conj() * 2.0) - eu.map(|z| z * (4.0 * sigma));
        Ok(eval)
    }
}

/// The heralded transition sub-matrix `Ũ` for `u`.
pub fn build_u_tilde(u: &CMatrix, problem: &SynthesisProblem) -> Result<CMatrix> {
    Objective::new(problem)?.u_tilde(u)
}

/// `L`, `F`, `P` and `C` at `λ = problem.lambda_start`, `σ = problem.sigma`.
pub fn objective(u: &CMatrix, problem: &SynthesisProblem) -> Result<Evaluation> {
    Objective::new(problem)?.evaluate(u, problem.lambda_start, problem.sigma)
}
