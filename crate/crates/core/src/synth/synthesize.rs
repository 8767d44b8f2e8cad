use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{Evaluation, Objective};
use super::problem::SynthesisProblem;
use crate::error::Result;
use crate::fock::{evolve, postselect, FockBasis, Interferometer, StateVector};
use crate::linalg::{best_phase, nearest_unitary, random_complex_matrix, random_unitary, CMatrix};
use crate::optim::{minimize, Termination, TrustRegionOptions};
use num_complex::Complex64;

/// `F` required before the `λ` schedule starts.
const STAGE0_FIDELITY: f64 = 1.0 - 1e-8;
const STAGE0_CONSTRAINT: f64 = 1e-8;
/// `F` a stage must keep to be accepted, and the final success threshold.
const ACCEPT_FIDELITY: f64 = 1.0 - 1e-6;
const VERIFY_TOL: f64 = 1e-6;

/// One local optimization at fixed `λ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRecord {
    pub lambda: f64,
    pub sigma: f64,
    pub objective_start: f64,
    pub objective_end: f64,
    pub fidelity: f64,
    pub probability: f64,
    pub constraint: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub accepted: bool,
}

/// Result of one restart of the schedule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub index: usize,
    #[serde(with = "crate::linalg::serde_cmatrix")]
    pub u: CMatrix,
    pub fidelity: f64,
    pub probability: f64,
    pub constraint: f64,
    pub converged: bool,
    pub stages: Vec<StageRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisStatus {
    /// Converged and confirmed by Fock simulation.
    Verified,
    /// Converged, but the simulation disagrees beyond tolerance.
    Unverified,
    /// No restart reached the fidelity threshold.
    NotConverged,
}

/// Independent check of a candidate through full Fock evolution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    /// Max over all inputs and outputs of `|amp − e^{iφ}√P·T|`.
    pub max_amplitude_error: f64,
    /// Heralding probability for each input.
    pub probabilities: Vec<f64>,
    pub max_probability_deviation: f64,
    pub global_phase: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub converged: bool,
    pub fidelity: f64,
    pub probability: f64,
    pub constraint: f64,
    pub stages: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub problem: SynthesisProblem,
    pub status: SynthesisStatus,
    pub verified: bool,
    pub best_restart: usize,
    #[serde(with = "crate::linalg::serde_cmatrix")]
    pub u: CMatrix,
    pub fidelity: f64,
    pub probability: f64,
    pub constraint: f64,
    pub verification: Option<Verification>,
    /// Stage-by-stage trace of the chosen restart.
    pub trace: Vec<StageRecord>,
    pub restarts: Vec<RestartSummary>,
}

fn pack(u: &CMatrix) -> Vec<f64> {
    let n = u.nrows();
    let mut x = vec![0.0; 2 * n * n];
    for i in 0..n {
        for j in 0..n {
            x[i * n + j] = u[(i, j)].re;
            x[n * n + i * n + j] = u[(i, j)].im;
        }
    }
    x
}

fn unpack(x: &[f64], n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| Complex64::new(x[i * n + j], x[n * n + i * n + j]))
}

fn run_stage(
    obj: &Objective,
    problem: &SynthesisProblem,
    u: &CMatrix,
    lambda: f64,
    sigma: f64,
) -> (CMatrix, Evaluation, StageRecord) {
    let n = obj.mode_count();
    let opts = TrustRegionOptions {
        max_iterations: problem.max_iterations,
        gradient_tolerance: problem.gradient_tolerance,
        ..TrustRegionOptions::default()
    };
    let mut grad = CMatrix::zeros(n, n);
    let report = minimize(
        |x, g| {
            let u = unpack(x, n);
            let e = obj
                .evaluate_with_gradient(&u, lambda, sigma, &mut grad)
                .expect("dimensions fixed by the objective");
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = -grad[(i, j)].re;
                    g[n * n + i * n + j] = -grad[(i, j)].im;
                }
            }
            -e.objective
        },
        &pack(u),
        &opts,
    );
    let u = unpack(&report.x, n);
    let eval = obj.evaluate(&u, lambda, sigma).expect("dimensions fixed");
    let record = StageRecord {
        lambda,
        sigma,
        objective_start: -report.trace[0],
        objective_end: eval.objective,
        fidelity: eval.fidelity,
        probability: eval.probability,
        constraint: eval.constraint,
        iterations: report.iterations,
        termination: report.termination,
        accepted: false,
    };
    (u, eval, record)
}

/// Runs restart `index` of the schedule: `λ = 0` to an exact solution, then
/// geometric growth of `λ` while `F` stays above threshold, then a final
/// unitary projection and `λ = 0` polish.
pub fn restart(problem: &SynthesisProblem, obj: &Objective, index: usize) -> RestartOutcome {
    let n = obj.mode_count();
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    rng.set_stream(index as u64);
    let u0 = random_unitary(n, &mut rng)
        + random_complex_matrix(n, n, &mut rng).map(|z| z * problem.init_noise);

    let mut stages = Vec::new();
    let (mut u, eval, mut rec) = run_stage(obj, problem, &u0, 0.0, problem.sigma_start);
    rec.accepted = eval.fidelity >= STAGE0_FIDELITY && -eval.constraint <= STAGE0_CONSTRAINT;
    let start_ok = rec.accepted;
    stages.push(rec);
    if start_ok {
        let mut lambda = problem.lambda_start;
        for _ in 0..problem.max_stages {
            if lambda == 0.0 {
                break;
            }
            let (v, eval, mut rec) = run_stage(obj, problem, &u, lambda, problem.sigma);
            rec.accepted = eval.fidelity >= ACCEPT_FIDELITY;
            let ok = rec.accepted;
            stages.push(rec);
            if !ok {
                break;
            }
            u = v;
            lambda *= problem.lambda_growth;
        }
        let (v, _, mut rec) = run_stage(obj, problem, &nearest_unitary(&u), 0.0, problem.sigma);
        rec.accepted = true;
        stages.push(rec);
        u = nearest_unitary(&v);
    }
    let eval = obj.evaluate(&u, 0.0, problem.sigma).expect("dimensions fixed");
    let converged = start_ok && eval.fidelity >= ACCEPT_FIDELITY;
    debug!(
        "restart {index}: converged={converged} F={:.12} P={:.6} stages={}",
        eval.fidelity,
        eval.probability,
        stages.len()
    );
    RestartOutcome {
        index,
        u,
        fidelity: eval.fidelity,
        probability: eval.probability,
        constraint: eval.constraint,
        converged,
        stages,
    }
}

/// Evolves every input with the heralding ancillas through `u` and compares
/// the heralded output with `e^{iφ}√P·T`.
pub fn verify(problem: &SynthesisProblem, u: &CMatrix, probability: f64) -> Result<Verification> {
    let ifm = Interferometer::unitary(u.clone())?;
    let ancilla = problem.ancilla_pattern();
    let pattern = ancilla.occupations().to_vec();
    let modes = problem.ancilla_modes();
    let mut actual = Vec::new();
    let mut expected = Vec::new();
    let mut probabilities = Vec::new();
    let sp = probability.max(0.0).sqrt();
    for (c, input) in problem.inputs.iter().enumerate() {
        let out = evolve(&ifm, &StateVector::basis_state(&input.concat(&ancilla)))?;
        let post = postselect(&out, &modes, &pattern)?;
        let p = post.probability();
        probabilities.push(p);
        let basis = FockBasis::shared(input.mode_count(), input.photon_count());
        let scale = p.sqrt();
        for s in basis.states() {
            let a = post.state().map_or(Complex64::default(), |st| st.amplitude(s)) * scale;
            actual.push(a);
            let t = problem
                .inputs
                .iter()
                .position(|x| x == s)
                .map_or(Complex64::default(), |i| problem.target[(i, c)]);
            expected.push(t * sp);
        }
    }
    let phase = best_phase(&actual, &expected);
    let max_amplitude_error = actual
        .iter()
        .zip(&expected)
        .map(|(a, e)| (a - phase * e).norm())
        .fold(0.0, f64::max);
    let max_probability_deviation = probabilities
        .iter()
        .map(|p| (p - probability).abs())
        .fold(0.0, f64::max);
    Ok(Verification {
        passed: max_amplitude_error <= VERIFY_TOL && max_probability_deviation <= VERIFY_TOL,
        max_amplitude_error,
        probabilities,
        max_probability_deviation,
        global_phase: phase.arg(),
    })
}

/// Runs `problem.restarts` independent restarts (in parallel) and returns the
/// verified result with the largest success probability.
///
/// Ties go to the lowest restart index, so the result does not depend on
/// the number of worker threads.
pub fn synthesize(problem: &SynthesisProblem) -> Result<SynthesisResult> {
    let obj = Objective::new(problem)?;
    info!(
        "synthesizing {} with N_a={}, N_v={}, {} restarts",
        problem.name, problem.ancilla_photons, problem.vacuum_modes, problem.restarts
    );
    let outcomes: Vec<RestartOutcome> = (0..problem.restarts.max(1))
        .into_par_iter()
        .map(|i| restart(problem, &obj, i))
        .collect();
    let summaries = outcomes
        .iter()
        .map(|o| RestartSummary {
            index: o.index,
            converged: o.converged,
            fidelity: o.fidelity,
            probability: o.probability,
            constraint: o.constraint,
            stages: o.stages.len(),
        })
        .collect();

    let mut converged: Vec<&RestartOutcome> = outcomes.iter().filter(|o| o.converged).collect();
    converged.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then(a.index.cmp(&b.index))
    });
    let mut first_failure = None;
    for o in &converged {
        let v = verify(problem, &o.u, o.probability)?;
        if v.passed {
            return Ok(finish(problem, o, SynthesisStatus::Verified, Some(v), summaries));
        }
        first_failure.get_or_insert((*o, v));
    }
    if let Some((o, v)) = first_failure {
        return Ok(finish(problem, o, SynthesisStatus::Unverified, Some(v), summaries));
    }
    let best = outcomes
        .iter()
        .max_by(|a, b| {
            a.fidelity
                .total_cmp(&b.fidelity)
                .then(b.index.cmp(&a.index))
        })
        .expect("at least one restart");
    Ok(finish(problem, best, SynthesisStatus::NotConverged, None, summaries))
}

fn finish(
    problem: &SynthesisProblem,
    o: &RestartOutcome,
    status: SynthesisStatus,
    verification: Option<Verification>,
    restarts: Vec<RestartSummary>,
) -> SynthesisResult {
    SynthesisResult {
        problem: problem.clone(),
        status,
        verified: status == SynthesisStatus::Verified,
        best_restart: o.index,
        u: o.u.clone(),
        fidelity: o.fidelity,
        probability: o.probability,
        constraint: o.constraint,
        verification,
        trace: o.stages.clone(),
        restarts,
    }
}

