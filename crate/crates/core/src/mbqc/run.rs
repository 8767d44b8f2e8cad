use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::ClusterGraph;
use super::pattern::{adapt_angles, MeasurementBasis, MeasurementPattern, PauliFrame};
use super::state::QuditState;
use crate::error::{Error, Result};
use crate::qudit::{pauli_x, pauli_z};

/// Smallest branch probability accepted when an outcome is forced.
const MIN_BRANCH_PROBABILITY: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub node: usize,
    pub outcome: usize,
    pub probability: f64,
    pub adapted_theta: Vec<f64>,
    /// Frame the node carried when it was measured.
    pub frame: PauliFrame,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternRun {
    /// Corrected output state, one site per wire in wire order.
    pub output: QuditState,
    /// Byproducts that were removed from each output.
    pub frames: Vec<PauliFrame>,
    pub transcript: Vec<MeasurementRecord>,
}

/// Measures `node` after `P(θ)` and the basis change, sampling the outcome.
/// Returns the outcome and its probability; the state is renormalized.
pub fn measure_node<R: Rng + ?Sized>(
    state: &mut QuditState,
    node: usize,
    theta: &[f64],
    basis: MeasurementBasis,
    rng: &mut R,
) -> Result<(usize, f64)> {
    measure_with(state, node, theta, basis, |probs| {
        let r: f64 = rng.random::<f64>() * probs.iter().sum::<f64>();
        let mut acc = 0.0;
        for (m, p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                return Ok(m);
            }
        }
        Ok(probs.iter().rposition(|&p| p > 0.0).unwrap_or(0))
    })
}

fn measure_with(
    state: &mut QuditState,
    node: usize,
    theta: &[f64],
    basis: MeasurementBasis,
    choose: impl FnOnce(&[f64]) -> Result<usize>,
) -> Result<(usize, f64)> {
    if theta.len() != state.d {
        return Err(Error::DimensionMismatch {
            expected: state.d,
            found: theta.len(),
        });
    }
    let total = state.norm_sqr();
    let branches = state.branches(node, &basis.matrix(theta)?)?;
    let probs: Vec<f64> = branches.iter().map(|b| b.norm_squared() / total).collect();
    let m = choose(&probs)?;
    let p = probs[m];
    if p < MIN_BRANCH_PROBABILITY {
        return Err(Error::Pattern(format!(
            "outcome {m} on node {node} has probability {p:.3e}"
        )));
    }
    let amps = branches[m].unscale(p.sqrt() * total.sqrt());
    state.replace_after_measurement(node, amps);
    Ok((m, p))
}

/// Runs `pattern` on `graph` with `inputs` (one site per wire, wire order),
/// sampling outcomes from `rng`.
pub fn run_pattern<R: Rng + ?Sized>(
    graph: &ClusterGraph,
    pattern: &MeasurementPattern,
    inputs: &QuditState,
    rng: &mut R,
) -> Result<PatternRun> {
    execute(graph, pattern, inputs, |state, node, theta, basis, _| {
        measure_node(state, node, theta, basis, rng)
    })
}

/// Like [`run_pattern`] but with outcomes fixed in measurement order.
pub fn run_pattern_with_outcomes(
    graph: &ClusterGraph,
    pattern: &MeasurementPattern,
    inputs: &QuditState,
    outcomes: &[usize],
) -> Result<PatternRun> {
    if outcomes.len() != pattern.measurements.len() {
        return Err(Error::DimensionMismatch {
            expected: pattern.measurements.len(),
            found: outcomes.len(),
        });
    }
    if let Some(&m) = outcomes.iter().find(|&&m| m >= graph.d) {
        return Err(Error::Pattern(format!("outcome {m} out of range for d = {}", graph.d)));
    }
    execute(graph, pattern, inputs, |state, node, theta, basis, k| {
        measure_with(state, node, theta, basis, |_| Ok(outcomes[k]))
    })
}

struct Register<'g> {
    graph: &'g ClusterGraph,
    state: QuditState,
    allocated: HashSet<usize>,
    measured: HashSet<usize>,
}

impl Register<'_> {
    fn allocate(&mut self, node: usize) -> Result<()> {
        if !self.allocated.insert(node) {
            return Ok(());
        }
        self.state.push_plus(node)?;
        for (t, s) in self.graph.neighbors(node) {
            if self.measured.contains(&t) {
                return Err(Error::Pattern(format!(
                    "node {} joins already measured node {}",
                    self.graph.label(node),
                    self.graph.label(t)
                )));
            }
            if self.allocated.contains(&t) && t != node {
                self.state.apply_cz(node, t, s)?;
            }
        }
        Ok(())
    }
}

fn execute(
    graph: &ClusterGraph,
    pattern: &MeasurementPattern,
    inputs: &QuditState,
    mut measure: impl FnMut(&mut QuditState, usize, &[f64], MeasurementBasis, usize) -> Result<(usize, f64)>,
) -> Result<PatternRun> {
    pattern.validate(graph)?;
    let d = graph.d;
    let input_nodes = graph.inputs();
    if inputs.d != d || inputs.nodes.len() != input_nodes.len() {
        return Err(Error::DimensionMismatch {
            expected: input_nodes.len(),
            found: inputs.nodes.len(),
        });
    }
    let state = QuditState::new(d, input_nodes.clone(), inputs.amplitudes.clone())?;
    let mut reg = Register {
        graph,
        state,
        allocated: input_nodes.iter().copied().collect(),
        measured: HashSet::new(),
    };
    for e in &graph.edges {
        if reg.allocated.contains(&e.0) && reg.allocated.contains(&e.1) {
            reg.state.apply_cz(e.0, e.1, e.2)?;
        }
    }

    let mut frames = vec![PauliFrame::default(); graph.node_count];
    let mut transcript = Vec::with_capacity(pattern.measurements.len());
    for (k, m) in pattern.measurements.iter().enumerate() {
        let j = m.node;
        for (t, _) in graph.neighbors(j) {
            reg.allocate(t)?;
        }
        let frame = frames[j];
        let theta = adapt_angles(&m.theta, frame);
        let (outcome, probability) = measure(&mut reg.state, j, &theta, m.basis, k)?;
        reg.measured.insert(j);

        let s = graph.successor(j).expect("validated pattern");
        let x = m.basis.effective_outcome(outcome, frame, d);
        frames[s].a = x;
        for (t, sign) in graph.neighbors(s) {
            if t != j {
                let shift = (sign as i64 * x as i64).rem_euclid(d as i64) as usize;
                frames[t].b = (frames[t].b + shift) % d;
            }
        }
        transcript.push(MeasurementRecord {
            node: j,
            outcome,
            probability,
            adapted_theta: theta,
            frame,
        });
    }

    for n in 0..graph.node_count {
        if !reg.measured.contains(&n) {
            reg.allocate(n)?;
        }
    }
    let outputs = graph.outputs();
    let x = pauli_x(d)?;
    let z = pauli_z(d)?;
    let mut out_frames = Vec::with_capacity(outputs.len());
    for &o in &outputs {
        let f = frames[o];
        let fix = z.pow(-(f.b as i64))?.compose(&x.pow(-(f.a as i64))?)?;
        reg.state.apply_single(o, fix.matrix())?;
        out_frames.push(f);
    }
    Ok(PatternRun {
        output: reg.state.reordered(&outputs)?,
        frames: out_frames,
        transcript,
    })
}
