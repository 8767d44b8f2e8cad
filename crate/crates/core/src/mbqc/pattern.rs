use std::collections::HashSet;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::graph::ClusterGraph;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qudit::{hadamard, phase_gate};

/// Basis change applied after `P(θ)` before a computational measurement.
///
/// `HDagger` pairs with a `CZ` edge and teleports `H P(θ)`. `H` pairs with a
/// `CZ†` edge and teleports `H† P(θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementBasis {
    HDagger,
    H,
}

impl MeasurementBasis {
    /// Sign of the wire edge this basis teleports across.
    pub fn edge_sign(self) -> i8 {
        match self {
            Self::HDagger => 1,
            Self::H => -1,
        }
    }

    /// Row `m` gives the amplitude of outcome `m`.
    pub(crate) fn matrix(self, theta: &[f64]) -> Result<CMatrix> {
        let h = hadamard(theta.len())?;
        let p = phase_gate(theta)?;
        let b = match self {
            Self::HDagger => h.adjoint(),
            Self::H => h,
        };
        Ok(b.matrix() * p.matrix())
    }

    /// Outcome the ideal measurement would have reported when the node
    /// carries `frame` and was measured at the adapted angles. The `Z^b` part
    /// relabels outcomes; the `X^a` part was absorbed into the angles.
    pub(crate) fn effective_outcome(self, m: usize, frame: PauliFrame, d: usize) -> usize {
        match self {
            Self::HDagger => (m + d - frame.b % d) % d,
            Self::H => (m + frame.b) % d,
        }
    }
}

/// Byproduct `X^a Z^b` on one node, applied after every cluster edge: the
/// actual state is the ideal one with these Paulis applied on top.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliFrame {
    pub a: usize,
    pub b: usize,
}

/// Angles to measure on a node carrying `frame` so that the ideal `P(θ)` is
/// applied: `θ'_n = θ_{(n − a) mod d}`, wrapped into `[0, 2π)`.
pub fn adapt_angles(theta: &[f64], frame: PauliFrame) -> Vec<f64> {
    let d = theta.len();
    (0..d)
        .map(|n| theta[(n + d - frame.a % d) % d].rem_euclid(TAU))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub node: usize,
    pub theta: Vec<f64>,
    pub basis: MeasurementBasis,
}

/// Measurements in execution order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPattern {
    pub measurements: Vec<Measurement>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Pattern(msg.into())
}

impl MeasurementPattern {
    pub fn new(measurements: Vec<Measurement>) -> Self {
        Self { measurements }
    }

    /// Checks that the pattern is runnable on `graph`.
    ///
    /// Every non-output node is measured exactly once, only after it holds
    /// its wire's state, in the basis matching its wire edge. The successor
    /// of a measured node may only border nodes that are still unmeasured.
    pub fn validate(&self, graph: &ClusterGraph) -> Result<()> {
        graph.validate()?;
        let mut measured = HashSet::new();
        let mut holding: HashSet<usize> = graph.inputs().into_iter().collect();
        for m in &self.measurements {
            let j = m.node;
            let name = graph.label(j);
            if m.theta.len() != graph.d {
                return Err(bad(format!(
                    "node {name}: {} angles for d = {}",
                    m.theta.len(),
                    graph.d
                )));
            }
            if m.theta.iter().any(|t| !t.is_finite()) {
                return Err(bad(format!("node {name}: non-finite angle")));
            }
            if j >= graph.node_count {
                return Err(bad(format!("node {j} out of range")));
            }
            if measured.contains(&j) {
                return Err(bad(format!("node {name} measured twice")));
            }
            let s = graph
                .successor(j)
                .ok_or_else(|| bad(format!("node {name} is an output and cannot be measured")))?;
            if !holding.contains(&j) {
                return Err(bad(format!("node {name} measured before its wire reaches it")));
            }
            if graph.sign(j, s) != Some(m.basis.edge_sign()) {
                return Err(bad(format!(
                    "node {name}: basis {:?} does not match its wire edge",
                    m.basis
                )));
            }
            measured.insert(j);
            for (t, _) in graph.neighbors(s) {
                if t != j && measured.contains(&t) {
                    return Err(bad(format!(
                        "node {name}: successor borders already measured node {}",
                        graph.label(t)
                    )));
                }
            }
            holding.remove(&j);
            holding.insert(s);
        }
        for w in &graph.wires {
            for &n in &w[..w.len() - 1] {
                if !measured.contains(&n) {
                    return Err(bad(format!("node {} is never measured", graph.label(n))));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit::{pauli_x, pauli_z};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn adapted_phase_commutes_past_byproduct() {
        let d = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = pauli_x(d).unwrap();
        let z = pauli_z(d).unwrap();
        for _ in 0..100 {
            let theta: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
            let f = PauliFrame {
                a: rng.random_range(0..d),
                b: rng.random_range(0..d),
            };
            let byproduct = x.pow(f.a as i64).unwrap().compose(&z.pow(f.b as i64).unwrap()).unwrap();
            let lhs = phase_gate(&adapt_angles(&theta, f)).unwrap().compose(&byproduct).unwrap();
            let rhs = byproduct.compose(&phase_gate(&theta).unwrap()).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn adapted_angles_are_wrapped() {
        let t = adapt_angles(&[-1.0, 7.0, 0.5], PauliFrame { a: 1, b: 0 });
        assert!(t.iter().all(|&x| (0.0..TAU).contains(&x)));
        assert!((t[0] - 0.5).abs() < 1e-15);
        assert!((t[1] - (TAU - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn frame_relabels_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in 2..6 {
            let x = pauli_x(d).unwrap();
            let z = pauli_z(d).unwrap();
            for basis in [MeasurementBasis::HDagger, MeasurementBasis::H] {
                for a in 0..d {
                    for b in 0..d {
                        let f = PauliFrame { a, b };
                        let theta: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..TAU)).collect();
                        let byproduct = x.pow(a as i64).unwrap().compose(&z.pow(b as i64).unwrap()).unwrap();
                        let actual = basis.matrix(&adapt_angles(&theta, f)).unwrap() * byproduct.matrix();
                        let ideal = basis.matrix(&theta).unwrap();
                        for m in 0..d {
                            let e = basis.effective_outcome(m, f, d);
                            let lhs: Vec<_> = actual.row(m).iter().copied().collect();
                            let rhs: Vec<_> = ideal.row(e).iter().copied().collect();
                            assert!(crate::linalg::max_diff_up_to_phase(&lhs, &rhs) < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_json_names() {
        assert_eq!(serde_json::to_string(&MeasurementBasis::HDagger).unwrap(), "\"h_dagger\"");
        assert_eq!(serde_json::to_string(&MeasurementBasis::H).unwrap(), "\"h\"");
    }
}
