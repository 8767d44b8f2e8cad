use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::QuditState;
use super::REGISTER_CAP;
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::qudit::{omega_pow, register_size};

/// An edge `(a, b, sign)`: `sign = 1` is `CZ`, `sign = -1` is `CZ†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge(pub usize, pub usize, pub i8);

/// A qudit cluster: signed edges plus the logical wires running through it.
///
/// Each wire is an ordered chain of nodes joined by edges; its first node
/// is an input and its last node an output. Every node lies on exactly one
/// wire.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterGraph {
    pub d: usize,
    pub node_count: usize,
    pub edges: Vec<Edge>,
    pub wires: Vec<Vec<usize>>,
    /// Optional display names, indexed by node id.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Pattern(msg.into())
}

impl ClusterGraph {
    pub fn new(d: usize, node_count: usize, edges: Vec<Edge>, wires: Vec<Vec<usize>>) -> Result<Self> {
        let g = Self {
            d,
            node_count,
            edges,
            wires,
            labels: Vec::new(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(bad(format!("qudit dimension must be at least 2, got {}", self.d)));
        }
        if !self.labels.is_empty() && self.labels.len() != self.node_count {
            return Err(bad("labels must name every node"));
        }
        let mut seen = vec![false; self.node_count];
        for w in &self.wires {
            if w.is_empty() {
                return Err(bad("empty wire"));
            }
            for &n in w {
                if n >= self.node_count {
                    return Err(bad(format!("node {n} out of range")));
                }
                if std::mem::replace(&mut seen[n], true) {
                    return Err(bad(format!("node {n} lies on two wires")));
                }
            }
        }
        if let Some(n) = seen.iter().position(|s| !s) {
            return Err(bad(format!("node {n} lies on no wire")));
        }
        let mut pairs = std::collections::HashSet::new();
        for &Edge(a, b, s) in &self.edges {
            if a >= self.node_count || b >= self.node_count {
                return Err(bad(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(bad(format!("self-loop on node {a}")));
            }
            if s != 1 && s != -1 {
                return Err(bad(format!("edge sign must be ±1, got {s}")));
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                return Err(bad(format!("duplicate edge ({a}, {b})")));
            }
        }
        for w in &self.wires {
            for pair in w.windows(2) {
                if self.sign(pair[0], pair[1]).is_none() {
                    return Err(bad(format!("wire nodes {} and {} are not joined", pair[0], pair[1])));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self, node: usize) -> String {
        self.labels
            .get(node)
            .cloned()
            .unwrap_or_else(|| node.to_string())
    }

    pub fn inputs(&self) -> Vec<usize> {
        self.wires.iter().map(|w| w[0]).collect()
    }

    pub fn outputs(&self) -> Vec<usize> {
        self.wires.iter().map(|w| *w.last().expect("nonempty wire")).collect()
    }

    pub fn is_output(&self, node: usize) -> bool {
        self.wires.iter().any(|w| w.last() == Some(&node))
    }

    /// The next node on `node`'s wire.
    pub fn successor(&self, node: usize) -> Option<usize> {
        self.wires.iter().find_map(|w| {
            w.iter()
                .position(|&n| n == node)
                .and_then(|i| w.get(i + 1).copied())
        })
    }

    pub fn sign(&self, a: usize, b: usize) -> Option<i8> {
        self.edges
            .iter()
            .find(|e| (e.0 == a && e.1 == b) || (e.0 == b && e.1 == a))
            .map(|e| e.2)
    }

    /// Neighbours of `node` with edge signs.
    pub fn neighbors(&self, node: usize) -> Vec<(usize, i8)> {
        self.edges
            .iter()
            .filter_map(|&Edge(a, b, s)| {
                if a == node {
                    Some((b, s))
                } else if b == node {
                    Some((a, s))
                } else {
                    None
                }
            })
            .collect()
    }
}

/// The full cluster on all nodes (ordered by id), with `inputs` on the input
/// nodes (in wire order) and `|+⟩` elsewhere, entangled by every edge.
///
/// Phases are accumulated as integer exponents of `ω`, so the result is
/// bit-for-bit independent of edge order.
pub fn prepare_cluster(graph: &ClusterGraph, inputs: &QuditState) -> Result<QuditState> {
    graph.validate()?;
    let d = graph.d;
    let n = graph.node_count;
    let size = register_size(d, n)?;
    if size > REGISTER_CAP {
        return Err(Error::SizeCap {
            what: "cluster register",
            size,
            cap: REGISTER_CAP,
        });
    }
    let input_nodes = graph.inputs();
    if inputs.d != d || inputs.nodes.len() != input_nodes.len() {
        return Err(Error::DimensionMismatch {
            expected: input_nodes.len(),
            found: inputs.nodes.len(),
        });
    }
    let plus = Complex64::new((d as f64).powi(-((n - input_nodes.len()) as i32)).sqrt(), 0.0);
    let omegas: Vec<Complex64> = (0..d).map(|k| omega_pow(d, k as i64)).collect();
    let mut digits = vec![0usize; n];
    let amplitudes = CVector::from_fn(size, |i, _| {
        let mut rem = i;
        for q in (0..n).rev() {
            digits[q] = rem % d;
            rem /= d;
        }
        let input_index = input_nodes.iter().fold(0, |acc, &q| acc * d + digits[q]);
        let k = graph
            .edges
            .iter()
            .map(|&Edge(a, b, s)| s as i64 * (digits[a] * digits[b]) as i64)
            .sum::<i64>()
            .rem_euclid(d as i64) as usize;
        inputs.amplitudes[input_index] * plus * omegas[k]
    });
    QuditState::new(d, (0..n).collect(), amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_state, ONE};
    use crate::qudit::{controlled_z, hadamard};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus_input(d: usize, k: usize) -> QuditState {
        let size = d.pow(k as u32);
        let amp = Complex64::new((size as f64).sqrt().recip(), 0.0);
        QuditState::new(d, (0..k).collect(), CVector::from_element(size, amp)).unwrap()
    }

    #[test]
    fn single_node_is_plus() {
        let g = ClusterGraph::new(3, 1, vec![], vec![vec![0]]).unwrap();
        let input = plus_input(3, 1);
        assert_eq!(prepare_cluster(&g, &input).unwrap().amplitudes, input.amplitudes);
    }

    #[test]
    fn two_qubit_cluster() {
        let g = ClusterGraph::new(2, 2, vec![Edge(0, 1, 1)], vec![vec![0, 1]]).unwrap();
        let s = prepare_cluster(&g, &plus_input(2, 1)).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in s.amplitudes.iter().zip(want) {
            assert!((a - Complex64::new(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn qutrit_dagger_edge_matches_gate_library() {
        let g = ClusterGraph::new(3, 2, vec![Edge(0, 1, -1)], vec![vec![0, 1]]).unwrap();
        let s = prepare_cluster(&g, &plus_input(3, 1)).unwrap();
        let plus = hadamard(3).unwrap().tensor(&hadamard(3).unwrap()).unwrap();
        let czd = controlled_z(3).unwrap().adjoint();
        let mut e0 = CVector::zeros(9);
        e0[0] = ONE;
        let want = czd.matrix() * (plus.matrix() * e0);
        assert!((s.amplitudes - want).norm() < 1e-14);
    }

    #[test]
    fn edge_order_is_irrelevant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut edges = vec![
            Edge(0, 1, 1),
            Edge(1, 2, -1),
            Edge(2, 3, 1),
            Edge(0, 3, -1),
            Edge(1, 4, 1),
            Edge(4, 5, 1),
        ];
        let wires = vec![vec![0, 1, 2, 3], vec![4, 5]];
        let input = QuditState::new(3, vec![0, 4], random_state(9, &mut rng)).unwrap();
        let base = prepare_cluster(&ClusterGraph::new(3, 6, edges.clone(), wires.clone()).unwrap(), &input)
            .unwrap();
        for _ in 0..5 {
            edges.shuffle(&mut rng);
            let g = ClusterGraph::new(3, 6, edges.clone(), wires.clone()).unwrap();
            assert_eq!(prepare_cluster(&g, &input).unwrap(), base);
        }
        // Also against sequential gate application.
        let mut s = QuditState::new(3, vec![0, 4], input.amplitudes.clone()).unwrap();
        for n in [1, 2, 3, 5] {
            s.push_plus(n).unwrap();
        }
        for e in &edges {
            s.apply_cz(e.0, e.1, e.2).unwrap();
        }
        let s = s.reordered(&[0, 1, 2, 3, 4, 5]).unwrap();
        assert!((s.amplitudes - &base.amplitudes).norm() < 1e-13);
    }

    #[test]
    fn malformed_graphs_rejected() {
        assert!(ClusterGraph::new(2, 2, vec![Edge(0, 0, 1)], vec![vec![0], vec![1]]).is_err());
        assert!(ClusterGraph::new(2, 2, vec![Edge(0, 1, 1), Edge(1, 0, -1)], vec![vec![0, 1]]).is_err());
        assert!(ClusterGraph::new(2, 2, vec![], vec![vec![0, 1]]).is_err());
        assert!(ClusterGraph::new(2, 2, vec![Edge(0, 1, 2)], vec![vec![0, 1]]).is_err());
        assert!(ClusterGraph::new(2, 3, vec![Edge(0, 1, 1)], vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn size_cap_enforced() {
        let n = 11;
        let g = ClusterGraph::new(3, n, vec![], (0..n).map(|i| vec![i]).collect()).unwrap();
        let input = plus_input(3, 0);
        assert!(prepare_cluster(&g, &input).is_err());
    }
}
