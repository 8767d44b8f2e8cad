use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::Graph;
use crate::error::{invalid, Result};

/// Nodes in the two-qudit block that implements one controlled rotation.
pub const BLOCK_SIZE: u64 = 8;

/// Cluster sizes for one cost layer with `k` colors.
///
/// Both counts use the block-count approximation: `|C_d| = 8|E|` and
/// `|C₂| = 8 C(k,2) |V| + 8k|E|`. Each cluster node is one photon; a qudit
/// node takes `k` modes and a qubit node two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub vertices: usize,
    pub edges: usize,
    pub k: usize,
    pub qudit_cluster: u64,
    pub qubit_cluster: u64,
    /// `|C₂| / |C_d|`, absent for an edgeless graph.
    pub ratio: Option<f64>,
    pub qudit_photons: u64,
    pub qubit_photons: u64,
    pub qudit_modes: u64,
    pub qubit_modes: u64,
}

pub fn resource_estimate(graph: &Graph, k: usize) -> Result<ResourceEstimate> {
    if k < 2 {
        return Err(invalid(format!("need at least 2 colors, got {k}")));
    }
    let (v, e, kk) = (graph.vertex_count as u64, graph.edges.len() as u64, k as u64);
    let cd = BLOCK_SIZE * e;
    let c2 = BLOCK_SIZE * (kk * (kk - 1) / 2) * v + BLOCK_SIZE * kk * e;
    Ok(ResourceEstimate {
        vertices: graph.vertex_count,
        edges: graph.edges.len(),
        k,
        qudit_cluster: cd,
        qubit_cluster: c2,
        ratio: (cd > 0).then(|| c2 as f64 / cd as f64),
        qudit_photons: cd,
        qubit_photons: c2,
        qudit_modes: kk * cd,
        qubit_modes: 2 * c2,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub vertices: usize,
    pub k: usize,
    pub probabilities: Vec<f64>,
    #[serde(default = "one")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub probability: f64,
    pub sample: usize,
    pub edges: usize,
    pub c2: u64,
    pub cd: u64,
    pub ratio: Option<f64>,
}

/// Resource estimates over Erdős–Rényi graphs, one row per (probability,
/// sample) in that order. Sample `j` of probability `i` draws from stream
/// `i·samples + j` of the seed, so rows do not depend on thread count.
pub fn er_graph_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if let Some(p) = config.probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let jobs: Vec<(usize, f64, usize)> = config
        .probabilities
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| (0..config.samples).map(move |j| (i, p, j)))
        .collect();
    jobs.into_par_iter()
        .map(|(i, p, j)| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream((i * config.samples + j) as u64);
            let g = Graph::erdos_renyi(config.vertices, p, &mut rng)?;
            let est = resource_estimate(&g, config.k)?;
            Ok(SweepRow {
                probability: p,
                sample: j,
                edges: est.edges,
                c2: est.qubit_cluster,
                cd: est.qudit_cluster,
                ratio: est.ratio,
            })
        })
        .collect()
}
