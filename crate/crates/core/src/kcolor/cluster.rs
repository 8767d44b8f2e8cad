use rand::Rng;

use super::instance::ColoringInstance;
use super::layer::qudit_layer_unitary;
use crate::error::{invalid, Error, Result};
use crate::linalg::{max_diff_up_to_phase, random_state};
use crate::mbqc::{run_pattern, ClusterGraph, MeasurementPattern, PatternBuilder, QuditState};

/// Largest vertex count for the cluster cross-check.
pub const CLUSTER_CHECK_VERTICES: usize = 3;

/// The qudit cost layer `e^{iαH_C}` as a measurement pattern: one wire per
/// vertex and one `CX P(α) CX†` block per edge, chained in edge order.
pub fn cost_layer_pattern(inst: &ColoringInstance, alpha: f64) -> Result<(ClusterGraph, MeasurementPattern)> {
    let k = inst.k;
    let mut theta = vec![0.0; k];
    theta[0] = alpha * k as f64;
    let mut b = PatternBuilder::new(k, inst.vertex_count())?;
    for &(c, t) in inst.edges() {
        b.cx_phase(c, t, &theta)?;
    }
    b.finish()
}

/// Runs the cost-layer pattern on `trials` random inputs with sampled
/// outcomes and compares against the dense layer. Returns the largest
/// amplitude error up to global phase.
pub fn verify_cost_layer_pattern<R: Rng + ?Sized>(
    inst: &ColoringInstance,
    alpha: f64,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = inst.vertex_count();
    if n > CLUSTER_CHECK_VERTICES {
        return Err(invalid(format!(
            "cluster cross-check supports at most {CLUSTER_CHECK_VERTICES} vertices, got {n}"
        )));
    }
    let (graph, pattern) = cost_layer_pattern(inst, alpha)?;
    let layer = qudit_layer_unitary(alpha, inst)?;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let psi = random_state(layer.phases.len(), rng);
        let input = QuditState::new(inst.k, (0..n).collect(), psi.clone())?;
        let run = run_pattern(&graph, &pattern, &input, rng)?;
        let want: Vec<_> = psi.iter().zip(&layer.phases).map(|(a, z)| a * z).collect();
        worst = worst.max(max_diff_up_to_phase(run.output.amplitudes.as_slice(), &want));
    }
    if worst > 1e-8 {
        return Err(Error::Verification(format!(
            "cluster cost layer differs from the dense layer by {worst:.3e}"
        )));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kcolor::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triangle_layer_runs_on_cluster() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for k in [2, 3] {
            let inst = ColoringInstance::new(Graph::complete(3), k).unwrap();
            let err = verify_cost_layer_pattern(&inst, 0.41, 5, &mut rng).unwrap();
            assert!(err < 1e-8);
        }
        let path = ColoringInstance::new(Graph::path(3), 3).unwrap();
        assert!(verify_cost_layer_pattern(&path, -1.3, 5, &mut rng).unwrap() < 1e-8);
    }

    #[test]
    fn cluster_size_per_edge() {
        let inst = ColoringInstance::new(Graph::complete(3), 3).unwrap();
        let (g, p) = cost_layer_pattern(&inst, 0.2).unwrap();
        // Each block adds six nodes to the |V| input nodes.
        assert_eq!(g.node_count, 3 + 6 * 3);
        assert_eq!(p.measurements.len(), 6 * 3);
    }

    #[test]
    fn large_instances_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let inst = ColoringInstance::new(Graph::path(4), 3).unwrap();
        assert!(verify_cost_layer_pattern(&inst, 0.1, 1, &mut rng).is_err());
    }
}
