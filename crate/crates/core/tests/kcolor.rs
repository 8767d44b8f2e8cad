use qudit_optics::kcolor::{
    er_graph_sweep, resource_estimate, run_qaoa, ColoringInstance, Formulation, Graph, QaoaConfig,
    SweepConfig,
};

#[test]
fn triangle_qudit_qaoa_beats_uniform() {
    let inst = ColoringInstance::new(Graph::complete(3), 3).unwrap();
    let mut best: f64 = 0.0;
    for seed in 0..5 {
        let cfg = QaoaConfig {
            formulation: Formulation::Qudit,
            p: 2,
            budget: 500,
            seed,
            mixer_range: 1,
        };
        let r = run_qaoa(&inst, &cfg).unwrap();
        println!("seed {seed}: P = {:.4}, E = {:.4} (from {:.4})", r.success_probability, r.energy, r.initial_energy);
        assert!(r.energy <= r.initial_energy);
        assert!((r.baseline_probability - 6.0 / 27.0).abs() < 1e-12);
        best = best.max(r.success_probability);
    }
    assert!(best > 0.3, "best success probability {best}");
}

#[test]
fn qubit_qaoa_runs_on_an_edge() {
    let inst = ColoringInstance::with_weights(Graph::path(2), 2, 2.0, 1.0).unwrap();
    let cfg = QaoaConfig {
        formulation: Formulation::Qubit,
        p: 1,
        budget: 200,
        seed: 1,
        mixer_range: 1,
    };
    let r = run_qaoa(&inst, &cfg).unwrap();
    // Two proper one-hot colorings among 16 strings.
    assert!((r.baseline_probability - 2.0 / 16.0).abs() < 1e-12);
    assert!(r.energy <= r.initial_energy);
    assert!(r.success_probability > r.baseline_probability);
}

#[test]
fn dense_random_graphs_approach_k() {
    let cfg = SweepConfig {
        vertices: 500,
        k: 3,
        probabilities: vec![0.01, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0],
        samples: 1,
        seed: 5,
    };
    let rows = er_graph_sweep(&cfg).unwrap();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio.unwrap()).collect();
    assert!(ratios.iter().all(|&r| r > 3.0));
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    let k500 = resource_estimate(&Graph::complete(500), 3).unwrap();
    assert!((k500.ratio.unwrap() - 3.0) / 3.0 < 0.05);
    // Mode ratio 2|C₂| / (k|C_d|) tends to 2 when k = 3 and the graph is dense.
    let modes = k500.qubit_modes as f64 / k500.qudit_modes as f64;
    assert!((modes - 2.0).abs() < 0.05);
}
