//! A three-node linear qubit cluster built photon by photon: dual-rail
//! `|+⟩` inputs, two heralded `CZ` interferometers from the synthesizer, and
//! a comparison with the qudit-level cluster preparation.

use num_complex::Complex64;
use qudit_optics::fock::{FockSuperposition, Interferometer};
use qudit_optics::linalg::max_diff_up_to_phase;
use qudit_optics::mbqc::{prepare_cluster, ClusterGraph, Edge, QuditState};
use qudit_optics::multirail::MultiRailRegister;
use qudit_optics::synth::{synthesize, NamedTarget, SynthesisProblem, SynthesisStatus};

#[test]
fn heralded_cz_gates_prepare_a_linear_cluster() {
    let problem = SynthesisProblem::named(NamedTarget::CzQubit).unwrap();
    let result = synthesize(&problem).unwrap();
    assert_eq!(result.status, SynthesisStatus::Verified);
    let gate = Interferometer::unitary(result.u.clone()).unwrap();
    let ancilla = problem.ancilla_pattern();
    let pattern = ancilla.occupations().to_vec();

    let reg = MultiRailRegister::new(3, 2).unwrap();
    let amp = Complex64::new(8f64.sqrt().recip(), 0.0);
    let terms: Vec<_> = reg.codewords().into_iter().map(|w| (w, amp)).collect();
    let mut state = FockSuperposition::from_terms(6, &terms).unwrap();

    let mut heralded = 1.0;
    for (a, b) in [(0, 1), (1, 2)] {
        let modes = [2 * a, 2 * a + 1, 2 * b, 2 * b + 1, 6, 7];
        let u = gate.embed(&modes, 8).unwrap();
        let (next, p) = state
            .with_ancillas(&ancilla)
            .unwrap()
            .apply(u.matrix())
            .unwrap()
            .postselect(&[6, 7], &pattern)
            .unwrap()
            .expect("heralding pattern has nonzero weight");
        heralded *= p;
        state = next;
    }
    assert!((heralded - result.probability.powi(2)).abs() < 1e-8);

    let got: Vec<Complex64> = reg.codewords().iter().map(|w| state.amplitude(w)).collect();
    let inside: f64 = got.iter().map(|z| z.norm_sqr()).sum();
    assert!((inside - 1.0).abs() < 1e-8, "leakage {}", 1.0 - inside);

    let graph = ClusterGraph::new(
        2,
        3,
        vec![Edge(0, 1, 1), Edge(1, 2, 1)],
        vec![vec![0, 1, 2]],
    )
    .unwrap();
    let plus = Complex64::new(0.5f64.sqrt(), 0.0);
    let input = QuditState::new(2, vec![0], vec![plus, plus].into()).unwrap();
    let want = prepare_cluster(&graph, &input).unwrap();
    let err = max_diff_up_to_phase(&got, want.amplitudes.as_slice());
    assert!(err < 1e-8, "cluster amplitudes differ by {err:.3e}");
}
