use std::f64::consts::PI;

use num_complex::Complex64;
use qudit_optics::linalg::{cis, max_diff_up_to_phase, random_state, CMatrix, CVector};
use qudit_optics::mbqc::{
    compile_zz_rotation, cx_phase_cx_dagger, run_pattern, run_pattern_with_outcomes, ClusterGraph,
    Edge, Measurement, MeasurementBasis, MeasurementPattern, PatternBuilder, PatternRun,
    QuditState,
};
use qudit_optics::qudit::{hadamard, phase_gate};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn angles(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

fn input(d: usize, wires: usize, rng: &mut ChaCha8Rng) -> QuditState {
    let n = d.pow(wires as u32);
    QuditState::new(d, (0..wires).collect(), random_state(n, rng)).unwrap()
}

fn gate(basis: MeasurementBasis, theta: &[f64]) -> CMatrix {
    let h = hadamard(theta.len()).unwrap();
    let h = match basis {
        MeasurementBasis::HDagger => h,
        MeasurementBasis::H => h.adjoint(),
    };
    h.matrix() * phase_gate(theta).unwrap().matrix()
}

fn all_outcomes(d: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..d.pow(k as u32)).map(move |mut i| {
        let mut v = vec![0; k];
        for x in v.iter_mut().rev() {
            *x = i % d;
            i /= d;
        }
        v
    })
}

fn assert_output(run: &PatternRun, want: &CVector, tol: f64) {
    let got = &run.output.amplitudes;
    assert!((got.norm() - 1.0).abs() < 1e-10, "output norm {}", got.norm());
    let err = max_diff_up_to_phase(got.as_slice(), want.as_slice());
    assert!(err < tol, "output differs by {err:.3e}");
}

#[test]
fn single_step_teleports_hp_and_hdagger_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for d in 2..=5 {
        for trial in 0..200 {
            let basis = if trial % 2 == 0 {
                MeasurementBasis::HDagger
            } else {
                MeasurementBasis::H
            };
            let theta = angles(d, &mut rng);
            let mut b = PatternBuilder::new(d, 1).unwrap();
            b.step(0, &theta, basis).unwrap();
            let (g, p) = b.finish().unwrap();
            let psi = input(d, 1, &mut rng);
            let run = run_pattern(&g, &p, &psi, &mut rng).unwrap();
            assert!((run.transcript[0].probability - 1.0 / d as f64).abs() < 1e-10);
            assert_output(&run, &(gate(basis, &theta) * &psi.amplitudes), 1e-10);
        }
    }
}

#[test]
fn five_node_chain_all_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [2, 3] {
        let bases: Vec<MeasurementBasis> = (0..4)
            .map(|_| *[MeasurementBasis::HDagger, MeasurementBasis::H].choose(&mut rng).unwrap())
            .collect();
        let thetas: Vec<Vec<f64>> = (0..4).map(|_| angles(d, &mut rng)).collect();
        let mut b = PatternBuilder::new(d, 1).unwrap();
        let mut want_op = CMatrix::identity(d, d);
        for (t, &basis) in thetas.iter().zip(&bases) {
            b.step(0, t, basis).unwrap();
            want_op = gate(basis, t) * want_op;
        }
        let (g, p) = b.finish().unwrap();
        assert_eq!(g.node_count, 5);
        let psi = input(d, 1, &mut rng);
        let want = want_op * &psi.amplitudes;
        for outcomes in all_outcomes(d, 4) {
            let run = run_pattern_with_outcomes(&g, &p, &psi, &outcomes).unwrap();
            assert_output(&run, &want, 1e-10);
        }
    }
}

fn cx_phase_target(theta: &[f64]) -> CMatrix {
    let d = theta.len();
    CMatrix::from_fn(d * d, d * d, |r, c| {
        if r == c {
            let (n, k) = (r / d, r % d);
            cis(theta[(k + d - n) % d])
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

#[test]
fn cx_phase_pattern_every_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in [2, 3] {
        for _ in 0..20 {
            let theta = angles(d, &mut rng);
            let (g, p) = cx_phase_cx_dagger(&theta).unwrap();
            let order: Vec<String> = p.measurements.iter().map(|m| g.label(m.node)).collect();
            assert_eq!(order, ["w2_0", "w1_0", "w2_1", "w2_2", "w1_1", "w2_3"]);
            let psi = input(d, 2, &mut rng);
            let want = cx_phase_target(&theta) * &psi.amplitudes;
            for outcomes in all_outcomes(d, p.measurements.len()) {
                let run = run_pattern_with_outcomes(&g, &p, &psi, &outcomes).unwrap();
                assert_output(&run, &want, 1e-10);
            }
        }
    }
}

#[test]
fn zz_rotation_for_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let alpha = 0.37;
    let (g, p) = compile_zz_rotation(alpha, 2).unwrap();
    let psi = input(2, 2, &mut rng);
    let zz = [1.0, -1.0, -1.0, 1.0];
    let want = CVector::from_fn(4, |i, _| cis(alpha * zz[i]) * psi.amplitudes[i]);
    for _ in 0..20 {
        assert_output(&run_pattern(&g, &p, &psi, &mut rng).unwrap(), &want, 1e-10);
    }
}

#[test]
fn zz_rotation_for_qutrits() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (alpha, d) = (0.8, 3);
    let (g, p) = compile_zz_rotation(alpha, d).unwrap();
    let psi = input(d, 2, &mut rng);
    // exp(iα Σ_j Z^j ⊗ Z^{-j}) straight from the clock phases.
    let want = CVector::from_fn(9, |i, _| {
        let (n, k) = ((i / d) as f64, (i % d) as f64);
        let s: Complex64 = (0..d)
            .map(|j| cis(2.0 * PI * j as f64 * (n - k) / d as f64))
            .sum();
        cis(alpha * s.re) * psi.amplitudes[i]
    });
    assert_output(&run_pattern(&g, &p, &psi, &mut rng).unwrap(), &want, 1e-10);
}

#[test]
fn edge_order_does_not_change_output() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let theta = angles(3, &mut rng);
    let (g, p) = cx_phase_cx_dagger(&theta).unwrap();
    let psi = input(3, 2, &mut rng);
    let outcomes = [2, 0, 1, 1, 2, 0];
    let base = run_pattern_with_outcomes(&g, &p, &psi, &outcomes).unwrap();
    for _ in 0..10 {
        let mut shuffled = g.clone();
        shuffled.edges.shuffle(&mut rng);
        let run = run_pattern_with_outcomes(&shuffled, &p, &psi, &outcomes).unwrap();
        let err = (&run.output.amplitudes - &base.output.amplitudes).norm();
        assert!(err < 1e-12);
    }
}

#[test]
fn empty_pattern_echoes_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = ClusterGraph::new(3, 2, vec![], vec![vec![0], vec![1]]).unwrap();
    let psi = input(3, 2, &mut rng);
    let run = run_pattern(&g, &MeasurementPattern::default(), &psi, &mut rng).unwrap();
    assert_eq!(run.output.amplitudes, psi.amplitudes);
    assert!(run.transcript.is_empty());
}

#[test]
fn invalid_patterns_are_rejected() {
    let g = ClusterGraph::new(2, 3, vec![Edge(0, 1, 1), Edge(1, 2, 1)], vec![vec![0, 1, 2]]).unwrap();
    let m = |node, basis| Measurement {
        node,
        theta: vec![0.0, 0.0],
        basis,
    };
    use MeasurementBasis::{HDagger, H};
    let bad = [
        vec![m(0, HDagger)],
        vec![m(1, HDagger), m(0, HDagger)],
        vec![m(0, H), m(1, HDagger)],
        vec![m(0, HDagger), m(1, HDagger), m(2, HDagger)],
        vec![m(0, HDagger), m(0, HDagger), m(1, HDagger)],
    ];
    for ms in bad {
        assert!(MeasurementPattern::new(ms).validate(&g).is_err());
    }
    assert!(MeasurementPattern::new(vec![m(0, HDagger), m(1, HDagger)]).validate(&g).is_ok());
}

#[test]
fn forced_outcomes_are_checked() {
    let (g, p) = compile_zz_rotation(0.1, 2).unwrap();
    let psi = QuditState::new(2, vec![0, 1], CVector::from_element(4, Complex64::new(0.5, 0.0))).unwrap();
    assert!(run_pattern_with_outcomes(&g, &p, &psi, &[0; 5]).is_err());
    assert!(run_pattern_with_outcomes(&g, &p, &psi, &[0, 0, 0, 0, 0, 2]).is_err());
}

#[test]
fn json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (g, p) = cx_phase_cx_dagger(&angles(3, &mut rng)).unwrap();
    let g2 = ClusterGraph::from_json(&serde_json::to_string(&g).unwrap()).unwrap();
    assert_eq!(g, g2);
    let p2: MeasurementPattern = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(p, p2);
    let psi = input(3, 2, &mut rng);
    let run = run_pattern(&g, &p, &psi, &mut rng).unwrap();
    let back: PatternRun = serde_json::from_str(&serde_json::to_string(&run).unwrap()).unwrap();
    assert_eq!(run, back);
}
