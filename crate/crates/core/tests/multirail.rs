use qudit_optics::linalg::{max_abs_diff, random_unitary};
use qudit_optics::multirail::{clements_compile, naive_czbar};
use qudit_optics::qudit::hadamard;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn clements_round_trip_on_random_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for d in 2..=6 {
        for _ in 0..100 {
            let u = random_unitary(d, &mut rng);
            let mesh = clements_compile(&u).unwrap();
            assert_eq!(mesh.beamsplitters.len(), d * (d - 1) / 2);
            assert!(max_abs_diff(mesh.recompose().as_slice(), u.as_slice()) < 1e-8);
        }
    }
}

#[test]
fn qubit_hadamard_needs_one_beamsplitter() {
    let h = hadamard(2).unwrap().into_matrix();
    let mesh = clements_compile(&h).unwrap();
    assert_eq!(mesh.beamsplitters.len(), 1);
    assert!(max_abs_diff(mesh.recompose().as_slice(), h.as_slice()) < 1e-8);
}

#[test]
fn qutrit_cascade_full_simulation() {
    let c = naive_czbar(3).unwrap();
    assert_eq!(c.total_modes, 14);
    let v = c.verify().unwrap();
    assert!(v.fidelity >= 1.0 - 1e-6, "fidelity {}", v.fidelity);
    for p in &v.probabilities {
        assert!((p - c.success_probability).abs() < 1e-9);
    }
    assert!((c.success_probability - 0.0016).abs() < 1e-4);
}

#[test]
fn ququart_cascade_is_too_large_to_verify() {
    let c = naive_czbar(4).unwrap();
    assert!(c.success_probability <= 16f64.powi(-3));
    assert!(c.verify().is_err());
}
