mod common;

use common::arb_state;
use proptest::prelude::*;
use qrepeater::noise::{
    gate_noise_channel, noisy_measure_z, noisy_two_qubit_gate, swap_gate, transfer_to_shuttle,
    transport_kraus, TwoQubitGate,
};
use qrepeater::quantum::{bell_state, gates, Bell, KrausChannel};

proptest! {
    #[test]
    fn channels_act_linearly(rho in arb_state(2), sigma in arb_state(2), w in 0.0f64..1.0, keep in 0.0f64..1.0) {
        let channel = KrausChannel::depolarizing(1, keep).unwrap();
        let mixed_then = rho.mix(&sigma, w).unwrap().apply_channel(&channel, &[1]).unwrap();
        let then_mixed = rho
            .apply_channel(&channel, &[1])
            .unwrap()
            .mix(&sigma.apply_channel(&channel, &[1]).unwrap(), w)
            .unwrap();
        prop_assert!(mixed_then.max_abs_diff(&then_mixed) < 1e-12);
    }

    #[test]
    fn partial_trace_recovers_factors(a in arb_state(1), b in arb_state(2)) {
        let joint = a.tensor(&b).unwrap();
        prop_assert!(joint.partial_trace(&[0]).unwrap().max_abs_diff(&a) < 1e-12);
        prop_assert!(joint.partial_trace(&[1, 2]).unwrap().max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn noisy_gates_preserve_physicality(rho in arb_state(3), f in 0.25f64..=1.0) {
        let out = noisy_two_qubit_gate(&rho, TwoQubitGate::Cz, 2, 0, f).unwrap();
        prop_assert!(out.physicality().is_physical(1e-9));
        prop_assert!(gate_noise_channel(TwoQubitGate::Cnot, f).unwrap().check_cptp().is_ok());
    }

    #[test]
    fn ideal_swap_twice_is_identity(rho in arb_state(2)) {
        let twice = swap_gate(&swap_gate(&rho, 0, 1, 1.0).unwrap(), 0, 1, 1.0).unwrap();
        prop_assert!(twice.max_abs_diff(&rho) < 1e-12);
        let once = swap_gate(&rho, 0, 1, 1.0).unwrap();
        prop_assert!(once.max_abs_diff(&rho.apply_unitary(&gates::swap(), &[0, 1]).unwrap()) < 1e-12);
    }

    #[test]
    fn measurement_branches_sum_to_one(rho in arb_state(2), eta in 0.5f64..=1.0, q in 0usize..2) {
        let [b0, b1] = noisy_measure_z(&rho, q, eta).unwrap();
        prop_assert!((b0.probability + b1.probability - 1.0).abs() < 1e-12);
        for b in [b0, b1] {
            let post = b.post_state.unwrap();
            prop_assert!(post.physicality().is_physical(1e-9));
        }
    }

    #[test]
    fn transfer_fidelity_increases_with_gate_quality(f1 in 0.3f64..1.0, f2 in 0.3f64..1.0) {
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        let psi = bell_state(Bell::PsiPlus);
        let fid = |f| transfer_to_shuttle(&psi, f).unwrap().fidelity_bell(Bell::PsiPlus).unwrap();
        prop_assert!(fid(lo) <= fid(hi) + 1e-12);
    }

    #[test]
    fn transport_channel_is_cptp(f in 0.26f64..=1.0) {
        prop_assert!(transport_kraus(f).unwrap().check_cptp().is_ok());
    }
}

#[test]
fn measurement_on_basis_state_is_flip_probability() {
    let rho = qrepeater::quantum::DensityMatrix::basis(2, 0b01).unwrap();
    let [b0, b1] = noisy_measure_z(&rho, 1, 0.9).unwrap();
    assert!((b0.probability - 0.1).abs() < 1e-12);
    assert!((b1.probability - 0.9).abs() < 1e-12);
}

#[test]
fn certain_outcome_leaves_degenerate_branch() {
    let rho = qrepeater::quantum::DensityMatrix::basis(2, 0).unwrap();
    let [b0, b1] = noisy_measure_z(&rho, 0, 1.0).unwrap();
    assert!(!b0.degenerate && b1.degenerate);
    assert_eq!(b1.probability, 0.0);
    assert!(b1.post_state.unwrap().physicality().is_physical(1e-12));
}
