//! Recurrence purification of `Ψ⁺` e-bits.
//!
//! One round takes two pairs `(kept_a, kept_b)` and `(sac_a, sac_b)`, applies
//! a noisy CNOT from the kept qubit to the sacrificed qubit at each node,
//! measures both sacrificed qubits with flip error `1 - eta`, and keeps the
//! pair when the two outcomes agree. Register order inside a round is
//! `(kept_a, kept_b, sac_a, sac_b)`.
//!
//! Between rounds a [`Protocol`] decides how the pair is prepared. A bare
//! bilateral CNOT only detects bit-flip errors, so with no preparation the
//! phase errors pile up and repeated rounds drift back towards `F = 1/2`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::noise::{noisy_measure_z, noisy_two_qubit_gate, GateNoise, TwoQubitGate};
use crate::quantum::{bell_state, gates, Bell, BellDiagonalState, DensityMatrix};
use crate::{Error, Result};

/// Below this acceptance probability a round is reported as failed.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-12;

/// Iteration cap for [`fixed_point_fidelity`].
pub const MAX_FIXED_POINT_ITERATIONS: usize = 64;

/// Pair preparation applied before every round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Local `Rx(π/2) ⊗ Rx(-π/2)` rotation, which exchanges the `Φ⁻` and
    /// `Ψ⁻` components so phase errors become detectable in the next round.
    Dejmps,
    /// Isotropic twirl back to a Werner state.
    Bbpssw,
    /// No preparation.
    Bare,
}

impl Protocol {
    pub fn prepare(self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            Protocol::Dejmps => {
                let r = rho.apply_unitary(&gates::rx(FRAC_PI_2), &[0])?;
                r.apply_unitary(&gates::rx(-FRAC_PI_2), &[1])
            }
            Protocol::Bbpssw => {
                let f = rho.fidelity_bell(Bell::PsiPlus)?;
                Ok(twirled(f).to_density_matrix())
            }
            Protocol::Bare => Ok(rho.clone()),
        }
    }

    pub fn prepare_bell_diagonal(self, state: &BellDiagonalState) -> BellDiagonalState {
        let w = state.weights();
        match self {
            Protocol::Dejmps => BellDiagonalState::renormalized([w[0], w[3], w[2], w[1]]),
            Protocol::Bbpssw => twirled(state.fidelity()),
            Protocol::Bare => *state,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Dejmps => "dejmps",
            Protocol::Bbpssw => "bbpssw",
            Protocol::Bare => "bare",
        }
    }
}

fn twirled(fidelity: f64) -> BellDiagonalState {
    let rest = (1.0 - fidelity) / 3.0;
    BellDiagonalState::renormalized([rest, rest, fidelity, rest])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurificationRound {
    pub input_fidelity: f64,
    pub output_state: DensityMatrix,
    pub p_puri: f64,
    pub output_fidelity: f64,
}

/// One measurement branch of a purification round, before post-selection.
#[derive(Debug, Clone, PartialEq)]
pub struct PurificationBranch {
    pub outcomes: (u8, u8),
    pub probability: f64,
    /// Normalized kept pair; `None` for impossible branches.
    pub state: Option<DensityMatrix>,
}

impl PurificationBranch {
    pub fn accepted(&self) -> bool {
        self.outcomes.0 == self.outcomes.1
    }
}

fn check_pair(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() != 2 {
        return Err(Error::ArityMismatch {
            channel: 2,
            given: rho.n_qubits(),
        });
    }
    rho.check_physical()
}

/// All four detection branches of the bilateral-CNOT circuit.
pub fn purify_branches(
    kept: &DensityMatrix,
    sacrificed: &DensityMatrix,
    noise: &GateNoise,
) -> Result<Vec<PurificationBranch>> {
    check_pair(kept)?;
    check_pair(sacrificed)?;
    let rho = kept.tensor(sacrificed)?;
    let rho = noisy_two_qubit_gate(&rho, TwoQubitGate::Cnot, 0, 2, noise.f_op)?;
    let rho = noisy_two_qubit_gate(&rho, TwoQubitGate::Cnot, 1, 3, noise.f_op)?;

    let mut branches = Vec::with_capacity(4);
    for first in noisy_measure_z(&rho, 2, noise.eta_meas)? {
        let rest = first.post_state.expect("four-qubit register");
        for second in noisy_measure_z(&rest, 2, noise.eta_meas)? {
            let probability = first.probability * second.probability;
            let state = (!first.degenerate && !second.degenerate)
                .then(|| second.post_state.expect("three-qubit register"));
            branches.push(PurificationBranch {
                outcomes: (first.outcome, second.outcome),
                probability,
                state,
            });
        }
    }
    Ok(branches)
}

/// One purification round, post-selected on equal detection outcomes.
pub fn purify_round(
    kept: &DensityMatrix,
    sacrificed: &DensityMatrix,
    noise: &GateNoise,
) -> Result<PurificationRound> {
    let input_fidelity = kept.fidelity_bell(Bell::PsiPlus)?;
    let branches = purify_branches(kept, sacrificed, noise)?;
    let mut p_puri = 0.0;
    let mut accepted: Option<DensityMatrix> = None;
    for b in branches.iter().filter(|b| b.accepted()) {
        let Some(state) = &b.state else { continue };
        let weighted = state.scaled(b.probability);
        p_puri += b.probability;
        accepted = Some(match accepted {
            None => weighted,
            Some(acc) => acc.add(&weighted)?,
        });
    }
    if p_puri < MIN_SUCCESS_PROBABILITY {
        return Err(Error::DegeneratePurification(p_puri));
    }
    let output_state = accepted.expect("nonzero acceptance").scaled(1.0 / p_puri);
    let output_fidelity = output_state.fidelity_bell(Bell::PsiPlus)?;
    Ok(PurificationRound {
        input_fidelity,
        output_state,
        p_puri,
        output_fidelity,
    })
}

/// `N` nested rounds; round `k` purifies two copies of the round `k-1`
/// output, so `2^N` input pairs are consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct PurificationSchedule {
    pub initial: DensityMatrix,
    pub rounds: Vec<PurificationRound>,
}

impl PurificationSchedule {
    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn pairs_consumed(&self) -> u64 {
        1u64 << self.rounds.len()
    }

    pub fn initial_fidelity(&self) -> f64 {
        self.initial.fidelity_bell(Bell::PsiPlus).unwrap_or(0.0)
    }

    /// Fidelity after `0..=N` rounds.
    pub fn fidelities(&self) -> Vec<f64> {
        std::iter::once(self.initial_fidelity())
            .chain(self.rounds.iter().map(|r| r.output_fidelity))
            .collect()
    }

    pub fn success_probabilities(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.p_puri).collect()
    }

    pub fn state_after(&self, rounds: usize) -> &DensityMatrix {
        if rounds == 0 {
            &self.initial
        } else {
            &self.rounds[rounds - 1].output_state
        }
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.state_after(self.rounds.len())
    }

    pub fn final_fidelity(&self) -> f64 {
        *self
            .fidelities()
            .last()
            .expect("at least the initial entry")
    }
}

pub fn purify_n_rounds(
    initial: &DensityMatrix,
    n: usize,
    noise: &GateNoise,
    protocol: Protocol,
) -> Result<PurificationSchedule> {
    check_pair(initial)?;
    let mut rounds = Vec::with_capacity(n);
    let mut current = initial.clone();
    for _ in 0..n {
        let prepared = protocol.prepare(&current)?;
        let round = purify_round(&prepared, &prepared, noise)?;
        current = round.output_state.clone();
        rounds.push(round);
    }
    Ok(PurificationSchedule {
        initial: initial.clone(),
        rounds,
    })
}

/// Plateau fidelity reached by repeated rounds starting from a perfect pair.
pub fn fixed_point_fidelity(noise: &GateNoise, protocol: Protocol, tolerance: f64) -> Result<f64> {
    let mut state = bell_state(Bell::PsiPlus);
    let mut fidelity = 1.0;
    for _ in 0..MAX_FIXED_POINT_ITERATIONS {
        let prepared = protocol.prepare(&state)?;
        let round = purify_round(&prepared, &prepared, noise)?;
        let delta = (round.output_fidelity - fidelity).abs();
        fidelity = round.output_fidelity;
        state = round.output_state;
        if delta < tolerance {
            return Ok(fidelity);
        }
    }
    Err(Error::NoConvergence(MAX_FIXED_POINT_ITERATIONS))
}

/// Closed-form round for Bell-diagonal inputs.
///
/// With Bell-diagonal pairs every reduced state of the gate pairs is
/// maximally mixed, so the two noisy CNOTs act as `f² (ideal) + (1 - f²) I/16`.
/// In the Pauli frame of `Φ⁺` the ideal bilateral CNOT maps
/// `(x1, z1), (x2, z2)` to a kept pair `(x1, z1 ⊕ z2)` and a detection
/// parity `x1 ⊕ x2`; measurement flips corrupt that parity.
pub fn purify_round_bell_diagonal(
    kept: &BellDiagonalState,
    sacrificed: &BellDiagonalState,
    noise: &GateNoise,
) -> Result<(BellDiagonalState, f64)> {
    let f2 = noise.f_op * noise.f_op;
    let eta = noise.eta_meas;
    let accept_even = eta * eta + (1.0 - eta) * (1.0 - eta);
    let accept_odd = 2.0 * eta * (1.0 - eta);
    let mut out = [0.0; 4];
    for b1 in Bell::ALL {
        let (x1, z1) = b1.frame();
        for b2 in Bell::ALL {
            let (x2, z2) = b2.frame();
            let weight = kept.weight(b1) * sacrificed.weight(b2);
            let accept = if x1 ^ x2 { accept_odd } else { accept_even };
            out[Bell::from_frame(x1, z1 ^ z2).index()] += f2 * weight * accept;
        }
    }
    for w in out.iter_mut() {
        *w += (1.0 - f2) * 0.5 * 0.25;
    }
    let p: f64 = out.iter().sum();
    if p < MIN_SUCCESS_PROBABILITY {
        return Err(Error::DegeneratePurification(p));
    }
    Ok((BellDiagonalState::renormalized(out.map(|w| w / p)), p))
}

/// Bell-diagonal counterpart of [`purify_n_rounds`]: `(state, p_puri)` per
/// round.
pub fn purify_n_rounds_bell_diagonal(
    initial: &BellDiagonalState,
    n: usize,
    noise: &GateNoise,
    protocol: Protocol,
) -> Result<Vec<(BellDiagonalState, f64)>> {
    let mut current = *initial;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let prepared = protocol.prepare_bell_diagonal(&current);
        let (next, p) = purify_round_bell_diagonal(&prepared, &prepared, noise)?;
        out.push((next, p));
        current = next;
    }
    Ok(out)
}

impl DensityMatrix {
    pub(crate) fn add(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        DensityMatrix::from_unnormalized(self.matrix() + other.matrix())
    }
}
