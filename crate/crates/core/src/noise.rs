//! Operation noise models: depolarizing two-qubit gates, flip-error Z
//! measurements, the three-CNOT swap and the transport channel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::check_range;
use crate::quantum::{gates, CMatrix, DensityMatrix, KrausChannel};
use crate::{Error, Result};

/// Below this branch probability a measurement outcome is treated as
/// impossible and its post-state is not normalized.
pub const DEGENERATE_PROBABILITY: f64 = 1e-15;

/// Gate fidelity and measurement accuracy for local operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateNoise {
    /// Probability that a two-qubit gate acts ideally.
    pub f_op: f64,
    /// Probability that a Z measurement reports the right bit.
    pub eta_meas: f64,
}

impl GateNoise {
    pub fn new(f_op: f64, eta_meas: f64) -> Result<Self> {
        check_range("f_op", f_op, 0.25, false, 1.0, "(0.25, 1]")?;
        check_range("eta_meas", eta_meas, 0.5, false, 1.0, "(0.5, 1]")?;
        Ok(Self { f_op, eta_meas })
    }

    pub fn ideal() -> Self {
        Self {
            f_op: 1.0,
            eta_meas: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.f_op, self.eta_meas).map(|_| ())
    }
}

impl Default for GateNoise {
    fn default() -> Self {
        Self {
            f_op: 0.995,
            eta_meas: 0.99,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoQubitGate {
    Cz,
    Cnot,
}

impl TwoQubitGate {
    pub fn matrix(self) -> CMatrix {
        match self {
            TwoQubitGate::Cz => gates::cz(),
            TwoQubitGate::Cnot => gates::cnot(),
        }
    }
}

/// Ideal gate followed by two-qubit depolarizing noise on the gate pair:
/// `f_op U rho U† + (1 - f_op) I/4 ⊗ tr_pair(U rho U†)`.
pub fn noisy_two_qubit_gate(
    rho: &DensityMatrix,
    gate: TwoQubitGate,
    control: usize,
    target: usize,
    f_op: f64,
) -> Result<DensityMatrix> {
    if control == target {
        return Err(Error::DuplicateQubit);
    }
    check_range("f_op", f_op, 0.0, true, 1.0, "[0, 1]")?;
    let pair = [control, target];
    let ideal = rho.apply_unitary(&gate.matrix(), &pair)?;
    if f_op == 1.0 {
        return Ok(ideal);
    }
    let mixed = ideal.replace_with_mixed(&pair)?;
    ideal.mix(&mixed, f_op)
}

/// The same gate noise as an explicit two-qubit Kraus channel.
pub fn gate_noise_channel(gate: TwoQubitGate, f_op: f64) -> Result<KrausChannel> {
    KrausChannel::unitary(gate.matrix())?.then(&KrausChannel::depolarizing(2, f_op)?)
}

/// Outcome of one branch of a noisy Z measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub outcome: u8,
    pub probability: f64,
    /// Remaining qubits after the measured one is discarded; `None` when the
    /// measured qubit was the whole register.
    pub post_state: Option<DensityMatrix>,
    /// Set when the branch probability is below [`DEGENERATE_PROBABILITY`];
    /// the post-state is then maximally mixed rather than normalized.
    pub degenerate: bool,
}

/// `sqrt(E_b)` for `E_b = eta P_b + (1 - eta) P_(1-b)`.
pub fn measurement_operators(eta: f64) -> [CMatrix; 2] {
    let keep = Complex64::new(eta.sqrt(), 0.0);
    let flip = Complex64::new((1.0 - eta).sqrt(), 0.0);
    [0u8, 1].map(|b| gates::projector(b) * keep + gates::projector(1 - b) * flip)
}

/// Non-selective version of the noisy measurement (both branches summed).
pub fn measurement_channel(eta: f64) -> Result<KrausChannel> {
    check_range("eta_meas", eta, 0.0, true, 1.0, "[0, 1]")?;
    KrausChannel::new(measurement_operators(eta).to_vec())
}

/// Noisy computational-basis measurement of `qubit`, returning both
/// branches (outcome 0 first).
pub fn noisy_measure_z(
    rho: &DensityMatrix,
    qubit: usize,
    eta: f64,
) -> Result<[MeasurementRecord; 2]> {
    check_range("eta_meas", eta, 0.0, true, 1.0, "[0, 1]")?;
    if qubit >= rho.n_qubits() {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            n_qubits: rho.n_qubits(),
        });
    }
    let ops = measurement_operators(eta);
    let branch = |b: u8| -> Result<MeasurementRecord> {
        let unnormalized =
            DensityMatrix::from_unnormalized(rho.sandwich(&ops[b as usize], &[qubit])?)?;
        let probability = unnormalized.trace().re;
        let (probability, degenerate) = if probability < DEGENERATE_PROBABILITY {
            (0.0, true)
        } else {
            (probability, false)
        };
        let post_state = if rho.n_qubits() == 1 {
            None
        } else if degenerate {
            Some(DensityMatrix::maximally_mixed(rho.n_qubits() - 1)?)
        } else {
            Some(unnormalized.trace_out(qubit)?.scaled(1.0 / probability))
        };
        Ok(MeasurementRecord {
            outcome: b,
            probability,
            post_state,
            degenerate,
        })
    };
    Ok([branch(0)?, branch(1)?])
}

/// Swap of qubits `a` and `b` as `CNOT(a→b) CNOT(b→a) CNOT(a→b)`, each gate
/// carrying the depolarizing noise of [`noisy_two_qubit_gate`].
pub fn swap_gate(rho: &DensityMatrix, a: usize, b: usize, f_op: f64) -> Result<DensityMatrix> {
    if a == b {
        return Err(Error::DuplicateQubit);
    }
    let rho = noisy_two_qubit_gate(rho, TwoQubitGate::Cnot, a, b, f_op)?;
    let rho = noisy_two_qubit_gate(&rho, TwoQubitGate::Cnot, b, a, f_op)?;
    noisy_two_qubit_gate(&rho, TwoQubitGate::Cnot, a, b, f_op)
}

/// Single-qubit depolarizing strength that leaves a perfect e-bit at
/// fidelity `f_move` when applied to one of its qubits.
pub fn transport_keep_probability(f_move: f64) -> Result<f64> {
    check_range("f_move", f_move, 0.25, false, 1.0, "(0.25, 1]")?;
    Ok((4.0 * f_move - 1.0) / 3.0)
}

/// Depolarizing noise on the transported qubit.
pub fn transport_channel(rho: &DensityMatrix, qubit: usize, f_move: f64) -> Result<DensityMatrix> {
    let keep = transport_keep_probability(f_move)?;
    if keep == 1.0 {
        return Ok(rho.clone());
    }
    let mixed = rho.replace_with_mixed(&[qubit])?;
    rho.mix(&mixed, keep)
}

pub fn transport_kraus(f_move: f64) -> Result<KrausChannel> {
    KrausChannel::depolarizing(1, transport_keep_probability(f_move)?)
}

/// Moves one half of a two-qubit e-bit from its communication qubit onto a
/// fresh `|0>` shuttle via [`swap_gate`], and returns the (other half,
/// shuttle) pair.
pub fn transfer_to_shuttle(ebit: &DensityMatrix, f_op: f64) -> Result<DensityMatrix> {
    if ebit.n_qubits() != 2 {
        return Err(Error::ArityMismatch {
            channel: 2,
            given: ebit.n_qubits(),
        });
    }
    let register = ebit.tensor(&DensityMatrix::basis(1, 0)?)?;
    let swapped = swap_gate(&register, 1, 2, f_op)?;
    swapped.partial_trace(&[0, 2])
}

impl DensityMatrix {
    pub(crate) fn from_unnormalized(data: CMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_matrix_unchecked(data)
    }

    pub(crate) fn scaled(&self, factor: f64) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.matrix() * Complex64::new(factor, 0.0))
            .expect("same shape")
    }
}
