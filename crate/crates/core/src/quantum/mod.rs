//! Dense density-matrix substrate for registers of one to four qubits.
//!
//! Qubit ordering is big-endian everywhere in the crate: qubit 0 is the most
//! significant bit of a computational-basis index, so `|q0 q1 .. q(n-1)>` sits
//! at index `sum_k q_k * 2^(n-1-k)`.

mod bell;
mod channel;
pub mod gates;
mod state;

pub use bell::{bell_state, to_bell_diagonal, werner, Bell, BellDiagonalState};
pub use channel::KrausChannel;
pub use state::{DensityMatrix, Physicality};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type ComplexAmplitude = Complex64;
pub type CMatrix = DMatrix<Complex64>;

pub const MAX_QUBITS: usize = 4;
/// Tolerance for trace, Hermiticity and positivity checks.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Tolerance for exact algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Reads the bits of `index` at positions `qubits` into a packed value
/// (first listed qubit becomes the most significant bit).
pub(crate) fn gather(index: usize, qubits: &[usize], n_qubits: usize) -> usize {
    qubits.iter().fold(0, |acc, &q| {
        (acc << 1) | ((index >> (n_qubits - 1 - q)) & 1)
    })
}

/// Inverse of [`gather`]: spreads the packed `value` onto `qubits`.
pub(crate) fn scatter(value: usize, qubits: &[usize], n_qubits: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (j, &q)| {
        acc | (((value >> (k - 1 - j)) & 1) << (n_qubits - 1 - q))
    })
}

pub(crate) fn qubit_mask(qubits: &[usize], n_qubits: usize) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| acc | (1 << (n_qubits - 1 - q)))
}

pub(crate) fn validate_targets(targets: &[usize], n_qubits: usize) -> crate::Result<()> {
    for (i, &q) in targets.iter().enumerate() {
        if q >= n_qubits {
            return Err(crate::Error::QubitOutOfRange { index: q, n_qubits });
        }
        if targets[..i].contains(&q) {
            return Err(crate::Error::DuplicateQubit);
        }
    }
    Ok(())
}

/// Lifts an operator on `targets` to the full `n_qubits` register.
pub fn embed(op: &CMatrix, targets: &[usize], n_qubits: usize) -> crate::Result<CMatrix> {
    validate_targets(targets, n_qubits)?;
    let k = targets.len();
    if op.nrows() != 1 << k || op.ncols() != 1 << k {
        return Err(crate::Error::ArityMismatch {
            channel: op.nrows().trailing_zeros() as usize,
            given: k,
        });
    }
    let dim = 1 << n_qubits;
    let mask = qubit_mask(targets, n_qubits);
    let mut full = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let sub_in = gather(col, targets, n_qubits);
        let rest = col & !mask;
        for sub_out in 0..(1 << k) {
            let amp = op[(sub_out, sub_in)];
            if amp != Complex64::new(0.0, 0.0) {
                full[(rest | scatter(sub_out, targets, n_qubits), col)] += amp;
            }
        }
    }
    Ok(full)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim >= 2 && dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}
