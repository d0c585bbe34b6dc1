//! Standard one- and two-qubit gate matrices (big-endian, control first).

use super::CMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real(rows: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, rows, data.iter().map(|&x| c(x, 0.0)))
}

pub fn identity(n_qubits: usize) -> CMatrix {
    CMatrix::identity(1 << n_qubits, 1 << n_qubits)
}

pub fn pauli_x() -> CMatrix {
    real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    real(2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    real(2, &[h, h, h, -h])
}

/// `exp(-i theta X / 2)`.
pub fn rx(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
}

/// CNOT with the first qubit as control.
pub fn cnot() -> CMatrix {
    #[rustfmt::skip]
    let m = real(4, &[
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
    ]);
    m
}

pub fn cz() -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(-1.0, 0.0),
    ]))
}

pub fn swap() -> CMatrix {
    #[rustfmt::skip]
    let m = real(4, &[
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    ]);
    m
}

/// Projector onto `|bit>` for a single qubit.
pub fn projector(bit: u8) -> CMatrix {
    if bit == 0 {
        real(2, &[1.0, 0.0, 0.0, 0.0])
    } else {
        real(2, &[0.0, 0.0, 0.0, 1.0])
    }
}

/// All `4^n` tensor products of {I, X, Y, Z} on `n_qubits` qubits.
pub fn pauli_basis(n_qubits: usize) -> Vec<CMatrix> {
    let singles = [identity(1), pauli_x(), pauli_y(), pauli_z()];
    let mut out = vec![CMatrix::identity(1, 1)];
    for _ in 0..n_qubits {
        out = out
            .iter()
            .flat_map(|p| singles.iter().map(move |s| p.kronecker(s)))
            .collect();
    }
    out
}
