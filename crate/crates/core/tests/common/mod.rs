#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use qrepeater::quantum::{BellDiagonalState, CMatrix, DensityMatrix};

/// Random mixed state `A A† / tr(A A†)` from raw real/imaginary parts.
pub fn state_from_parts(n_qubits: usize, parts: &[f64]) -> DensityMatrix {
    let d = 1 << n_qubits;
    let a = CMatrix::from_fn(d, d, |r, c| {
        let k = 2 * (r * d + c);
        Complex64::new(parts[k], parts[k + 1])
    });
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix(m / tr).expect("positive by construction")
}

pub fn arb_state(n_qubits: usize) -> impl Strategy<Value = DensityMatrix> {
    let d = 1usize << n_qubits;
    prop::collection::vec(-1.0f64..1.0, 2 * d * d)
        .prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(move |v| state_from_parts(n_qubits, &v))
}

pub fn arb_bell_diagonal() -> impl Strategy<Value = BellDiagonalState> {
    (0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0).prop_map(|(a, b, c, d)| {
        let s = a + b + c + d;
        let w = [a / s, b / s, c / s];
        BellDiagonalState::new([w[0], w[1], w[2], 1.0 - w[0] - w[1] - w[2]]).expect("normalized")
    })
}
