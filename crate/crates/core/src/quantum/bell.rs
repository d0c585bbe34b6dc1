use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, DensityMatrix};
use crate::{Error, Result};

/// The four Bell states. `Φ± = (|00> ± |11>)/√2`, `Ψ± = (|01> ± |10>)/√2`.
///
/// The target e-bit throughout the crate is `Ψ⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Pauli frame `(x, z)` relative to `Φ⁺`: the state equals
    /// `(X^x Z^z ⊗ I)|Φ⁺>` up to a global phase. The index is `2x + z`.
    pub fn frame(self) -> (bool, bool) {
        let i = self.index();
        (i & 2 != 0, i & 1 != 0)
    }

    pub fn from_frame(x: bool, z: bool) -> Bell {
        Bell::ALL[(usize::from(x) << 1) | usize::from(z)]
    }

    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            Bell::PhiPlus => [h, z, z, h],
            Bell::PhiMinus => [h, z, z, -h],
            Bell::PsiPlus => [z, h, h, z],
            Bell::PsiMinus => [z, h, -h, z],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bell::PhiPlus => "Φ+",
            Bell::PhiMinus => "Φ-",
            Bell::PsiPlus => "Ψ+",
            Bell::PsiMinus => "Ψ-",
        }
    }
}

/// Rank-one projector onto a Bell vector.
pub fn bell_state(which: Bell) -> DensityMatrix {
    let v = nalgebra::DVector::from_column_slice(&which.amplitudes());
    DensityMatrix::from_matrix_unchecked(&v * v.adjoint()).expect("4x4 projector")
}

/// `F |Ψ⁺><Ψ⁺| + (1-F)/3 (I - |Ψ⁺><Ψ⁺|)`.
pub fn werner(fidelity: f64) -> Result<DensityMatrix> {
    Ok(BellDiagonalState::werner(fidelity)?.to_density_matrix())
}

impl DensityMatrix {
    /// `<b| rho |b>` for a two-qubit state.
    pub fn fidelity_bell(&self, which: Bell) -> Result<f64> {
        if self.n_qubits() != 2 {
            return Err(Error::ArityMismatch {
                channel: 2,
                given: self.n_qubits(),
            });
        }
        Ok(self.expectation_pure(&which.amplitudes()).clamp(0.0, 1.0))
    }
}

/// Diagonal of a two-qubit state in the Bell basis, indexed (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalState {
    weights: [f64; 4],
}

impl BellDiagonalState {
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Unphysical(format!(
                "Bell weights {weights:?} must lie in [0,1] and sum to 1"
            )));
        }
        Ok(Self { weights })
    }

    /// Clips tiny negative roundoff and rescales to unit sum.
    pub(crate) fn renormalized(weights: [f64; 4]) -> Self {
        let clipped = weights.map(|w| w.max(0.0));
        let sum: f64 = clipped.iter().sum();
        Self {
            weights: clipped.map(|w| w / sum),
        }
    }

    /// Werner state around `Ψ⁺`.
    pub fn werner(fidelity: f64) -> Result<Self> {
        crate::error::check_range("werner fidelity", fidelity, 0.25, true, 1.0, "[0.25, 1]")?;
        let rest = (1.0 - fidelity) / 3.0;
        Ok(Self {
            weights: [rest, rest, fidelity, rest],
        })
    }

    pub fn pure(which: Bell) -> Self {
        let mut weights = [0.0; 4];
        weights[which.index()] = 1.0;
        Self { weights }
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    pub fn weight(&self, which: Bell) -> f64 {
        self.weights[which.index()]
    }

    pub fn fidelity(&self) -> f64 {
        self.weight(Bell::PsiPlus)
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let mut data = CMatrix::zeros(4, 4);
        for b in Bell::ALL {
            let v = nalgebra::DVector::from_column_slice(&b.amplitudes());
            data += &v * v.adjoint() * Complex64::new(self.weights[b.index()], 0.0);
        }
        DensityMatrix::from_matrix_unchecked(data).expect("4x4 Bell mixture")
    }

    pub fn max_abs_diff(&self, other: &BellDiagonalState) -> f64 {
        self.weights
            .iter()
            .zip(other.weights.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Bell-basis diagonal of `rho` together with the largest off-diagonal
/// Bell-basis magnitude (zero for Bell-diagonal states).
pub fn to_bell_diagonal(rho: &DensityMatrix) -> Result<(BellDiagonalState, f64)> {
    if rho.n_qubits() != 2 {
        return Err(Error::ArityMismatch {
            channel: 2,
            given: rho.n_qubits(),
        });
    }
    let vecs: Vec<[Complex64; 4]> = Bell::ALL.iter().map(|b| b.amplitudes()).collect();
    let element = |a: &[Complex64; 4], b: &[Complex64; 4]| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                acc += ai.conj() * rho.entry(i, j) * bj;
            }
        }
        acc
    };
    let mut diag = [0.0; 4];
    let mut leakage: f64 = 0.0;
    for (i, a) in vecs.iter().enumerate() {
        for (j, b) in vecs.iter().enumerate() {
            let e = element(a, b);
            if i == j {
                diag[i] = e.re;
            } else {
                leakage = leakage.max(e.norm());
            }
        }
    }
    Ok((BellDiagonalState::renormalized(diag), leakage))
}
