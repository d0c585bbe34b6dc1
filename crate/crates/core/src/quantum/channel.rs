use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{gates, max_abs_diff, qubits_for_dim, CMatrix, MAX_QUBITS, PHYSICAL_TOL};
use crate::{Error, Result};

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    n_qubits: usize,
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    /// Builds a channel, rejecting operator sets that are not trace
    /// preserving within [`PHYSICAL_TOL`].
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or(Error::Dimension { rows: 0, cols: 0 })?;
        let dim = first.nrows();
        let n_qubits = qubits_for_dim(dim).ok_or(Error::Dimension {
            rows: first.nrows(),
            cols: first.ncols(),
        })?;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        if let Some(bad) = operators
            .iter()
            .find(|k| k.nrows() != dim || k.ncols() != dim)
        {
            return Err(Error::Dimension {
                rows: bad.nrows(),
                cols: bad.ncols(),
            });
        }
        let channel = Self {
            n_qubits,
            operators,
        };
        let tp = channel.trace_preservation_error();
        if tp > PHYSICAL_TOL {
            return Err(Error::NotTracePreserving(tp));
        }
        Ok(channel)
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            operators: vec![gates::identity(n_qubits)],
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// `rho -> keep * rho + (1 - keep) * I/d`, written with the Pauli basis.
    pub fn depolarizing(n_qubits: usize, keep: f64) -> Result<Self> {
        crate::error::check_range("keep", keep, 0.0, true, 1.0, "[0, 1]")?;
        let d2 = (1usize << (2 * n_qubits)) as f64;
        let noise = (1.0 - keep) / d2;
        let operators = gates::pauli_basis(n_qubits)
            .into_iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let w = if i == 0 { keep + noise } else { noise };
                (w > 0.0).then(|| p * Complex64::new(w.sqrt(), 0.0))
            })
            .collect();
        Self::new(operators)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// Channel applying `self` first and then `after`.
    pub fn then(&self, after: &KrausChannel) -> Result<KrausChannel> {
        if self.n_qubits != after.n_qubits {
            return Err(Error::DimensionMismatch(
                1 << self.n_qubits,
                1 << after.n_qubits,
            ));
        }
        let operators = after
            .operators
            .iter()
            .flat_map(|a| self.operators.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            n_qubits: self.n_qubits,
            operators,
        })
    }

    /// `max |sum K†K - I|`.
    pub fn trace_preservation_error(&self) -> f64 {
        let dim = 1 << self.n_qubits;
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        max_abs_diff(&sum, &CMatrix::identity(dim, dim))
    }

    /// Unnormalized Choi matrix `sum_ij |i><j| ⊗ E(|i><j|)`.
    pub fn choi(&self) -> CMatrix {
        let dim = 1 << self.n_qubits;
        let mut choi = CMatrix::zeros(dim * dim, dim * dim);
        for k in &self.operators {
            let v = nalgebra::DVector::from_iterator(
                dim * dim,
                (0..dim * dim).map(|idx| k[(idx % dim, idx / dim)]),
            );
            choi += &v * v.adjoint();
        }
        choi
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.choi())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Both CPTP conditions at [`PHYSICAL_TOL`].
    pub fn check_cptp(&self) -> Result<()> {
        let tp = self.trace_preservation_error();
        if tp > PHYSICAL_TOL {
            return Err(Error::NotTracePreserving(tp));
        }
        let min = self.choi_min_eigenvalue();
        if min < -PHYSICAL_TOL {
            return Err(Error::NotCompletelyPositive(min));
        }
        Ok(())
    }
}
