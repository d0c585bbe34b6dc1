use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{
    embed, gather, max_abs_diff, qubit_mask, qubits_for_dim, scatter, validate_targets, CMatrix,
    KrausChannel, MAX_QUBITS, PHYSICAL_TOL,
};
use crate::{Error, Result};

/// Deviation of a matrix from the density-operator conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl Physicality {
    pub fn is_physical(&self, tol: f64) -> bool {
        self.trace_error <= tol && self.hermiticity_error <= tol && self.min_eigenvalue >= -tol
    }
}

/// Density operator on 1..=4 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: CMatrix,
}

impl DensityMatrix {
    /// Wraps `data`, rejecting matrices that are not physical within
    /// [`PHYSICAL_TOL`].
    pub fn from_matrix(data: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(data)?;
        rho.check_physical()?;
        Ok(rho)
    }

    /// Wraps `data` after checking only the shape.
    pub(crate) fn from_matrix_unchecked(data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::Dimension {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        let n_qubits = qubits_for_dim(data.nrows()).ok_or(Error::Dimension {
            rows: data.nrows(),
            cols: data.ncols(),
        })?;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        Ok(Self { n_qubits, data })
    }

    /// `|psi><psi|` for a normalized amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > PHYSICAL_TOL {
            return Err(Error::Unphysical(format!("state vector norm² {norm}")));
        }
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        Self::from_matrix(&v * v.adjoint())
    }

    /// Computational basis state `|index>` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(Error::QubitOutOfRange { index, n_qubits });
        }
        let mut data = CMatrix::zeros(dim, dim);
        data[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, data })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let dim = 1 << n_qubits;
        let data = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self { n_qubits, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn physicality(&self) -> Physicality {
        let trace_error = (self.trace() - Complex64::new(1.0, 0.0)).norm();
        let hermiticity_error = max_abs_diff(&self.data, &self.data.adjoint());
        let min_eigenvalue = self.eigenvalues().last().copied().unwrap_or(0.0);
        Physicality {
            trace_error,
            hermiticity_error,
            min_eigenvalue,
        }
    }

    pub fn check_physical(&self) -> Result<()> {
        let p = self.physicality();
        if p.is_physical(PHYSICAL_TOL) {
            Ok(())
        } else {
            Err(Error::Unphysical(format!(
                "trace error {:e}, hermiticity error {:e}, min eigenvalue {:e}",
                p.trace_error, p.hermiticity_error, p.min_eigenvalue
            )))
        }
    }

    /// Kronecker product `self ⊗ other`; `self` supplies the leading qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        Ok(Self {
            n_qubits: n,
            data: self.data.kronecker(&other.data),
        })
    }

    /// Reduced state on `keep`, with the kept qubits in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        validate_targets(keep, self.n_qubits)?;
        let n = self.n_qubits;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let mut out = CMatrix::zeros(1 << k, 1 << k);
        for t in 0..(1 << traced.len()) {
            let t_bits = scatter(t, &traced, n);
            for i in 0..(1 << k) {
                let row = t_bits | scatter(i, keep, n);
                for j in 0..(1 << k) {
                    out[(i, j)] += self.data[(row, t_bits | scatter(j, keep, n))];
                }
            }
        }
        Ok(Self {
            n_qubits: k,
            data: out,
        })
    }

    /// Removes a single qubit by tracing it out.
    pub fn trace_out(&self, qubit: usize) -> Result<DensityMatrix> {
        let keep: Vec<usize> = (0..self.n_qubits).filter(|&q| q != qubit).collect();
        if keep.len() == self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        self.partial_trace(&keep)
    }

    /// `U rho U†` with `u` acting on `on`.
    pub fn apply_unitary(&self, u: &CMatrix, on: &[usize]) -> Result<DensityMatrix> {
        let full = embed(u, on, self.n_qubits)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            data: &full * &self.data * full.adjoint(),
        })
    }

    /// Sandwich `K rho K†` without renormalization (one instrument branch).
    pub(crate) fn sandwich(&self, k: &CMatrix, on: &[usize]) -> Result<CMatrix> {
        let full = embed(k, on, self.n_qubits)?;
        Ok(&full * &self.data * full.adjoint())
    }

    /// `sum_i K_i rho K_i†` with the channel acting on `on`.
    pub fn apply_channel(&self, channel: &KrausChannel, on: &[usize]) -> Result<DensityMatrix> {
        if channel.n_qubits() != on.len() {
            return Err(Error::ArityMismatch {
                channel: channel.n_qubits(),
                given: on.len(),
            });
        }
        validate_targets(on, self.n_qubits)?;
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        for k in channel.operators() {
            out += self.sandwich(k, on)?;
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            data: out,
        })
    }

    /// Replaces the qubits in `qubits` by the maximally mixed state while
    /// keeping the reduced state of the rest: `I/2^k ⊗ tr_qubits(rho)`.
    pub fn replace_with_mixed(&self, qubits: &[usize]) -> Result<DensityMatrix> {
        validate_targets(qubits, self.n_qubits)?;
        let n = self.n_qubits;
        let dim = self.dim();
        let k = qubits.len();
        let scale = Complex64::new(1.0 / (1 << k) as f64, 0.0);
        if k == n {
            return Self::maximally_mixed(n);
        }
        let rest: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
        let reduced = self.partial_trace(&rest)?;
        let mask = qubit_mask(qubits, n);
        let mut out = CMatrix::zeros(dim, dim);
        for row in 0..dim {
            for col in 0..dim {
                if row & mask == col & mask {
                    let r = gather(row, &rest, n);
                    let c = gather(col, &rest, n);
                    out[(row, col)] = reduced.data[(r, c)] * scale;
                }
            }
        }
        Ok(Self {
            n_qubits: n,
            data: out,
        })
    }

    /// Convex combination `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<DensityMatrix> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            data: &self.data * Complex64::new(weight, 0.0)
                + &other.data * Complex64::new(1.0 - weight, 0.0),
        })
    }

    /// `<psi| rho |psi>` for a normalized vector.
    pub fn expectation_pure(&self, psi: &[Complex64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in psi.iter().enumerate() {
            for (j, b) in psi.iter().enumerate() {
                acc += a.conj() * self.data[(i, j)] * b;
            }
        }
        acc.re
    }

    /// `tr(rho sigma)`.
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        (&self.data * &other.data).trace().re
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.n_qubits != other.n_qubits {
            return f64::INFINITY;
        }
        max_abs_diff(&self.data, &other.data)
    }

    /// Rescales to unit trace.
    pub(crate) fn normalized(data: CMatrix) -> Result<DensityMatrix> {
        let tr = data.trace().re;
        let rho = Self::from_matrix_unchecked(data)?;
        Ok(Self {
            n_qubits: rho.n_qubits,
            data: rho.data * Complex64::new(1.0 / tr, 0.0),
        })
    }
}
