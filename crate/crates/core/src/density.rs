//! Mixed states, white noise and fidelity.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::hermitian_deviation;
use crate::qubit::{check_locals, kron_all, QubitState, MAX_QUBITS};

const TOL: f64 = 1e-10;

/// Hermitian, unit-trace `2ⁿ × 2ⁿ` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n: usize,
    m: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::Dimension {
                expected: dim.next_power_of_two().max(2),
                got: m.ncols(),
            });
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let herm = hermitian_deviation(&m);
        if herm > TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::NotNormalized(tr.re));
        }
        Ok(DensityOperator { n, m })
    }

    pub fn pure(state: &QubitState) -> Self {
        DensityOperator {
            n: state.n_qubits(),
            m: state.projector(),
        }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let dim = 1 << n;
        Ok(DensityOperator {
            n,
            m: DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// `tr(A ρ)` for a dense observable.
    pub fn expectation(&self, a: &DMatrix<Complex64>) -> Result<f64> {
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: a.nrows(),
            });
        }
        Ok(a.component_mul(&self.m.transpose()).sum().re)
    }

    /// `(U₁⊗…⊗Uₙ) ρ (U₁⊗…⊗Uₙ)†`
    pub fn local_unitary(&self, us: &[Matrix2<Complex64>]) -> Result<DensityOperator> {
        check_locals(us, self.n)?;
        let u = kron_all(us);
        Ok(DensityOperator {
            n: self.n,
            m: &u * &self.m * u.adjoint(),
        })
    }

    /// Diagonal in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }
}

/// `(1−p)|ψ⟩⟨ψ| + p·𝟙/2ⁿ`
pub fn add_white_noise(target: &QubitState, p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Probability(p));
    }
    let dim = target.dim();
    let m = target.projector() * Complex64::new(1.0 - p, 0.0)
        + DMatrix::identity(dim, dim) * Complex64::new(p / dim as f64, 0.0);
    Ok(DensityOperator {
        n: target.n_qubits(),
        m,
    })
}

/// `⟨ψ|ρ|ψ⟩`
pub fn fidelity(rho: &DensityOperator, target: &QubitState) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            got: target.dim(),
        });
    }
    let col = target.to_column();
    let f = (col.adjoint() * &rho.m * &col)[(0, 0)].re;
    Ok(f.clamp(0.0, 1.0))
}
