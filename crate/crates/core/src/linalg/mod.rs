//! Dense linear algebra on small Hilbert spaces.
//!
//! Tensor factors are ordered most-significant-left: in `a ⊗ b` the index of
//! `a` varies slowest. Every composite-system routine in the crate follows
//! this convention.

mod blocks;
pub mod eig;
mod factor;
pub mod matrix;
pub mod measures;
pub mod povm;
pub mod random;
pub mod state;

use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;

pub use eig::HermitianEig;
pub use matrix::{partial_trace_matrix, ComplexMatrix, Matrix, DEFAULT_DIM_CAP};
pub use measures::{fidelity, fidelity_pure, trace_distance, trace_norm, trace_norm_hermitian};
pub use povm::{validate_povm, Povm, PovmReport, PovmViolation};
pub use random::{random_density, random_pure, random_unitary};
pub use state::{DensityDiagnostics, DensityOperator, PureState};

/// Kronecker product `a ⊗ b` under the default dimension cap.
pub fn tensor_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    a.kron(b)
}

/// Reduced density operator on the subsystems listed in `keep`.
pub fn partial_trace<T: Real>(rho: &DensityOperator<T>, dims: &[usize], keep: &[usize]) -> Result<DensityOperator<T>> {
    rho.partial_trace(dims, keep)
}

/// Eigen-decomposition of a Hermitian matrix (Hermitian within 1e-8),
/// eigenvalues descending. Matrices with zero imaginary part are
/// decomposed in real arithmetic.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEig<Complex<T>>> {
    if m.is_real() {
        let r = eig::decompose(&m.re_part())?;
        Ok(HermitianEig { values: r.values, vectors: Matrix::from_real(&r.vectors) })
    } else {
        eig::decompose(m)
    }
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    if m.is_real() {
        eig::eigenvalues(&m.re_part())
    } else {
        eig::eigenvalues(m)
    }
}
