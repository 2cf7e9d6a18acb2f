use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::eig;
use crate::linalg::matrix::{inner, kron_vec, norm, partial_trace_matrix, ComplexMatrix, Matrix, DEFAULT_DIM_CAP};
use crate::scalar::{Field, Real};

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T: Real> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Accepts amplitudes whose Euclidean norm is within 1e-12 of one.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Shape("state vector is empty".into()));
        }
        if !amplitudes.iter().all(|z| z.finite()) {
            return Err(Error::NonFinite);
        }
        let nrm = norm(&amplitudes);
        if (nrm - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::Norm(nrm.as_f64()));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let nrm = norm(&amplitudes);
        if !(nrm > T::zero()) || !nrm.is_finite() {
            return Err(Error::Norm(nrm.as_f64()));
        }
        let inv = T::one() / nrm;
        for z in &mut amplitudes {
            *z = z.scale(inv);
        }
        Self::new(amplitudes)
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Shape(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut v = vec![Complex::zero(); dim];
        v[index] = Complex::new(T::one(), T::zero());
        Self::new(v)
    }

    /// Real amplitudes, normalized.
    pub fn from_real(amplitudes: &[T]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!("dimensions {} and {}", self.dim(), other.dim())));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim() * other.dim();
        if dim > DEFAULT_DIM_CAP {
            return Err(Error::DimensionCap { dim, cap: DEFAULT_DIM_CAP });
        }
        Ok(Self { amplitudes: kron_vec(&self.amplitudes, &other.amplitudes) })
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix<T> {
        Matrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn density(&self) -> DensityOperator<T> {
        DensityOperator::from_trusted(self.projector())
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<T: Real> {
    matrix: ComplexMatrix<T>,
}

/// Measured departures of a matrix from the density-operator invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityDiagnostics {
    pub hermitian_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

impl DensityDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.hermitian_deviation <= 1e-10 && self.trace_deviation <= 1e-10 && self.min_eigenvalue >= -1e-9
    }
}

impl<T: Real> DensityOperator<T> {
    /// Validates Hermiticity (1e-10), unit trace (1e-10) and eigenvalues
    /// no lower than -1e-9.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", matrix.rows(), matrix.cols())));
        }
        if !matrix.as_slice().iter().all(|z| z.finite()) {
            return Err(Error::NonFinite);
        }
        let herm = matrix.hermitian_deviation();
        if herm > T::tol(1e-10) {
            return Err(Error::NotHermitian(herm.as_f64()));
        }
        let tr = matrix.trace().re;
        if (tr - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::Trace(tr.as_f64()));
        }
        let mut h = matrix.clone();
        h.hermitize();
        let min = min_eigenvalue(&h)?;
        if min < -T::tol(1e-9) {
            return Err(Error::NotPositive(min.as_f64()));
        }
        Ok(Self { matrix: h })
    }

    /// Wraps an operator that satisfies the invariants by construction
    /// (projectors, tensor products and partial traces of valid operators).
    pub(crate) fn from_trusted(matrix: ComplexMatrix<T>) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// Reports how far `m` is from satisfying the density-operator invariants.
    pub fn diagnose(m: &ComplexMatrix<T>) -> Result<DensityDiagnostics> {
        if !m.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", m.rows(), m.cols())));
        }
        let mut h = m.clone();
        h.hermitize();
        Ok(DensityDiagnostics {
            hermitian_deviation: m.hermitian_deviation().as_f64(),
            trace_deviation: (m.trace() - Complex::new(T::one(), T::zero())).norm().as_f64(),
            min_eigenvalue: min_eigenvalue(&h)?.as_f64(),
        })
    }

    /// The one-dimensional state `[1]`.
    pub fn scalar_one() -> Self {
        Self::from_trusted(Matrix::identity(1))
    }

    /// Maximally mixed state `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(Matrix::identity(dim).scaled(T::one() / T::of(dim as f64)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> T {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Tr(rho E)` for an operator `E` of matching dimension.
    pub fn expectation(&self, op: &ComplexMatrix<T>) -> Result<T> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(Error::Shape(format!("operator {}x{} vs state {}", op.rows(), op.cols(), self.dim())));
        }
        let n = self.dim();
        let mut acc = Complex::zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        Ok(acc.re)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.tensor_capped(other, DEFAULT_DIM_CAP)
    }

    pub fn tensor_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        Ok(Self::from_trusted(self.matrix.kron_capped(&other.matrix, cap)?))
    }

    /// `rho^{tensor n}`.
    pub fn tensor_power(&self, n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("tensor power must be at least 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor_capped(self, cap)?;
        }
        Ok(out)
    }

    /// Reduced state on the subsystems in `keep` (most significant first).
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        Ok(Self::from_trusted(partial_trace_matrix(&self.matrix, dims, keep)?))
    }

    /// Conjugation `U rho U^dagger` by a unitary.
    pub fn conjugate_by(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        let mut m = u.matmul(&self.matrix)?.matmul(&u.dagger())?;
        m.hermitize();
        Ok(Self::from_trusted(m))
    }
}

fn min_eigenvalue<T: Real>(h: &ComplexMatrix<T>) -> Result<T> {
    let values = if h.is_real() {
        eig::eigenvalues_unchecked(h.re_part())?
    } else {
        eig::eigenvalues_unchecked(h.clone())?
    };
    Ok(values.last().copied().unwrap_or_else(T::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn pure_state_rejects_unnormalized() {
        let v = vec![c::<f64>(1.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(PureState::new(v.clone()), Err(Error::Norm(_))));
        assert!(PureState::normalized(v).is_ok());
        assert!(PureState::<f64>::normalized(vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn density_validation_catches_each_invariant() {
        let not_herm = Matrix::new(2, 2, vec![c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(DensityOperator::<f64>::new(not_herm), Err(Error::NotHermitian(_))));
        let bad_trace = Matrix::from_diagonal(&[c(0.7, 0.0), c(0.7, 0.0)]);
        assert!(matches!(DensityOperator::<f64>::new(bad_trace), Err(Error::Trace(_))));
        let negative = Matrix::from_diagonal(&[c(1.2, 0.0), c(-0.2, 0.0)]);
        assert!(matches!(DensityOperator::<f64>::new(negative), Err(Error::NotPositive(_))));
    }

    #[test]
    fn diagnostics_of_valid_state() {
        let rho = DensityOperator::<f64>::maximally_mixed(3);
        let diag = DensityOperator::diagnose(rho.matrix()).unwrap();
        assert!(diag.is_valid());
        assert!((diag.min_eigenvalue - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn entangled_marginals_are_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let rho = bell.density();
        let half = DensityOperator::<f64>::maximally_mixed(2);
        for keep in [0usize, 1] {
            let red = rho.partial_trace(&[2, 2], &[keep]).unwrap();
            assert!(red.matrix().max_abs_diff(half.matrix()).unwrap() < 1e-15);
        }
    }
}
