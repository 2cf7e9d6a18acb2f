use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::eig;
use crate::linalg::matrix::{ComplexMatrix, Matrix};
use crate::linalg::state::{DensityOperator, PureState};
use crate::scalar::Real;

/// Ordered list of labeled measurement effects.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm<T: Real> {
    dim: usize,
    effects: Vec<(String, ComplexMatrix<T>)>,
}

/// One violated POVM invariant with its magnitude.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PovmViolation {
    WrongShape { label: String, rows: usize, cols: usize },
    NotHermitian { label: String, deviation: f64 },
    NotPositive { label: String, min_eigenvalue: f64 },
    Incomplete { row: usize, col: usize, deviation: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PovmReport {
    pub violations: Vec<PovmViolation>,
}

impl PovmReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<T: Real> Povm<T> {
    /// Builds and validates a POVM.
    pub fn new(dim: usize, effects: Vec<(String, ComplexMatrix<T>)>) -> Result<Self> {
        let povm = Self::unchecked(dim, effects);
        let report = validate_povm(&povm);
        if let Some(first) = report.violations.first() {
            return Err(Error::Construction(format!(
                "invalid POVM ({} violations, first: {first:?})",
                report.violations.len()
            )));
        }
        Ok(povm)
    }

    /// Builds a POVM without validation; see [`validate_povm`].
    pub fn unchecked(dim: usize, effects: Vec<(String, ComplexMatrix<T>)>) -> Self {
        Self { dim, effects }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[(String, ComplexMatrix<T>)] {
        &self.effects
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.effects.iter().map(|(l, _)| l.as_str())
    }

    pub fn effect(&self, label: &str) -> Option<&ComplexMatrix<T>> {
        self.effects.iter().find(|(l, _)| l == label).map(|(_, e)| e)
    }

    /// Born-rule probabilities `Tr(rho E_x)` in effect order.
    pub fn probabilities(&self, rho: &DensityOperator<T>) -> Result<Vec<(String, T)>> {
        self.effects
            .iter()
            .map(|(l, e)| Ok((l.clone(), rho.expectation(e)?)))
            .collect()
    }

    /// Born-rule probabilities `<psi|E_x|psi>` for a pure state.
    pub fn probabilities_pure(&self, psi: &PureState<T>) -> Result<Vec<(String, T)>> {
        self.effects
            .iter()
            .map(|(l, e)| Ok((l.clone(), e.expectation(psi.amplitudes())?.re)))
            .collect()
    }
}

/// Lists every violated invariant: effect shape, Hermiticity, positivity
/// (eigenvalues >= -1e-9) and entrywise completeness (within 1e-10).
pub fn validate_povm<T: Real>(p: &Povm<T>) -> PovmReport {
    let mut violations = Vec::new();
    let n = p.dim;
    let mut sum = ComplexMatrix::<T>::zeros(n, n);
    let mut shapes_ok = true;
    for (label, e) in &p.effects {
        if e.rows() != n || e.cols() != n {
            violations.push(PovmViolation::WrongShape { label: label.clone(), rows: e.rows(), cols: e.cols() });
            shapes_ok = false;
            continue;
        }
        let dev = e.hermitian_deviation();
        if dev > T::tol(1e-10) {
            violations.push(PovmViolation::NotHermitian { label: label.clone(), deviation: dev.as_f64() });
        }
        let mut h = e.clone();
        h.hermitize();
        match eig::eigenvalues(&h) {
            Ok(values) => {
                let min = values.last().copied().unwrap_or_else(T::zero);
                if min < -T::tol(1e-9) {
                    violations.push(PovmViolation::NotPositive { label: label.clone(), min_eigenvalue: min.as_f64() });
                }
            }
            Err(_) => violations.push(PovmViolation::NotPositive { label: label.clone(), min_eigenvalue: f64::NAN }),
        }
        sum = sum.add(e).expect("shape checked");
    }
    if shapes_ok {
        let id = Matrix::<Complex<T>>::identity(n);
        for i in 0..n {
            for j in 0..n {
                let dev = (sum[(i, j)] - id[(i, j)]).norm();
                if dev > T::tol(1e-10) {
                    violations.push(PovmViolation::Incomplete { row: i, col: j, deviation: dev.as_f64() });
                }
            }
        }
    }
    PovmReport { violations }
}
