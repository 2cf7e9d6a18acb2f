//! Trace distance and fidelity.

use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::linalg::eig;
use crate::linalg::blocks::{block_partition, principal_submatrix};
use crate::linalg::factor::{psd_factor_bounded, psd_factor_columns};
use crate::linalg::matrix::{inner, ComplexMatrix, Matrix};
use crate::linalg::state::{DensityOperator, PureState};
use crate::scalar::{Field, Real};

fn same_dim<T: Real>(a: &DensityOperator<T>, b: &DensityOperator<T>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("density operators of dimension {} and {}", a.dim(), b.dim())));
    }
    Ok(())
}

/// `D(a, b) = ½ Tr|a - b|`.
///
/// The spectrum of `a - b` is computed block by block over the exact zero
/// pattern of the two operators. Blocks whose combined rank is well below
/// their size are diagonalized on the joint range instead.
pub fn trace_distance<T: Real>(a: &DensityOperator<T>, b: &DensityOperator<T>) -> Result<T> {
    same_dim(a, b)?;
    let norm = if a.matrix().is_real() && b.matrix().is_real() {
        difference_trace_norm(&a.matrix().re_part(), &b.matrix().re_part())?
    } else {
        difference_trace_norm(a.matrix(), b.matrix())?
    };
    Ok((norm * T::of(0.5)).min(T::one()))
}

/// Below this size a block is always diagonalized densely.
const DENSE_BLOCK: usize = 48;

fn difference_trace_norm<E: Field>(a: &Matrix<E>, b: &Matrix<E>) -> Result<E::Real> {
    let mut total = E::Real::zero();
    for idx in block_partition(&[a, b]) {
        if idx.len() == 1 {
            let i = idx[0];
            total += (a[(i, i)].re() - b[(i, i)].re()).abs();
            continue;
        }
        let (ak, bk) = (principal_submatrix(a, &idx), principal_submatrix(b, &idx));
        total += block_difference_trace_norm(&ak, &bk)?;
    }
    Ok(total)
}

fn block_difference_trace_norm<E: Field>(a: &Matrix<E>, b: &Matrix<E>) -> Result<E::Real> {
    let n = a.rows();
    if n > DENSE_BLOCK {
        let budget = 3 * n / 4;
        if let Some(la) = psd_factor_bounded(a, budget)? {
            if let Some(lb) = psd_factor_bounded(b, budget - la.len())? {
                return range_difference_trace_norm(&la, &lb);
            }
        }
    }
    let mut diff = a.sub(b)?;
    diff.hermitize();
    let values = eig::eigenvalues_unchecked(diff)?;
    Ok(values.iter().map(|v| v.abs()).sum())
}

/// Trace norm of `La La^dagger - Lb Lb^dagger` from the factor columns.
///
/// With `B = [La Lb]`, `J = diag(I, -I)` and `B^dagger B = R^dagger R`, the
/// nonzero spectrum of `B J B^dagger` is that of `R J R^dagger`.
fn range_difference_trace_norm<E: Field>(la: &[Vec<E>], lb: &[Vec<E>]) -> Result<E::Real> {
    let cols: Vec<&Vec<E>> = la.iter().chain(lb).collect();
    let r = cols.len();
    if r == 0 {
        return Ok(E::Real::zero());
    }
    let mut gram = Matrix::from_fn(r, r, |i, j| inner(cols[i], cols[j]));
    gram.hermitize();
    // Columns of `rt` are the rows of R^dagger.
    let rt = psd_factor_columns(&gram)?;
    let k = rt.len();
    let sign = |i: usize| if i < la.len() { E::Real::one() } else { -E::Real::one() };
    let mut h = Matrix::from_fn(k, k, |p, q| {
        (0..r).fold(E::zero(), |acc, i| acc + rt[p][i].conj() * rt[q][i].scale(sign(i)))
    });
    h.hermitize();
    let values = eig::eigenvalues_unchecked(h)?;
    Ok(values.iter().map(|v| v.abs()).sum())
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    eig::check_hermitian(m, 1e-8)?;
    let values = if m.is_real() {
        eig::eigenvalues_unchecked(m.re_part())?
    } else {
        eig::eigenvalues_unchecked(m.clone())?
    };
    Ok(values.iter().map(|v| v.abs()).sum())
}

/// Sum of singular values of an arbitrary matrix.
pub fn trace_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if m.is_real() {
        singular_value_sum(&m.re_part())
    } else {
        singular_value_sum(m)
    }
}

/// `F(a, b) = Tr|√a √b|`.
///
/// Computed as the trace norm of `L_a^dagger L_b`, where `a = L_a L_a^dagger`
/// and `b = L_b L_b^dagger` are rank-revealing Cholesky factorizations.
/// Directions in which an operator is zero up to roundoff are dropped by the
/// factorization, which is the clamping of tiny eigenvalues to zero; a
/// genuinely negative diagonal is an error.
pub fn fidelity<T: Real>(a: &DensityOperator<T>, b: &DensityOperator<T>) -> Result<T> {
    same_dim(a, b)?;
    let f = if a.matrix().is_real() && b.matrix().is_real() {
        factored_fidelity(&a.matrix().re_part(), &b.matrix().re_part())?
    } else {
        factored_fidelity(a.matrix(), b.matrix())?
    };
    Ok(f.min(T::one()))
}

/// Fidelity of two pure states, `|<psi|phi>|`.
pub fn fidelity_pure<T: Real>(psi: &PureState<T>, phi: &PureState<T>) -> Result<T> {
    Ok(psi.overlap(phi)?.norm().min(T::one()))
}

fn factored_fidelity<E: Field>(a: &Matrix<E>, b: &Matrix<E>) -> Result<E::Real> {
    let mut total = E::Real::zero();
    for idx in block_partition(&[a, b]) {
        if idx.len() == 1 {
            let i = idx[0];
            let prod = a[(i, i)].re() * b[(i, i)].re();
            if prod > E::Real::zero() {
                total += prod.sqrt();
            }
            continue;
        }
        let la = psd_factor_columns(&principal_submatrix(a, &idx))?;
        let lb = psd_factor_columns(&principal_submatrix(b, &idx))?;
        if la.is_empty() || lb.is_empty() {
            continue;
        }
        let x = Matrix::from_fn(la.len(), lb.len(), |i, j| inner(&la[i], &lb[j]));
        total += singular_value_sum(&x)?;
    }
    Ok(total)
}

/// Singular values of `x` are the positive eigenvalues of the Hermitian
/// dilation `[[0, x], [x^dagger, 0]]`, whose spectrum is `±sigma` plus zeros.
fn singular_value_sum<E: Field>(x: &Matrix<E>) -> Result<E::Real> {
    let (r, c) = (x.rows(), x.cols());
    if r == 0 || c == 0 {
        return Ok(E::Real::zero());
    }
    if r == 1 || c == 1 {
        return Ok(x.frobenius_norm());
    }
    let n = r + c;
    let mut h = Matrix::<E>::zeros(n, n);
    for i in 0..r {
        for j in 0..c {
            let v = x[(i, j)];
            h[(i, r + j)] = v;
            h[(r + j, i)] = v.conj();
        }
    }
    let values = eig::eigenvalues_unchecked(h)?;
    let total: E::Real = values.iter().map(|v| v.abs()).sum();
    Ok(total * E::Real::of(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use num_complex::Complex;

    fn diag(values: &[f64]) -> DensityOperator<f64> {
        let d: Vec<Complex<f64>> = values.iter().map(|&v| c(v, 0.0)).collect();
        DensityOperator::new(Matrix::from_diagonal(&d)).unwrap()
    }

    #[test]
    fn orthogonal_and_identical_states() {
        let zero = diag(&[1.0, 0.0]);
        let one = diag(&[0.0, 1.0]);
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
    }

    #[test]
    fn commuting_states_use_classical_formulas() {
        let a = diag(&[0.5, 0.3, 0.2]);
        let b = diag(&[0.1, 0.6, 0.3]);
        let f: f64 = (0.05f64).sqrt() + (0.18f64).sqrt() + (0.06f64).sqrt();
        assert!((fidelity(&a, &b).unwrap() - f).abs() < 1e-14);
        assert!((trace_distance(&a, &b).unwrap() - 0.4).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_of_nonsquare() {
        // singular values 3 and 4
        let m = Matrix::new(2, 3, vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 4.0), c(0.0, 0.0)]).unwrap();
        assert!((trace_norm::<f64>(&m).unwrap() - 7.0).abs() < 1e-14);
    }

    fn mixture_of_pure(dim: usize, rank: usize, seed: u64) -> DensityOperator<f64> {
        let mut m = Matrix::zeros(dim, dim);
        for k in 0..rank {
            let psi = crate::linalg::random::random_pure::<f64>(dim, seed * 100 + k as u64);
            m = m.add(&psi.projector().scaled(1.0 / rank as f64)).unwrap();
        }
        DensityOperator::new(m).unwrap()
    }

    fn dense_trace_distance(a: &DensityOperator<f64>, b: &DensityOperator<f64>) -> f64 {
        let diff = a.matrix().sub(b.matrix()).unwrap();
        0.5 * eig::eigenvalues(&diff).unwrap().iter().map(|v| v.abs()).sum::<f64>()
    }

    #[test]
    fn low_rank_path_matches_dense_spectrum() {
        for (ra, rb) in [(1, 1), (3, 5), (10, 20), (30, 30)] {
            let a = mixture_of_pure(64, ra, 1);
            let b = mixture_of_pure(64, rb, 2);
            let fast = trace_distance(&a, &b).unwrap();
            assert!((fast - dense_trace_distance(&a, &b)).abs() < 1e-12, "ranks {ra} {rb}");
        }
    }

    #[test]
    fn block_path_matches_dense_spectrum() {
        // Direct sum of unrelated blocks, interleaved by a permutation.
        let x = mixture_of_pure(3, 2, 3).into_matrix();
        let y = mixture_of_pure(3, 3, 4).into_matrix();
        let perm = [4usize, 0, 2, 5, 1, 3];
        let embed = |m: &ComplexMatrix<f64>, n: &ComplexMatrix<f64>| {
            let mut out = ComplexMatrix::<f64>::zeros(6, 6);
            for i in 0..3 {
                for j in 0..3 {
                    out[(perm[i], perm[j])] = m[(i, j)] * 0.5;
                    out[(perm[i + 3], perm[j + 3])] = n[(i, j)] * 0.5;
                }
            }
            DensityOperator::new(out).unwrap()
        };
        let a = embed(&x, &y);
        let b = embed(&y, &x);
        assert!((trace_distance(&a, &b).unwrap() - dense_trace_distance(&a, &b)).abs() < 1e-14);
        let f = fidelity(&a, &b).unwrap();
        let fx = fidelity(&DensityOperator::new(x).unwrap(), &DensityOperator::new(y).unwrap()).unwrap();
        assert!((f - fx).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = diag(&[1.0, 0.0]);
        let b = diag(&[1.0, 0.0, 0.0]);
        assert!(matches!(trace_distance(&a, &b), Err(Error::Shape(_))));
        assert!(matches!(fidelity(&a, &b), Err(Error::Shape(_))));
    }
}
