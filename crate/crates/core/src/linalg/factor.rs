//! Rank-revealing factorization of positive semidefinite matrices.

use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::scalar::{Field, Real};

/// Columns of `L` with `M = L L^dagger` up to roundoff, from diagonally
/// pivoted Cholesky. Elimination stops once every remaining diagonal entry is
/// at roundoff level, so the number of columns is the numerical rank.
pub(crate) fn psd_factor_columns<E: Field>(m: &Matrix<E>) -> Result<Vec<Vec<E>>> {
    Ok(psd_factor_bounded(m, usize::MAX)?.expect("unbounded factorization"))
}

/// As [`psd_factor_columns`], but gives up with `None` once the numerical
/// rank is known to exceed `max_cols`.
pub(crate) fn psd_factor_bounded<E: Field>(m: &Matrix<E>, max_cols: usize) -> Result<Option<Vec<Vec<E>>>> {
    let n = m.rows();
    let mut d: Vec<E::Real> = m.diagonal().into_iter().map(|z| z.re()).collect();
    let neg_tol = E::Real::tol(1e-9);
    if let Some(&worst) = d.iter().find(|&&x| x < -neg_tol) {
        return Err(Error::NotPositive(worst.as_f64()));
    }
    let max0 = d.iter().fold(E::Real::zero(), |a, &b| a.max(b));
    let stop = max0 * E::Real::epsilon() * E::Real::of(100.0 * n as f64);
    let mut pivoted = vec![false; n];
    let mut cols: Vec<Vec<E>> = Vec::new();
    while let Some((p, &dp)) = d
        .iter()
        .enumerate()
        .filter(|(i, _)| !pivoted[*i])
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite diagonal"))
    {
        if dp <= stop || dp <= E::Real::zero() {
            break;
        }
        if cols.len() == max_cols {
            return Ok(None);
        }
        let piv = dp.sqrt();
        // Column p of a Hermitian matrix is the conjugate of row p.
        let mut col: Vec<E> = m.row(p).iter().map(|z| z.conj()).collect();
        for prev in &cols {
            let coef = prev[p].conj();
            if coef == E::zero() {
                continue;
            }
            for (c, &l) in col.iter_mut().zip(prev) {
                *c -= l * coef;
            }
        }
        let inv = E::Real::one() / piv;
        for (i, c) in col.iter_mut().enumerate() {
            if pivoted[i] {
                *c = E::zero();
            } else if i == p {
                *c = E::from_real(piv);
            } else {
                *c = c.scale(inv);
                d[i] -= c.norm_sqr();
            }
        }
        pivoted[p] = true;
        d[p] = E::Real::zero();
        cols.push(col);
    }
    if let Some(&worst) = d
        .iter()
        .enumerate()
        .filter(|(i, _)| !pivoted[*i])
        .map(|(_, x)| x)
        .find(|&&x| x < -neg_tol)
    {
        return Err(Error::NotPositive(worst.as_f64()));
    }
    Ok(Some(cols))
}
