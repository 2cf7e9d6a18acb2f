use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Field, Real};

/// Default cap on the dimension of any operator built by this crate.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Dense row-major matrix over a [`Field`].
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

/// Complex matrix over the real scalar `T`.
pub type ComplexMatrix<T> = Matrix<Complex<T>>;

impl<E: Field> Matrix<E> {
    /// Builds a matrix from row-major entries, rejecting zero dimensions,
    /// wrong lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} matrix has a zero dimension")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if !data.iter().all(|z| z.finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<E>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![E::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_raw(rows, cols, data)
    }

    pub fn from_diagonal(diag: &[E]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// `|u><v|`.
    pub fn outer(u: &[E], v: &[E]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [E] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<E> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn into_vec(self) -> Vec<E> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> E {
        (0..self.rows.min(self.cols)).fold(E::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn scaled(&self, s: E::Real) -> Self {
        self.map(|z| z.scale(s))
    }

    pub fn map(&self, f: impl Fn(E) -> E) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|&z| f(z)).collect())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(E, E) -> E) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Self::from_raw(self.rows, self.cols, data)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == E::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^dagger * other`, without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Shape(format!(
                "cannot form A^dagger B for {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let b_row = other.row(k);
            for (i, &a) in self.row(k).iter().enumerate() {
                if a == E::zero() {
                    continue;
                }
                let a = a.conj();
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[E]) -> Result<Vec<E>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect())
    }

    /// `<v|M|v>`.
    pub fn expectation(&self, v: &[E]) -> Result<E> {
        let mv = self.matvec(v)?;
        Ok(inner(v, &mv))
    }

    /// Kronecker product with the left factor as the most significant index.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        self.kron_capped(other, DEFAULT_DIM_CAP)
    }

    pub fn kron_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        let rows = checked_dim(self.rows, other.rows, cap)?;
        let cols = checked_dim(self.cols, other.cols, cap)?;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..self.rows {
            for k in 0..other.rows {
                let b_row = other.row(k);
                for &a in self.row(i) {
                    data.extend(b_row.iter().map(|&b| a * b));
                }
            }
        }
        Ok(Self::from_raw(rows, cols, data))
    }

    /// Largest entrywise modulus of `M - M^dagger`.
    pub fn hermitian_deviation(&self) -> E::Real {
        if !self.is_square() {
            return E::Real::infinity();
        }
        let mut worst = E::Real::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).modulus();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Replaces `M` by `(M + M^dagger)/2`.
    pub fn hermitize(&mut self) {
        let half = E::Real::of(0.5);
        for i in 0..self.rows {
            for j in i..self.cols {
                let avg = (self[(i, j)] + self[(j, i)].conj()).scale(half);
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<E::Real> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).modulus())
            .fold(E::Real::zero(), |m, x| if x > m { x } else { m }))
    }

    pub fn frobenius_norm(&self) -> E::Real {
        self.data.iter().map(|z| z.norm_sqr()).sum::<E::Real>().sqrt()
    }
}

impl<T: Real> Matrix<Complex<T>> {
    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == T::zero())
    }

    /// Real parts, dropping imaginary parts.
    pub fn re_part(&self) -> Matrix<T> {
        Matrix::from_raw(self.rows, self.cols, self.data.iter().map(|z| z.re).collect())
    }

    pub fn from_real(m: &Matrix<T>) -> Self {
        Self::from_raw(
            m.rows,
            m.cols,
            m.data.iter().map(|&r| Complex::new(r, T::zero())).collect(),
        )
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

fn checked_dim(a: usize, b: usize, cap: usize) -> Result<usize> {
    match a.checked_mul(b) {
        Some(d) if d <= cap => Ok(d),
        Some(d) => Err(Error::DimensionCap { dim: d, cap }),
        None => Err(Error::DimensionCap { dim: usize::MAX, cap }),
    }
}

/// Plain bilinear `sum_i a_i b_i`.
#[inline]
pub(crate) fn dot<E: Field>(a: &[E], b: &[E]) -> E {
    a.iter().zip(b).fold(E::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Sesquilinear `<a|b> = sum_i conj(a_i) b_i`.
#[inline]
pub fn inner<E: Field>(a: &[E], b: &[E]) -> E {
    a.iter().zip(b).fold(E::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

pub fn norm<E: Field>(v: &[E]) -> E::Real {
    v.iter().map(|z| z.norm_sqr()).sum::<E::Real>().sqrt()
}

/// Kronecker product of two vectors, most significant factor on the left.
pub fn kron_vec<E: Field>(a: &[E], b: &[E]) -> Vec<E> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

/// Partial trace of a square matrix over the subsystems not listed in `keep`.
///
/// `dims` lists subsystem dimensions with the most significant factor first.
/// The kept subsystems stay in their original relative order.
pub fn partial_trace_matrix<E: Field>(m: &Matrix<E>, dims: &[usize], keep: &[usize]) -> Result<Matrix<E>> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Shape("subsystem dimensions must be positive".into()));
    }
    if !m.is_square() || m.rows() != total {
        return Err(Error::Shape(format!(
            "subsystem dimensions {dims:?} multiply to {total}, operator is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if keep.is_empty() {
        return Err(Error::Shape("at least one subsystem must be kept".into()));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape(format!("invalid kept subsystem set {keep:?}")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();

    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    // Offsets into the full index space of every kept / traced multi-index.
    let offsets = |subs: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &s in subs {
            let mut next = Vec::with_capacity(out.len() * dims[s]);
            for &o in &out {
                for x in 0..dims[s] {
                    next.push(o + x * strides[s]);
                }
            }
            out = next;
        }
        out
    };
    let kept_off = offsets(&keep_sorted);
    let traced_off = offsets(&traced);
    let d = kept_off.len();
    let mut out = Matrix::zeros(d, d);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            let mut acc = E::zero();
            for &t in &traced_off {
                acc += m[(ro + t, co + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}
