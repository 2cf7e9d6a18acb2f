//! Hermitian eigensolver.
//!
//! Householder reduction to tridiagonal form followed by implicit QL
//! iterations. The reduction touches only the lower triangle and fuses the
//! rank-2 update of one step with the matrix-vector product of the next, so
//! each step streams the trailing block through memory once. Complex
//! off-diagonals are rotated to real ones with a diagonal phase matrix before
//! the QL stage.

use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, Matrix};
use crate::scalar::{Field, Real};

/// Eigen-decomposition `M = V diag(values) V^dagger`, values descending.
#[derive(Clone, Debug)]
pub struct HermitianEig<E: Field> {
    pub values: Vec<E::Real>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: Matrix<E>,
}

struct Reflector<E: Field> {
    /// First row/column index the reflector acts on.
    offset: usize,
    u: Vec<E>,
    tau: E::Real,
}

struct Tridiagonal<E: Field> {
    diag: Vec<E::Real>,
    /// `off[k]` is entry `(k + 1, k)` of the reduced matrix.
    off: Vec<E>,
    reflectors: Vec<Reflector<E>>,
}

pub(crate) fn check_hermitian<E: Field>(m: &Matrix<E>, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    let dev = m.hermitian_deviation();
    if !(dev <= E::Real::tol(tol)) {
        return Err(Error::NotHermitian(dev.as_f64()));
    }
    Ok(())
}

/// Full eigen-decomposition of a Hermitian matrix.
pub fn decompose<E: Field>(m: &Matrix<E>) -> Result<HermitianEig<E>> {
    check_hermitian(m, 1e-8)?;
    let n = m.rows();
    let tri = tridiagonalize(m.clone(), true);
    let (phases, off) = real_offdiagonal(&tri.off);
    let mut d = tri.diag;
    let mut e = off;
    e.push(E::Real::zero());
    // Row j of `zt` is the j-th eigenvector of the real tridiagonal matrix.
    let mut zt = vec![E::Real::zero(); n * n];
    for i in 0..n {
        zt[i * n + i] = E::Real::one();
    }
    ql_implicit(&mut d, &mut e, Some(&mut zt))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).expect("finite eigenvalues"));

    // Rows of `y` become eigenvectors of `m`: y = Q D z.
    let mut y = Matrix::<E>::zeros(n, n);
    for (r, &j) in order.iter().enumerate() {
        let row = y.row_mut(r);
        for k in 0..n {
            row[k] = phases[k].scale(zt[j * n + k]);
        }
    }
    for refl in tri.reflectors.iter().rev() {
        let o = refl.offset;
        for r in 0..n {
            let tail = &mut y.row_mut(r)[o..];
            let s = tail
                .iter()
                .zip(&refl.u)
                .fold(E::zero(), |acc, (&t, &u)| acc + u.conj() * t)
                .scale(refl.tau);
            for (t, &u) in tail.iter_mut().zip(&refl.u) {
                *t -= u * s;
            }
        }
    }
    Ok(HermitianEig {
        values: order.iter().map(|&j| d[j]).collect(),
        vectors: y.transpose(),
    })
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn eigenvalues<E: Field>(m: &Matrix<E>) -> Result<Vec<E::Real>> {
    check_hermitian(m, 1e-8)?;
    eigenvalues_unchecked(m.clone())
}

/// Eigenvalues without the Hermitian check; consumes the matrix as workspace.
pub(crate) fn eigenvalues_unchecked<E: Field>(m: Matrix<E>) -> Result<Vec<E::Real>> {
    let tri = tridiagonalize(m, false);
    let (_, off) = real_offdiagonal(&tri.off);
    let mut d = tri.diag;
    let mut e = off;
    e.push(E::Real::zero());
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(d)
}

/// Householder vector for `x`, with `P x = beta e_1` and `P = I - tau u u^dagger`.
/// Returns `None` when `x` already has a zero tail. `u` is built from `x`
/// scaled by its largest entry, so tiny columns neither underflow nor blow up
/// `tau`.
fn householder<E: Field>(x: &[E]) -> Option<(Vec<E>, E::Real, E)> {
    let scale = x.iter().fold(E::Real::zero(), |m, z| m.max(z.modulus()));
    if scale == E::Real::zero() || x[1..].iter().all(|z| z.modulus() == E::Real::zero()) {
        return None;
    }
    let inv = E::Real::one() / scale;
    let mut u: Vec<E> = x.iter().map(|z| z.scale(inv)).collect();
    let tail: E::Real = u[1..].iter().map(|z| z.norm_sqr()).sum();
    let x0 = u[0];
    let abs0 = x0.modulus();
    let alpha = (abs0 * abs0 + tail).sqrt();
    let phase = if abs0 == E::Real::zero() { E::one() } else { x0.scale(E::Real::one() / abs0) };
    u[0] = x0 + phase.scale(alpha);
    let tau = E::Real::one() / (alpha * (alpha + abs0));
    Some((u, tau, -phase.scale(alpha * scale)))
}

/// `tau * A u` over the trailing block starting at `offset`, reading only the
/// lower triangle of `a`.
fn lower_matvec<E: Field>(a: &Matrix<E>, offset: usize, u: &[E], tau: E::Real) -> Vec<E> {
    let n = a.rows();
    let mut p = vec![E::zero(); n - offset];
    for i in offset..n {
        let ii = i - offset;
        let row = &a.row(i)[offset..=i];
        let (lower, diag) = row.split_at(ii);
        let ui = u[ii];
        p[ii] += dot(lower, &u[..ii]) + diag[0] * ui;
        for (pj, &aij) in p[..ii].iter_mut().zip(lower) {
            *pj += aij.conj() * ui;
        }
    }
    for z in &mut p {
        *z = z.scale(tau);
    }
    p
}

fn tridiagonalize<E: Field>(mut a: Matrix<E>, keep_reflectors: bool) -> Tridiagonal<E> {
    let n = a.rows();
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut reflectors = Vec::new();
    let half = E::Real::of(0.5);

    // Reflector for column k together with tau * A_trailing * u.
    let column_below = |a: &Matrix<E>, k: usize| -> Vec<E> { (k + 1..n).map(|i| a[(i, k)]).collect() };
    let mut pending: Option<(Vec<E>, E::Real, E, Vec<E>)> = None;
    if n >= 3 {
        if let Some((u, tau, beta)) = householder(&column_below(&a, 0)) {
            let p = lower_matvec(&a, 1, &u, tau);
            pending = Some((u, tau, beta, p));
        }
    }

    for k in 0..n.saturating_sub(1) {
        diag.push(a[(k, k)].re());
        let o = k + 1;
        let Some((u, tau, beta, p)) = pending.take() else {
            off.push(a[(o, k)]);
            // No update happened at this step; start the next one from scratch.
            if n - o >= 3 {
                if let Some((u2, tau2, beta2)) = householder(&column_below(&a, o)) {
                    let p2 = lower_matvec(&a, o + 1, &u2, tau2);
                    pending = Some((u2, tau2, beta2, p2));
                }
            }
            continue;
        };
        off.push(beta);
        let kk = inner_re(&u, &p) * half * tau;
        let w: Vec<E> = p.iter().zip(&u).map(|(&pi, &ui)| pi - ui.scale(kk)).collect();

        // Next column after the update, computed ahead of the pass.
        let next = if n - o >= 3 {
            let x: Vec<E> = (o + 1..n)
                .map(|i| {
                    let (ii, j) = (i - o, 0);
                    a[(i, o)] - u[ii] * w[j].conj() - w[ii] * u[j].conj()
                })
                .collect();
            householder(&x)
        } else {
            None
        };

        let mut p_next = next.as_ref().map(|(u2, _, _)| vec![E::zero(); u2.len()]);
        for i in o..n {
            let ii = i - o;
            let (ui, wi) = (u[ii], w[ii]);
            let row = &mut a.row_mut(i)[o..=i];
            for ((z, &uj), &wj) in row.iter_mut().zip(&u[..=ii]).zip(&w[..=ii]) {
                *z -= ui * wj.conj() + wi * uj.conj();
            }
            if let (Some((u2, _, _)), Some(pn)) = (next.as_ref(), p_next.as_mut()) {
                if ii >= 1 {
                    let i2 = ii - 1;
                    let (lower, d) = row[1..].split_at(i2);
                    let u2i = u2[i2];
                    pn[i2] += dot(lower, &u2[..i2]) + d[0] * u2i;
                    for (pj, &aij) in pn[..i2].iter_mut().zip(lower) {
                        *pj += aij.conj() * u2i;
                    }
                }
            }
        }
        if keep_reflectors {
            reflectors.push(Reflector { offset: o, u, tau });
        }
        if let (Some((u2, tau2, beta2)), Some(mut pn)) = (next, p_next) {
            for z in &mut pn {
                *z = z.scale(tau2);
            }
            pending = Some((u2, tau2, beta2, pn));
        }
    }
    if n > 0 {
        diag.push(a[(n - 1, n - 1)].re());
    }
    Tridiagonal { diag, off, reflectors }
}

fn inner_re<E: Field>(a: &[E], b: &[E]) -> E::Real {
    a.iter().zip(b).fold(E::Real::zero(), |acc, (&x, &y)| acc + (x.conj() * y).re())
}

/// Phases `d_k` with `conj(d_{k+1}) off_k d_k = |off_k|`, and the moduli.
fn real_offdiagonal<E: Field>(off: &[E]) -> (Vec<E>, Vec<E::Real>) {
    let mut phases = Vec::with_capacity(off.len() + 1);
    phases.push(E::one());
    let mut mags = Vec::with_capacity(off.len());
    for (k, &e) in off.iter().enumerate() {
        let m = e.modulus();
        let dk = phases[k];
        phases.push(if m == E::Real::zero() { dk } else { dk * e.scale(E::Real::one() / m) });
        mags.push(m);
    }
    (phases, mags)
}

/// Implicit QL on a real symmetric tridiagonal matrix (`d` diagonal, `e[i]`
/// the entry below `d[i]`, `e[n-1] = 0`). When `zt` is given, its rows are
/// rotated along, so starting from the identity they end up as eigenvectors.
fn ql_implicit<T: Real>(d: &mut [T], e: &mut [T], mut zt: Option<&mut [T]>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let eps = T::epsilon();
    let two = T::of(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let max_iter = 60;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::Construction("eigenvalue iteration did not converge".into()));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let (head, tail) = z.split_at_mut((i + 1) * n);
                        let zi = &mut head[i * n..];
                        let zi1 = &mut tail[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::linalg::random::ginibre;

    fn reconstruct<E: Field>(eig: &HermitianEig<E>) -> Matrix<E> {
        let n = eig.values.len();
        let v = &eig.vectors;
        Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(E::zero(), |acc, k| acc + v[(i, k)] * v[(j, k)].conj().scale(eig.values[k]))
        })
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let m = Matrix::from_diagonal(&[3.0f64, 1.0, 2.0]);
        let e = decompose(&m).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert!(reconstruct(&e).max_abs_diff(&m).unwrap() < 1e-15);
    }

    #[test]
    fn pauli_x() {
        let m = Matrix::new(2, 2, vec![0.0f64, 1.0, 1.0, 0.0]).unwrap();
        let values = eigenvalues(&m).unwrap();
        assert!((values[0] - 1.0).abs() < 1e-15 && (values[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_complex_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1usize, 2, 3, 8, 17, 40] {
            let g = ginibre::<f64, _>(&mut rng, n, n);
            let mut h = g.add(&g.dagger()).unwrap();
            h.hermitize();
            let e = decompose(&h).unwrap();
            let tol = 1e-9 * n as f64;
            assert!(reconstruct(&e).max_abs_diff(&h).unwrap() < tol, "n = {n}");
            let gram = e.vectors.adjoint_mul(&e.vectors).unwrap();
            assert!(gram.max_abs_diff(&Matrix::<Complex<f64>>::identity(n)).unwrap() < 1e-9);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            let only = eigenvalues(&h).unwrap();
            for (a, b) in only.iter().zip(&e.values) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let mut m = Matrix::<f64>::identity(6).scaled(2.0);
        m[(0, 5)] = 1.0;
        m[(5, 0)] = 1.0;
        let e = decompose(&m).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14 && (e.values[5] - 1.0).abs() < 1e-14);
        assert!(reconstruct(&e).max_abs_diff(&m).unwrap() < 1e-13);
    }

    #[test]
    fn tiny_entries_do_not_underflow() {
        let mut m = Matrix::<f64>::zeros(5, 5);
        m[(0, 0)] = 1.0;
        for i in 1..5 {
            m[(i, i - 1)] = 1e-160;
            m[(i - 1, i)] = 1e-160;
        }
        m[(4, 0)] = 3e-161;
        m[(0, 4)] = 3e-161;
        let v = eigenvalues(&m).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1..].iter().all(|x| x.abs() < 1e-150));
        let e = decompose(&m).unwrap();
        assert!(reconstruct(&e).max_abs_diff(&m).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::new(2, 2, vec![0.0f64, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(decompose(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn f32_precision() {
        let m = Matrix::new(2, 2, vec![2.0f32, 1.0, 1.0, 2.0]).unwrap();
        let values = eigenvalues(&m).unwrap();
        assert!((values[0] - 3.0).abs() < 1e-5 && (values[1] - 1.0).abs() < 1e-5);
    }
}
