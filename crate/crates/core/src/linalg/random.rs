//! Seeded random states and unitaries.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::matrix::{ComplexMatrix, Matrix};
use crate::linalg::state::{DensityOperator, PureState};
use crate::linalg::eig;
use crate::scalar::Real;

/// Standard complex normal sample (real and imaginary parts of variance 1/2).
pub fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::of(re * s), T::of(im * s))
}

/// Matrix of independent standard complex normal entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix<T> {
    Matrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-random pure state drawn from `rng`.
pub fn random_pure_with<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState<T> {
    assert!(dim >= 1, "dimension must be positive");
    loop {
        let v: Vec<Complex<T>> = (0..dim).map(|_| complex_normal(rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// Random density operator `G G^dagger / Tr(G G^dagger)` with square Ginibre `G`.
pub fn random_density_with<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator<T> {
    assert!(dim >= 1, "dimension must be positive");
    let g = ginibre::<T, R>(rng, dim, dim);
    let mut w = g.matmul(&g.dagger()).expect("square");
    let tr = w.trace().re;
    w = w.scaled(T::one() / tr);
    w.hermitize();
    DensityOperator::from_trusted(w)
}

/// Unitary whose columns are the eigenvectors of a random Hermitian matrix.
pub fn random_unitary_with<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    assert!(dim >= 1, "dimension must be positive");
    let g = ginibre::<T, R>(rng, dim, dim);
    let mut h = g.add(&g.dagger()).expect("square");
    h.hermitize();
    let mut u = eig::decompose(&h).expect("Hermitian by construction").vectors;
    // Random column phases so that real-valued inputs still give complex frames.
    for j in 0..dim {
        let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let z = Complex::new(T::of(phase.cos()), T::of(phase.sin()));
        for i in 0..dim {
            u[(i, j)] *= z;
        }
    }
    u
}

pub fn random_pure<T: Real>(dim: usize, seed: u64) -> PureState<T> {
    random_pure_with(&mut ChaCha8Rng::seed_from_u64(seed), dim)
}

pub fn random_density<T: Real>(dim: usize, seed: u64) -> DensityOperator<T> {
    random_density_with(&mut ChaCha8Rng::seed_from_u64(seed), dim)
}

pub fn random_unitary<T: Real>(dim: usize, seed: u64) -> ComplexMatrix<T> {
    random_unitary_with(&mut ChaCha8Rng::seed_from_u64(seed), dim)
}
