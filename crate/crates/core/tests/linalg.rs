use num_complex::Complex;
use physsec::linalg::{
    fidelity, fidelity_pure, hermitian_eig, partial_trace, partial_trace_matrix, random_density, random_pure,
    random_unitary, tensor_product, trace_distance, validate_povm, ComplexMatrix, DensityOperator, Matrix, Povm,
    PovmViolation, PureState,
};
use physsec::ot::usd_povm_for_angle;
use physsec::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

type C64 = Complex<f64>;

fn cx(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `F = sum sqrt(eig(sqrt(a) b sqrt(a)))`, computed the textbook way.
fn fidelity_oracle(a: &DensityOperator<f64>, b: &DensityOperator<f64>) -> f64 {
    let ea = hermitian_eig(a.matrix()).unwrap();
    let n = a.dim();
    let mut sqrt_a = ComplexMatrix::<f64>::zeros(n, n);
    for (k, &l) in ea.values.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        for i in 0..n {
            for j in 0..n {
                sqrt_a[(i, j)] += ea.vectors[(i, k)] * ea.vectors[(j, k)].conj() * s;
            }
        }
    }
    let mut inner = sqrt_a.matmul(b.matrix()).unwrap().matmul(&sqrt_a).unwrap();
    inner.hermitize();
    hermitian_eig(&inner).unwrap().values.iter().map(|l| l.max(0.0).sqrt()).sum()
}

/// Explicit index sum for tracing out the middle of three subsystems.
fn trace_middle(m: &ComplexMatrix<f64>, d: [usize; 3]) -> ComplexMatrix<f64> {
    let [da, db, dc] = d;
    let mut out = ComplexMatrix::<f64>::zeros(da * dc, da * dc);
    for a in 0..da {
        for c in 0..dc {
            for a2 in 0..da {
                for c2 in 0..dc {
                    let mut s = cx(0.0);
                    for b in 0..db {
                        s += m[((a * db + b) * dc + c, (a2 * db + b) * dc + c2)];
                    }
                    out[(a * dc + c, a2 * dc + c2)] = s;
                }
            }
        }
    }
    out
}

fn ket(amps: &[f64]) -> PureState<f64> {
    PureState::from_real(amps).unwrap()
}

#[test]
fn tensor_identity_and_basis_ordering() {
    let i2 = ComplexMatrix::<f64>::identity(2);
    assert_eq!(tensor_product(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    let p0 = ket(&[1.0, 0.0]).projector();
    let p1 = ket(&[0.0, 1.0]).projector();
    let t = tensor_product(&p0, &p1).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
            assert_eq!(t[(i, j)], cx(want));
        }
    }
}

#[test]
fn tensor_trace_is_product_of_traces() {
    for seed in 0..20 {
        let a = random_density::<f64>(2, seed).into_matrix().scaled(1.7);
        let b = random_density::<f64>(2, seed + 100).into_matrix().scaled(0.3);
        let t = tensor_product(&a, &b).unwrap();
        let direct = Matrix::from_fn(4, 4, |i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)]);
        assert!(t.max_abs_diff(&direct).unwrap() < 1e-15);
        assert!((t.trace() - a.trace() * b.trace()).norm() < 1e-12);
    }
}

#[test]
fn tensor_respects_dimension_cap() {
    let big = ComplexMatrix::<f64>::identity(128);
    assert!(matches!(big.kron_capped(&big, 4096), Err(Error::DimensionCap { .. })));
}

#[test]
fn partial_trace_examples() {
    let r = random_density::<f64>(2, 1);
    let s = random_density::<f64>(2, 2);
    let joint = r.tensor(&s).unwrap();
    let back = partial_trace(&joint, &[2, 2], &[0]).unwrap();
    assert!(back.matrix().max_abs_diff(r.matrix()).unwrap() < 1e-12);

    let h = 0.5f64.sqrt();
    let bell = ket(&[h, 0.0, 0.0, h]).density();
    let half = ComplexMatrix::<f64>::identity(2).scaled(0.5);
    for keep in [0, 1] {
        let red = partial_trace(&bell, &[2, 2], &[keep]).unwrap();
        assert!(red.matrix().max_abs_diff(&half).unwrap() < 1e-15);
    }
    assert!(matches!(partial_trace(&bell, &[2, 3], &[0]), Err(Error::Shape(_))));
}

#[test]
fn three_party_partial_trace_matches_index_sum() {
    let d = [2, 3, 2];
    for seed in 0..50 {
        let rho = random_density::<f64>(12, seed);
        let red = partial_trace(&rho, &d, &[0, 2]).unwrap();
        let oracle = trace_middle(rho.matrix(), d);
        assert!(red.matrix().max_abs_diff(&oracle).unwrap() < 1e-13);
        assert!((red.matrix().trace().re - 1.0).abs() < 1e-10);
    }
}

#[test]
fn eig_examples() {
    let d = Matrix::from_diagonal(&[cx(3.0), cx(1.0), cx(2.0)]);
    assert_eq!(hermitian_eig(&d).unwrap().values, vec![3.0, 2.0, 1.0]);
    let x = Matrix::new(2, 2, vec![cx(0.0), cx(1.0), cx(1.0), cx(0.0)]).unwrap();
    let v = hermitian_eig(&x).unwrap().values;
    assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] + 1.0).abs() < 1e-15);
    let mut bad = x.clone();
    bad[(0, 1)] = cx(2.0);
    assert!(matches!(hermitian_eig(&bad), Err(Error::NotHermitian(_))));
}

#[test]
fn eig_reconstructs_random_hermitian() {
    for seed in 0..10 {
        let g = random_unitary::<f64>(8, seed);
        let mut h = g.add(&g.dagger()).unwrap();
        h.hermitize();
        let e = hermitian_eig(&h).unwrap();
        let n = 8;
        let mut rec = ComplexMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    rec[(i, j)] += e.vectors[(i, k)] * e.vectors[(j, k)].conj() * e.values[k];
                }
            }
        }
        assert!(rec.max_abs_diff(&h).unwrap() <= 1e-9 * n as f64);
        let gram = e.vectors.adjoint_mul(&e.vectors).unwrap();
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)).unwrap() < 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn distance_and_fidelity_examples() {
    let r = random_density::<f64>(3, 5);
    assert!(trace_distance(&r, &r).unwrap().abs() < 1e-12);
    assert!((fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-9);
    let z = ket(&[1.0, 0.0]).density();
    let o = ket(&[0.0, 1.0]).density();
    assert!((trace_distance(&z, &o).unwrap() - 1.0).abs() < 1e-15);
    assert!(fidelity(&z, &o).unwrap().abs() < 1e-15);

    // Non-orthogonal pure pair with overlap 1/2.
    let t = PI / 6.0;
    let a = ket(&[t.cos(), t.sin()]);
    let b = ket(&[t.cos(), -t.sin()]);
    let ov = a.overlap(&b).unwrap().norm();
    let d = trace_distance(&a.density(), &b.density()).unwrap();
    assert!((d - (1.0 - ov * ov).sqrt()).abs() < 1e-12);
    assert!((d - 3f64.sqrt() / 2.0).abs() < 1e-12);

    assert!(matches!(trace_distance(&z, &random_density(3, 0)), Err(Error::Shape(_))));
    assert!(matches!(fidelity(&z, &random_density(3, 0)), Err(Error::Shape(_))));
}

#[test]
fn pure_fidelity_is_overlap() {
    for seed in 0..50 {
        let a = random_pure::<f64>(4, seed);
        let b = random_pure::<f64>(4, seed + 1000);
        let ov = a.overlap(&b).unwrap().norm();
        assert!((fidelity(&a.density(), &b.density()).unwrap() - ov).abs() < 1e-9);
        assert!((fidelity_pure(&a, &b).unwrap() - ov).abs() < 1e-14);
    }
}

#[test]
fn fidelity_matches_square_root_route() {
    for (dim, seed) in [(2, 0), (3, 1), (4, 2), (5, 3), (8, 4)] {
        for k in 0..10 {
            let a = random_density::<f64>(dim, 10 * seed + k);
            let b = random_density::<f64>(dim, 10 * seed + k + 500);
            let f = fidelity(&a, &b).unwrap();
            assert!((f - fidelity_oracle(&a, &b)).abs() < 1e-8, "dim {dim}");
        }
    }
}

#[test]
fn povm_validation_examples() {
    let single = Povm::<f64>::unchecked(2, vec![("id".into(), ComplexMatrix::identity(2))]);
    assert!(validate_povm(&single).is_valid());

    let double = Povm::<f64>::unchecked(
        2,
        vec![("a".into(), ComplexMatrix::identity(2)), ("b".into(), ComplexMatrix::identity(2))],
    );
    let report = validate_povm(&double);
    let diag: Vec<f64> = report
        .violations
        .iter()
        .filter_map(|v| match v {
            PovmViolation::Incomplete { row, col, deviation } if row == col => Some(*deviation),
            _ => None,
        })
        .collect();
    assert_eq!(diag, vec![1.0, 1.0]);

    let usd = usd_povm_for_angle(PI / 6.0).unwrap();
    assert!(validate_povm(&usd).is_valid());
    for (_, e) in usd.effects() {
        assert!(hermitian_eig(e).unwrap().values.iter().all(|&l| l >= -1e-12));
    }
}

#[test]
fn random_generators_are_deterministic() {
    assert_eq!(random_density::<f64>(4, 9), random_density::<f64>(4, 9));
    assert_eq!(random_pure::<f64>(4, 9), random_pure::<f64>(4, 9));
    for seed in 0..100 {
        let r = random_density::<f64>(4, seed);
        assert!(DensityOperator::diagnose(r.matrix()).unwrap().is_valid());
    }
    let one = random_density::<f64>(1, 3);
    assert!((one.matrix()[(0, 0)] - cx(1.0)).norm() < 1e-15);
}

#[test]
fn single_precision_measures() {
    let a = random_density::<f32>(3, 1);
    let b = random_density::<f32>(3, 2);
    let f = fidelity(&a, &b).unwrap();
    let d = trace_distance(&a, &b).unwrap();
    assert!(1.0 - f <= d + 1e-4 && d <= (1.0 - f * f).sqrt() + 1e-4);
}

fn dim_and_seed() -> impl Strategy<Value = (usize, u64)> {
    (prop::sample::select(vec![2usize, 3, 4, 8]), any::<u64>())
}

proptest! {
    #[test]
    fn fuchs_van_de_graaf((dim, seed) in dim_and_seed()) {
        let a = random_density::<f64>(dim, seed);
        let b = random_density::<f64>(dim, seed.wrapping_add(1));
        let f = fidelity(&a, &b).unwrap();
        let d = trace_distance(&a, &b).unwrap();
        prop_assert!(d - (1.0 - f) >= -1e-8);
        prop_assert!((1.0 - f * f).max(0.0).sqrt() - d >= -1e-8);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
    }

    #[test]
    fn fidelity_multiplicative(seed in any::<u64>()) {
        let a = random_density::<f64>(2, seed);
        let b = random_density::<f64>(2, seed.wrapping_add(1));
        let c = random_density::<f64>(2, seed.wrapping_add(2));
        let d = random_density::<f64>(2, seed.wrapping_add(3));
        let joint = fidelity(&a.tensor(&c).unwrap(), &b.tensor(&d).unwrap()).unwrap();
        prop_assert!((joint - fidelity(&a, &b).unwrap() * fidelity(&c, &d).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn trace_distance_unitarily_invariant((dim, seed) in dim_and_seed()) {
        let a = random_density::<f64>(dim, seed);
        let b = random_density::<f64>(dim, seed.wrapping_add(1));
        let u = random_unitary::<f64>(dim, seed.wrapping_add(2));
        let d0 = trace_distance(&a, &b).unwrap();
        let d1 = trace_distance(&a.conjugate_by(&u).unwrap(), &b.conjugate_by(&u).unwrap()).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-9);
    }

    #[test]
    fn partial_trace_undoes_tensor(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let a = random_density::<f64>(da, seed);
        let b = random_density::<f64>(db, seed.wrapping_add(1));
        let t = tensor_product(a.matrix(), b.matrix()).unwrap();
        let left = partial_trace_matrix(&t, &[da, db], &[0]).unwrap();
        prop_assert!(left.max_abs_diff(a.matrix()).unwrap() < 1e-10);
    }

    #[test]
    fn measures_symmetric((dim, seed) in dim_and_seed()) {
        let a = random_density::<f64>(dim, seed);
        let b = random_density::<f64>(dim, seed.wrapping_add(1));
        prop_assert!((trace_distance(&a, &b).unwrap() - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((fidelity(&a, &b).unwrap() - fidelity(&b, &a).unwrap()).abs() < 1e-9);
    }
}
