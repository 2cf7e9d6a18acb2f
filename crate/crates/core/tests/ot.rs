use num_complex::Complex;
use physsec::linalg::{random_pure, random_unitary, ComplexMatrix, Matrix, PureState};
use physsec::ot::{
    alice_cheat_hash_prob, bob_helstrom_prob, honest_distribution, make_states, make_usd_povm, partial_security,
    simulate_round_outcomes, simulate_rounds, usd_povm_for_angle, OtOutcome, OtParams, Strategy,
};
use physsec::Error;
use std::f64::consts::{FRAC_PI_4, PI};

fn grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| FRAC_PI_4 * k as f64 / n as f64).collect()
}

fn params(theta: f64) -> OtParams<f64> {
    OtParams::new(theta).unwrap()
}

/// `<psi|E|psi>` by explicit summation.
fn born(psi: &PureState<f64>, e: &ComplexMatrix<f64>) -> f64 {
    let a = psi.amplitudes();
    let mut s = Complex::new(0.0, 0.0);
    for i in 0..a.len() {
        for j in 0..a.len() {
            s += a[i].conj() * e[(i, j)] * a[j];
        }
    }
    s.re
}

#[test]
fn state_overlaps() {
    let (a, b) = make_states(&params(FRAC_PI_4));
    assert!(a.overlap(&b).unwrap().norm() < 1e-15);
    let (a, b) = make_states(&params(PI / 6.0));
    assert!((a.overlap(&b).unwrap().re - 0.5).abs() < 1e-15);
    let (a, b) = make_states(&params(1e-6));
    assert!((a.overlap(&b).unwrap().re - 1.0).abs() < 1e-11);
    assert!(params(FRAC_PI_4).is_degenerate() && !params(PI / 6.0).is_degenerate());
}

#[test]
fn params_reject_out_of_range() {
    for bad in [0.0, -0.1, 0.8, f64::NAN] {
        assert!(matches!(OtParams::new(bad), Err(Error::InvalidParameter(_))), "{bad}");
    }
}

#[test]
fn usd_matrices_match_closed_form() {
    for theta in grid(20) {
        let povm = make_usd_povm(&params(theta)).unwrap();
        let (s, c) = theta.sin_cos();
        let k = 1.0 / (1.0 + (2.0 * theta).cos());
        let e0 = povm.effect("bit0").unwrap();
        let e1 = povm.effect("bit1").unwrap();
        let eh = povm.effect("hash").unwrap();
        let want0 = [[s * s * k, s * c * k], [s * c * k, c * c * k]];
        let want1 = [[s * s * k, -s * c * k], [-s * c * k, c * c * k]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((e0[(i, j)].re - want0[i][j]).abs() < 1e-12);
                assert!((e1[(i, j)].re - want1[i][j]).abs() < 1e-12);
            }
        }
        assert!((eh[(0, 0)].re - (1.0 - theta.tan().powi(2))).abs() < 1e-12);
        assert!(eh[(1, 1)].norm() < 1e-12 && eh[(0, 1)].norm() < 1e-12);
    }
}

#[test]
fn usd_rejects_wide_angles() {
    assert!(matches!(usd_povm_for_angle(0.9), Err(Error::Construction(_))));
}

#[test]
fn usd_probabilities_at_named_angles() {
    for theta in [PI / 6.0, PI / 8.0, PI / 5.0] {
        let povm = make_usd_povm(&params(theta)).unwrap();
        let (a, b) = make_states(&params(theta));
        assert!(born(&b, povm.effect("bit0").unwrap()).abs() < 1e-15);
        assert!(born(&a, povm.effect("bit1").unwrap()).abs() < 1e-15);
    }
    let povm = make_usd_povm(&params(PI / 6.0)).unwrap();
    let (a, _) = make_states(&params(PI / 6.0));
    assert!((born(&a, povm.effect("bit0").unwrap()) - 0.5).abs() < 1e-12);
    assert!((born(&a, povm.effect("hash").unwrap()) - 0.5).abs() < 1e-12);
}

#[test]
fn honest_distribution_examples() {
    let d = honest_distribution(&params(PI / 6.0), 0).unwrap();
    assert!((d.bit0 - 0.5).abs() < 1e-12 && d.bit1.abs() < 1e-12 && (d.hash - 0.5).abs() < 1e-12);
    let d = honest_distribution(&params(FRAC_PI_4), 1).unwrap();
    assert!((d.bit1 - 1.0).abs() < 1e-12 && d.bit0.abs() < 1e-12 && d.hash.abs() < 1e-12);
}

#[test]
fn honest_distribution_matches_born_rule() {
    for theta in grid(50) {
        let p = params(theta);
        let povm = make_usd_povm(&p).unwrap();
        let (a, b) = make_states(&p);
        for (bit, psi) in [(0u8, &a), (1, &b)] {
            let d = honest_distribution(&p, bit).unwrap();
            for o in OtOutcome::ALL {
                assert!((d.get(o) - born(psi, povm.effect(o.label()).unwrap())).abs() < 1e-12);
            }
            assert!((d.total() - 1.0).abs() < 1e-12);
            let c2 = (2.0 * theta).cos();
            assert!((d.get(OtOutcome::for_bit(bit)) - (1.0 - c2)).abs() < 1e-12);
            assert!((d.hash - c2).abs() < 1e-12);
            assert!(d.get(OtOutcome::for_bit(1 - bit)).abs() <= 1e-12);
        }
    }
}

#[test]
fn partial_security_closed_forms() {
    for theta in grid(100) {
        let ps = partial_security(&params(theta)).unwrap();
        let c2 = (2.0 * theta).cos();
        assert!((ps.p - 2.0 * c2 / (1.0 + c2)).abs() < 1e-12);
        assert!((ps.q - (1.0 + (2.0 * theta).sin()) / 2.0).abs() < 1e-10);
    }
    let p = alice_cheat_hash_prob(&params(PI / 6.0)).unwrap();
    assert!((p.p - 2.0 / 3.0).abs() < 1e-12 && (p.zero_state_prob - 2.0 / 3.0).abs() < 1e-12);
    assert!(alice_cheat_hash_prob(&params(FRAC_PI_4)).unwrap().p.abs() < 1e-12);
    let q = bob_helstrom_prob(&params(PI / 6.0)).unwrap();
    assert!((q - (1.0 + 3f64.sqrt() / 2.0) / 2.0).abs() < 1e-12);
    assert!((bob_helstrom_prob(&params(FRAC_PI_4)).unwrap() - 1.0).abs() < 1e-12);
    assert!((bob_helstrom_prob(&params(1e-7)).unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn zero_state_is_alices_best_cheat() {
    let theta = PI / 6.0;
    let cheat = alice_cheat_hash_prob(&params(theta)).unwrap();
    let eh = make_usd_povm(&params(theta)).unwrap().effect("hash").unwrap().clone();
    let cert = cheat.certificate.amplitudes();
    assert!(cert[0].norm() >= 1.0 - 1e-9);
    let mut best = 0.0f64;
    for seed in 0..10_000 {
        let phi = random_pure::<f64>(2, seed);
        best = best.max(born(&phi, &eh));
    }
    assert!(best <= cheat.p + 1e-9);
    assert!(best > cheat.p - 1e-3);
}

/// Success of `{F, I - F}` at telling the two states apart with equal priors.
fn two_outcome_success(f: &ComplexMatrix<f64>, a: &PureState<f64>, b: &PureState<f64>) -> f64 {
    let rest = ComplexMatrix::<f64>::identity(2).sub(f).unwrap();
    0.5 * born(a, f) + 0.5 * born(b, &rest)
}

#[test]
fn helstrom_is_optimal_over_random_povms() {
    for theta in [PI / 12.0, PI / 6.0, 0.7] {
        let p = params(theta);
        let q = bob_helstrom_prob(&p).unwrap();
        let (a, b) = make_states(&p);
        for seed in 0..1000u64 {
            // F = U diag(x, y) U^dagger with eigenvalues in [0, 1].
            let u = random_unitary::<f64>(2, seed);
            let x = ((seed * 7919) % 1000) as f64 / 999.0;
            let y = ((seed * 104_729) % 1000) as f64 / 999.0;
            let diag = Matrix::from_diagonal(&[Complex::new(x, 0.0), Complex::new(y, 0.0)]);
            let f = u.matmul(&diag).unwrap().matmul(&u.dagger()).unwrap();
            assert!(two_outcome_success(&f, &a, &b) <= q + 1e-9);
        }
    }
}

#[test]
fn p_falls_and_q_rises_with_theta() {
    let pts = grid(100);
    let ps: Vec<_> = pts.iter().map(|&t| partial_security(&params(t)).unwrap()).collect();
    for w in ps.windows(2) {
        assert!(w[1].p < w[0].p);
        assert!(w[1].q > w[0].q);
    }
}

#[test]
fn simulation_tracks_analytics() {
    let p = params(PI / 6.0);
    let honest = simulate_rounds(&p, 100_000, Strategy::Honest, 11).unwrap();
    assert!(honest.within_4_sigma);
    assert!((honest.frequency(OtOutcome::Hash) - 0.5).abs() <= 4.0 * (0.25f64 / 1e5).sqrt());
    assert_eq!(honest.wrong, 0);

    let cheat = simulate_rounds(&p, 100_000, Strategy::AliceCheats, 12).unwrap();
    let sigma = (2.0 / 9.0f64 / 1e5).sqrt();
    assert!((cheat.frequency(OtOutcome::Hash) - 2.0 / 3.0).abs() <= 4.0 * sigma);

    let bob = simulate_rounds(&p, 100_000, Strategy::BobCheats, 13).unwrap();
    assert!(bob.within_4_sigma);
    let q = bob_helstrom_prob(&p).unwrap();
    let rate = bob.correct as f64 / 1e5;
    assert!((rate - q).abs() <= 4.0 * (q * (1.0 - q) / 1e5).sqrt());
}

#[test]
fn simulation_is_reproducible() {
    let p = params(PI / 6.0);
    let a = simulate_round_outcomes(&p, 1, Strategy::Honest, 5).unwrap();
    let b = simulate_round_outcomes(&p, 1, Strategy::Honest, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(simulate_rounds(&p, 500, Strategy::Honest, 3), simulate_rounds(&p, 500, Strategy::Honest, 3));
    assert!(simulate_rounds(&p, 0, Strategy::Honest, 3).is_err());
}

#[test]
fn honest_rounds_never_report_the_wrong_bit() {
    for theta in [0.2, PI / 6.0, FRAC_PI_4] {
        let rounds = simulate_round_outcomes(&params(theta), 5_000, Strategy::Honest, 1).unwrap();
        for r in rounds {
            assert_ne!(r.outcome_label, OtOutcome::for_bit(1 - r.transferred_bit));
        }
    }
}

#[test]
fn single_precision_closed_forms() {
    let p = OtParams::<f32>::new(std::f32::consts::PI / 6.0).unwrap();
    let ps = partial_security(&p).unwrap();
    assert!((ps.p - 2.0 / 3.0).abs() < 1e-5);
    assert!((ps.q - 0.933_012_7).abs() < 1e-5);
}
