use physsec::qkd::{
    check_rate, chsh, chsh_angles, rate_analysis, simulate, simulate_with_records, Attack, CellAssignment, QkdConfig,
};
use physsec::Error;
use std::f64::consts::SQRT_2;

fn config(n: u64, attack: Attack, seed: u64) -> QkdConfig {
    QkdConfig { n_pairs: n, attack, seed, ..Default::default() }
}

#[test]
fn honest_violates_chsh() {
    let s = simulate(&config(200_000, Attack::None, 1)).unwrap();
    let est = s.chsh.unwrap();
    assert!(est.within(2.0 * SQRT_2, 4.0), "S = {} ± {}", est.value, est.std_error);
    assert_eq!(s.eve_knowledge_fraction, 0.0);
}

#[test]
fn demon_keeps_violation_and_knows_everything() {
    let mut mismatched = 0;
    let s = simulate_with_records(&config(200_000, Attack::Demon, 2), |r| {
        if r.coincident {
            assert!(r.alice_outcome.is_some() && r.bob_outcome.is_some());
            if r.eve_setting != Some(r.bob_setting) || r.eve_outcome != r.bob_outcome {
                mismatched += 1;
            }
        }
    })
    .unwrap();
    assert_eq!(mismatched, 0);
    assert_eq!(s.eve_knowledge_fraction, 1.0);
    assert_eq!(s.coincident_setting_mismatches, 0);
    assert_eq!(s.coincident_outcome_mismatches, 0);
    assert!(s.chsh.unwrap().within(2.0 * SQRT_2, 4.0));
}

#[test]
fn demon_cells_match_quantum_correlators() {
    let s = simulate(&config(400_000, Attack::Demon, 3)).unwrap();
    for cell in &s.cells {
        let want = (2.0 * (cell.alice_angle - cell.bob_angle)).cos();
        let e = cell.correlator.unwrap();
        assert!(e.abs() <= 1.0);
        assert!((e - want).abs() <= 4.0 * cell.std_error.unwrap() + 1e-12, "cell {:?}", cell);
    }
}

#[test]
fn visibility_scales_s() {
    let half = QkdConfig { visibility: 0.5, ..config(200_000, Attack::None, 4) };
    assert!(simulate(&half).unwrap().chsh.unwrap().within(SQRT_2, 4.0));
    let none = QkdConfig { visibility: 0.0, ..config(200_000, Attack::None, 5) };
    assert!(simulate(&none).unwrap().chsh.unwrap().within(0.0, 4.0));
}

#[test]
fn marginals_are_unbiased() {
    for attack in [Attack::None, Attack::Demon] {
        let angles = QkdConfig {
            alice_settings: vec![0.1, 0.9, 1.7],
            bob_settings: vec![0.3, 1.1],
            ..config(100_000, attack, 6)
        };
        let s = simulate(&angles).unwrap();
        assert!(s.alice_plus_fraction.within(0.5, 4.0));
        assert!(s.bob_plus_fraction.within(0.5, 4.0));
    }
}

#[test]
fn runs_are_reproducible() {
    let c = config(20_000, Attack::Demon, 9);
    assert_eq!(simulate(&c).unwrap(), simulate(&c).unwrap());
    let mut first = Vec::new();
    simulate_with_records(&c, |r| first.push(*r)).unwrap();
    let mut second = Vec::new();
    simulate_with_records(&c, |r| second.push(*r)).unwrap();
    assert_eq!(first, second);
    assert_ne!(simulate(&c).unwrap(), simulate(&config(20_000, Attack::Demon, 10)).unwrap());
}

#[test]
fn chsh_arithmetic() {
    let mut s = simulate(&config(1_000, Attack::None, 0)).unwrap();
    let h = SQRT_2 / 2.0;
    for (cell, e) in s.cells.iter_mut().zip([h, -h, h, h]) {
        cell.correlator = Some(e);
        cell.std_error = Some(0.0);
    }
    assert!((chsh(&s, &CellAssignment::default()).unwrap().value - 2.0 * SQRT_2).abs() < 1e-15);
    for cell in &mut s.cells {
        cell.correlator = Some(1.0);
    }
    assert_eq!(chsh(&s, &CellAssignment::default()).unwrap().value, 2.0);
    let flipped = CellAssignment { signs: [1.0, 1.0, 1.0, -1.0], ..Default::default() };
    assert_eq!(chsh(&s, &flipped).unwrap().value, 2.0);
    let out_of_range = CellAssignment { cells: [(0, 0), (0, 1), (1, 0), (2, 2)], ..Default::default() };
    assert!(matches!(chsh(&s, &out_of_range), Err(Error::InsufficientData(_))));
}

#[test]
fn rate_algebra() {
    let feasible = QkdConfig { channel_transmission_honest: 0.4, channel_transmission_eve: 0.8, ..config(1, Attack::None, 0) };
    let r = rate_analysis(&feasible).unwrap();
    assert!((r.required_t_eve - 0.8).abs() < 1e-15 && r.stealth_feasible && r.configured_stealthy);
    assert!((r.honest_rate - r.attack_rate).abs() < 1e-15);
    assert_eq!(r.verdict, "stealthy");

    let infeasible = QkdConfig { channel_transmission_honest: 0.6, ..config(1, Attack::None, 0) };
    let r = rate_analysis(&infeasible).unwrap();
    assert!((r.required_t_eve - 1.2).abs() < 1e-15 && !r.stealth_feasible);
    assert_eq!(r.verdict, "attack rate-detectable");

    let single = QkdConfig { bob_settings: vec![0.0], ..config(1, Attack::None, 0) };
    let r = rate_analysis(&single).unwrap();
    assert_eq!(r.honest_rate, r.attack_rate);
}

#[test]
fn simulated_rates_follow_analytics() {
    let base = QkdConfig {
        channel_transmission_honest: 0.4,
        channel_transmission_eve: 0.8,
        bob_detector_eff: 0.7,
        ..config(200_000, Attack::None, 11)
    };
    let report = rate_analysis(&base).unwrap();
    for attack in [Attack::None, Attack::Demon] {
        let stats = simulate(&QkdConfig { attack, ..base.clone() }).unwrap();
        let check = check_rate(&report, &stats);
        assert!(check.within_4_sigma, "{attack}: {check:?}");
        assert!(stats.chsh.unwrap().within(2.0 * SQRT_2, 4.0));
    }
}

#[test]
fn default_angles_and_validation() {
    let (a, b) = chsh_angles();
    assert_eq!(a.len(), 2);
    assert!((b[1] - 3.0 * b[0]).abs() < 1e-15);
    assert!(simulate(&QkdConfig { n_pairs: 0, ..Default::default() }).is_err());
    assert!(simulate(&QkdConfig { bob_detector_eff: 0.0, ..config(10, Attack::None, 0) }).is_err());
    assert!(simulate(&QkdConfig { channel_transmission_eve: 1.1, ..config(10, Attack::None, 0) }).is_err());
    assert!(simulate(&QkdConfig { alice_settings: vec![f64::NAN], ..config(10, Attack::None, 0) }).is_err());
}
