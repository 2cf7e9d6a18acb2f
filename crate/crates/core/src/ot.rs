//! Partially secure oblivious transfer from two non-orthogonal qubit states.
//!
//! Alice encodes bit `b` as `|psi_b> = cos(theta)|0> ± sin(theta)|1>` and Bob
//! applies the unambiguous-discrimination measurement with outcomes `bit0`,
//! `bit1` and the inconclusive `hash`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, trace_distance, ComplexMatrix, Matrix, Povm, PureState};
use crate::scalar::Real;

/// Protocol angle `theta` in `(0, pi/4]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OtParams<T: Real> {
    theta: T,
}

impl<T: Real> OtParams<T> {
    pub fn new(theta: T) -> Result<Self> {
        if !theta.is_finite() || theta <= T::zero() || theta > Self::quarter_pi_with_slack() {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} outside the valid interval (0, pi/4]"
            )));
        }
        Ok(Self { theta: theta.min(T::FRAC_PI_4()) })
    }

    // Admits pi/4 computed through a different rounding path.
    fn quarter_pi_with_slack() -> T {
        T::FRAC_PI_4() * (T::one() + T::of(4.0) * T::epsilon())
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// `theta = pi/4`: the two states are orthogonal.
    pub fn is_degenerate(&self) -> bool {
        self.theta == T::FRAC_PI_4()
    }

    /// `<psi_0|psi_1> = cos(2 theta)`.
    pub fn overlap(&self) -> T {
        (self.theta + self.theta).cos()
    }
}

/// Measurement outcome reported to Bob.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OtOutcome {
    Bit0,
    Bit1,
    Hash,
}

impl OtOutcome {
    pub const ALL: [OtOutcome; 3] = [OtOutcome::Bit0, OtOutcome::Bit1, OtOutcome::Hash];

    pub fn label(self) -> &'static str {
        match self {
            OtOutcome::Bit0 => "bit0",
            OtOutcome::Bit1 => "bit1",
            OtOutcome::Hash => "hash",
        }
    }

    pub fn for_bit(bit: u8) -> Self {
        if bit == 0 {
            OtOutcome::Bit0
        } else {
            OtOutcome::Bit1
        }
    }
}

impl fmt::Display for OtOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One simulated round: the bit Alice transferred and Bob's outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OtRoundOutcome {
    pub outcome_label: OtOutcome,
    pub transferred_bit: u8,
}

/// Alice's best probability of forcing `hash` and Bob's best bit guess.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PartialSecurityPair<T> {
    pub p: T,
    pub q: T,
}

/// Probabilities of the three outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OutcomeDistribution<T> {
    pub bit0: T,
    pub bit1: T,
    pub hash: T,
}

impl<T: Real> OutcomeDistribution<T> {
    pub fn get(&self, o: OtOutcome) -> T {
        match o {
            OtOutcome::Bit0 => self.bit0,
            OtOutcome::Bit1 => self.bit1,
            OtOutcome::Hash => self.hash,
        }
    }

    pub fn total(&self) -> T {
        self.bit0 + self.bit1 + self.hash
    }

    fn from_povm(povm: &Povm<T>, psi: &PureState<T>) -> Result<Self> {
        let probs = povm.probabilities_pure(psi)?;
        let get = |label: &str| {
            probs
                .iter()
                .find(|(l, _)| l == label)
                .map(|(_, p)| *p)
                .ok_or_else(|| Error::Construction(format!("POVM has no `{label}` effect")))
        };
        Ok(Self { bit0: get("bit0")?, bit1: get("bit1")?, hash: get("hash")? })
    }
}

/// Alice's cheat: the state maximizing Bob's `hash` probability.
#[derive(Clone, Debug, PartialEq)]
pub struct AliceCheat<T: Real> {
    /// Largest eigenvalue of `E_#`.
    pub p: T,
    /// `<0|E_#|0>`, the value obtained by sending `|0>`.
    pub zero_state_prob: T,
    /// Top eigenvector of `E_#`.
    pub certificate: PureState<T>,
}

fn real_state<T: Real>(a: T, b: T) -> PureState<T> {
    PureState::new(vec![Complex::new(a, T::zero()), Complex::new(b, T::zero())]).expect("unit vector")
}

fn real_matrix<T: Real>(entries: [[T; 2]; 2]) -> ComplexMatrix<T> {
    Matrix::from_fn(2, 2, |i, j| Complex::new(entries[i][j], T::zero()))
}

/// `|psi_0> = cos(theta)|0> + sin(theta)|1>`, `|psi_1> = cos(theta)|0> - sin(theta)|1>`.
pub fn make_states<T: Real>(params: &OtParams<T>) -> (PureState<T>, PureState<T>) {
    let (s, c) = params.theta.sin_cos();
    (real_state(c, s), real_state(c, -s))
}

/// The unambiguous-discrimination POVM with effects `bit0`, `bit1`, `hash`.
pub fn make_usd_povm<T: Real>(params: &OtParams<T>) -> Result<Povm<T>> {
    usd_povm_for_angle(params.theta)
}

/// USD effects for an arbitrary angle. For `theta > pi/4` the inconclusive
/// effect `diag(1 - tan^2 theta, 0)` is negative and construction fails.
pub fn usd_povm_for_angle<T: Real>(theta: T) -> Result<Povm<T>> {
    let (s, c) = theta.sin_cos();
    let k = T::one() / (T::one() + (theta + theta).cos());
    let (ss, cc, sc) = (s * s * k, c * c * k, s * c * k);
    let e0 = real_matrix([[ss, sc], [sc, cc]]);
    let e1 = real_matrix([[ss, -sc], [-sc, cc]]);
    let id = Matrix::identity(2);
    let mut hash = id.sub(&e0)?.sub(&e1)?;
    // Entries other than (0,0) cancel exactly in exact arithmetic.
    hash[(0, 1)] = Complex::zero();
    hash[(1, 0)] = Complex::zero();
    hash[(1, 1)] = Complex::zero();
    Povm::new(2, vec![("bit0".into(), e0), ("bit1".into(), e1), ("hash".into(), hash)])
        .map_err(|e| Error::Construction(format!("USD measurement at theta = {theta}: {e}")))
}

/// Born-rule outcome probabilities when Alice honestly sends `|psi_bit>`.
pub fn honest_distribution<T: Real>(params: &OtParams<T>, bit: u8) -> Result<OutcomeDistribution<T>> {
    check_bit(bit)?;
    let (psi0, psi1) = make_states(params);
    let povm = make_usd_povm(params)?;
    OutcomeDistribution::from_povm(&povm, if bit == 0 { &psi0 } else { &psi1 })
}

fn check_bit(bit: u8) -> Result<()> {
    if bit > 1 {
        return Err(Error::InvalidParameter(format!("bit must be 0 or 1, got {bit}")));
    }
    Ok(())
}

/// Maximum of `<phi|E_#|phi>` over states, from the spectrum of `E_#`.
pub fn alice_cheat_hash_prob<T: Real>(params: &OtParams<T>) -> Result<AliceCheat<T>> {
    let povm = make_usd_povm(params)?;
    let hash = povm.effect("hash").expect("USD POVM has a hash effect");
    let eig = linalg::hermitian_eig(hash)?;
    let certificate = PureState::normalized(eig.vectors.column(0))?;
    let zero = PureState::basis(2, 0)?;
    Ok(AliceCheat {
        p: eig.values[0],
        zero_state_prob: hash.expectation(zero.amplitudes())?.re,
        certificate,
    })
}

/// Helstrom success probability `1/2 + D(psi_0, psi_1)/2`.
pub fn bob_helstrom_prob<T: Real>(params: &OtParams<T>) -> Result<T> {
    let (psi0, psi1) = make_states(params);
    let d = trace_distance(&psi0.density(), &psi1.density())?;
    Ok(T::of(0.5) * (T::one() + d))
}

/// Helstrom measurement: projectors on the non-negative and negative
/// eigenspaces of `rho_0 - rho_1`, labeled `bit0` and `bit1`.
pub fn helstrom_povm<T: Real>(params: &OtParams<T>) -> Result<Povm<T>> {
    let (psi0, psi1) = make_states(params);
    let diff = psi0.projector().sub(&psi1.projector())?;
    let eig = linalg::hermitian_eig(&diff)?;
    let n = eig.values.len();
    let mut e0 = ComplexMatrix::<T>::zeros(n, n);
    for (k, &v) in eig.values.iter().enumerate() {
        if v >= T::zero() {
            let col = eig.vectors.column(k);
            e0 = e0.add(&Matrix::outer(&col, &col))?;
        }
    }
    let e1 = Matrix::identity(n).sub(&e0)?;
    Povm::new(n, vec![("bit0".into(), e0), ("bit1".into(), e1)])
}

pub fn partial_security<T: Real>(params: &OtParams<T>) -> Result<PartialSecurityPair<T>> {
    Ok(PartialSecurityPair { p: alice_cheat_hash_prob(params)?.p, q: bob_helstrom_prob(params)? })
}

/// Who deviates from the protocol in a simulated run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Honest,
    /// Alice sends `|0>` whatever the bit.
    AliceCheats,
    /// Bob replaces the USD measurement with the Helstrom measurement.
    BobCheats,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "honest" => Ok(Strategy::Honest),
            "alice_cheats" | "alice-cheats" => Ok(Strategy::AliceCheats),
            "bob_cheats" | "bob-cheats" => Ok(Strategy::BobCheats),
            other => Err(Error::InvalidParameter(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Empirical tallies of a simulated run next to the analytic expectation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundTally {
    pub strategy: Strategy,
    pub n_rounds: u64,
    pub seed: u64,
    pub bits_sent: [u64; 2],
    pub counts: BTreeMap<OtOutcome, u64>,
    /// Rounds where Bob's reported bit equals the transferred bit.
    pub correct: u64,
    /// Rounds where Bob reported the other bit.
    pub wrong: u64,
    pub frequencies: BTreeMap<OtOutcome, f64>,
    pub expected: BTreeMap<OtOutcome, f64>,
    /// Binomial standard error `sqrt(p(1-p)/n)` of each expected frequency.
    pub sigma: BTreeMap<OtOutcome, f64>,
    pub within_4_sigma: bool,
}

impl RoundTally {
    pub fn frequency(&self, o: OtOutcome) -> f64 {
        self.frequencies.get(&o).copied().unwrap_or(0.0)
    }
}

/// Analytic outcome probabilities averaged over a uniformly random bit.
fn averaged_distribution<T: Real>(params: &OtParams<T>, strategy: Strategy) -> Result<[Vec<f64>; 2]> {
    let (psi0, psi1) = make_states(params);
    let zero = PureState::basis(2, 0)?;
    let povm = match strategy {
        Strategy::BobCheats => helstrom_povm(params)?,
        _ => make_usd_povm(params)?,
    };
    let mut out: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (bit, psi) in [&psi0, &psi1].into_iter().enumerate() {
        let sent = if strategy == Strategy::AliceCheats { &zero } else { psi };
        out[bit] = povm.probabilities_pure(sent)?.into_iter().map(|(_, p)| p.as_f64().max(0.0)).collect();
    }
    Ok(out)
}

/// Outcomes of `n_rounds` independent rounds with uniformly random bits.
pub fn simulate_round_outcomes<T: Real>(
    params: &OtParams<T>,
    n_rounds: u64,
    strategy: Strategy,
    seed: u64,
) -> Result<Vec<OtRoundOutcome>> {
    if n_rounds == 0 {
        return Err(Error::InvalidParameter("n_rounds must be at least 1".into()));
    }
    let probs = averaged_distribution(params, strategy)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_rounds as usize);
    for _ in 0..n_rounds {
        let bit = u8::from(rng.random::<bool>());
        let u: f64 = rng.random();
        let p = &probs[bit as usize];
        let mut acc = 0.0;
        let mut idx = p.len() - 1;
        for (k, &pk) in p.iter().enumerate() {
            acc += pk;
            if u < acc {
                idx = k;
                break;
            }
        }
        out.push(OtRoundOutcome { outcome_label: OtOutcome::ALL[idx], transferred_bit: bit });
    }
    Ok(out)
}

/// Monte-Carlo run of the protocol under `strategy`.
pub fn simulate_rounds<T: Real>(params: &OtParams<T>, n_rounds: u64, strategy: Strategy, seed: u64) -> Result<RoundTally> {
    let outcomes = simulate_round_outcomes(params, n_rounds, strategy, seed)?;
    let probs = averaged_distribution(params, strategy)?;
    let labels: &[OtOutcome] = if strategy == Strategy::BobCheats {
        &OtOutcome::ALL[..2]
    } else {
        &OtOutcome::ALL
    };
    let mut counts: BTreeMap<OtOutcome, u64> = labels.iter().map(|&o| (o, 0)).collect();
    let mut bits_sent = [0u64; 2];
    let (mut correct, mut wrong) = (0u64, 0u64);
    for r in &outcomes {
        *counts.entry(r.outcome_label).or_insert(0) += 1;
        bits_sent[r.transferred_bit as usize] += 1;
        match r.outcome_label {
            OtOutcome::Hash => {}
            o if o == OtOutcome::for_bit(r.transferred_bit) => correct += 1,
            _ => wrong += 1,
        }
    }
    let n = n_rounds as f64;
    let mut frequencies = BTreeMap::new();
    let mut expected = BTreeMap::new();
    let mut sigma = BTreeMap::new();
    let mut within = true;
    for (k, &o) in labels.iter().enumerate() {
        let e = 0.5 * (probs[0][k] + probs[1][k]);
        let s = (e * (1.0 - e) / n).sqrt();
        let freq = counts[&o] as f64 / n;
        within &= (freq - e).abs() <= 4.0 * s + 1e-12;
        frequencies.insert(o, freq);
        expected.insert(o, e);
        sigma.insert(o, s);
    }
    Ok(RoundTally {
        strategy,
        n_rounds,
        seed,
        bits_sent,
        counts,
        correct,
        wrong,
        frequencies,
        expected,
        sigma,
        within_4_sigma: within,
    })
}
