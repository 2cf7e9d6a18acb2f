//! Bit commitment built on the partial OT.
//!
//! Alice commits to `b` by sending `N` strings of `M` bits through the OT,
//! each string having parity `b`. Her purification attack prepares the
//! superposition of all even-parity strings; what Bob holds is then
//! `W_0 = rho_E^{⊗N}` or `W_1 = rho_O^{⊗N}`. Alice unveils the bit of her
//! choice with probability `(1 + F(W_0, W_1)^2)/2`, Bob's joint parity
//! measurement guesses the bit with probability `(1 + D(W_0, W_1))/2`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fidelity, trace_distance, ComplexMatrix, DensityOperator, Matrix, DEFAULT_DIM_CAP};
use crate::ot::{self, OtParams};
use crate::scalar::Real;

/// Largest `M * N` for which `D(W_0, W_1)` is computed exactly.
pub const DEFAULT_EXACT_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BcParams<T: Real> {
    pub m: usize,
    pub n: usize,
    pub theta: T,
    pub exact_cap: usize,
}

impl<T: Real> BcParams<T> {
    pub fn new(m: usize, n: usize, theta: T) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!("M and N must be positive (got M = {m}, N = {n})")));
        }
        OtParams::new(theta)?;
        Ok(Self { m, n, theta, exact_cap: DEFAULT_EXACT_CAP })
    }

    pub fn with_exact_cap(mut self, cap: usize) -> Self {
        self.exact_cap = cap;
        self
    }

    pub fn ot(&self) -> OtParams<T> {
        OtParams::new(self.theta).expect("validated in constructor")
    }

    /// Whether `W_0` and `W_1` fit under the exact-computation cap.
    pub fn is_exact(&self) -> bool {
        self.m.checked_mul(self.n).is_some_and(|mn| mn <= self.exact_cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_bit(bit: u8) -> Self {
        if bit == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Equal mixture of `|psi_s><psi_s|` over `m`-bit strings `s` of one parity.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityMixture<T: Real> {
    pub parity: Parity,
    pub m: usize,
    pub operator: DensityOperator<T>,
}

fn real2<T: Real>(a: T, b: T, c: T, d: T) -> ComplexMatrix<T> {
    let z = T::zero();
    Matrix::new(2, 2, vec![Complex::new(a, z), Complex::new(b, z), Complex::new(c, z), Complex::new(d, z)])
        .expect("2x2")
}

fn kron_power<T: Real>(a: &ComplexMatrix<T>, m: usize) -> Result<ComplexMatrix<T>> {
    let mut out = a.clone();
    for _ in 1..m {
        out = out.kron(a)?;
    }
    Ok(out)
}

/// Builds `rho_E` or `rho_O` on `m` qubits.
///
/// Averaging `|psi_0><psi_0|` and `|psi_1><psi_1|` gives `sigma = diag(c^2, s^2)`
/// and half their difference is `delta = sc X`, so the even and odd mixtures
/// are `sigma^{⊗m} ± delta^{⊗m}`.
pub fn build_parity_mixture<T: Real>(m: usize, theta: T, parity: Parity) -> Result<ParityMixture<T>> {
    OtParams::new(theta)?;
    if m == 0 {
        return Err(Error::InvalidParameter("M must be positive".into()));
    }
    if m >= usize::BITS as usize || 1usize << m > DEFAULT_DIM_CAP {
        return Err(Error::DimensionCap { dim: 1usize.checked_shl(m as u32).unwrap_or(usize::MAX), cap: DEFAULT_DIM_CAP });
    }
    let (s, c) = theta.sin_cos();
    let sigma = kron_power(&real2(c * c, T::zero(), T::zero(), s * s), m)?;
    let delta = kron_power(&real2(T::zero(), s * c, s * c, T::zero()), m)?;
    let mut op = match parity {
        Parity::Even => sigma.add(&delta)?,
        Parity::Odd => sigma.sub(&delta)?,
    };
    op.hermitize();
    Ok(ParityMixture { parity, m, operator: DensityOperator::from_trusted(op) })
}

/// `W_bit`, the `N`-fold tensor power of the parity mixture for `bit`.
pub fn build_w<T: Real>(params: &BcParams<T>, bit: u8) -> Result<DensityOperator<T>> {
    if !params.is_exact() {
        return Err(Error::DimensionCap {
            dim: 1usize.checked_shl((params.m * params.n) as u32).unwrap_or(usize::MAX),
            cap: 1usize << params.exact_cap.min(63),
        });
    }
    let mix = build_parity_mixture(params.m, params.theta, Parity::of_bit(bit))?;
    mix.operator.tensor_power(params.n, DEFAULT_DIM_CAP)
}

/// `F(rho_E, rho_O)` for `m` qubits.
///
/// Computed from the operators when `2^m` is within the dimension cap.
/// Beyond it the exact block structure is used: on each pair of complementary
/// basis strings `{x, x̄}` both mixtures are rank one, with fidelity
/// `|c^{2(m-k)} s^{2k} - c^{2k} s^{2(m-k)}|` for `x` of Hamming weight `k`.
pub fn parity_fidelity<T: Real>(m: usize, theta: T) -> Result<T> {
    if m < usize::BITS as usize && 1usize << m <= DEFAULT_DIM_CAP {
        let even = build_parity_mixture(m, theta, Parity::Even)?;
        let odd = build_parity_mixture(m, theta, Parity::Odd)?;
        fidelity(&even.operator, &odd.operator)
    } else {
        OtParams::new(theta)?;
        Ok(T::of(parity_fidelity_blocks(m, theta.as_f64())))
    }
}

/// Closed block sum `½ Σ_k C(m,k) |α_k − α_{m−k}|` with
/// `α_k = c^{2(m−k)} s^{2k}`, evaluated in log space.
pub fn parity_fidelity_blocks(m: usize, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let (ls, lc) = ((s * s).ln(), (c * c).ln());
    let mut ln_binom = 0.0f64;
    let mut total = 0.0;
    for k in 0..=m {
        if k > 0 {
            ln_binom += ((m - k + 1) as f64).ln() - (k as f64).ln();
        }
        let a = ((m - k) as f64 * lc + k as f64 * ls + ln_binom).exp();
        let b = (k as f64 * lc + (m - k) as f64 * ls + ln_binom).exp();
        total += (a - b).abs();
    }
    0.5 * total
}

/// `D(rho_E, rho_O) = sin(2 theta)^m`, from the same block structure.
pub fn parity_trace_distance_blocks(m: usize, theta: f64) -> f64 {
    (2.0 * theta).sin().powi(m as i32)
}

/// `f = F(W_0, W_1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityResult<T> {
    /// `F(rho_E, rho_O)^N`.
    pub f: T,
    pub per_string: T,
    /// `F(W_0, W_1)` computed on the full operators, when within the cap.
    pub direct: Option<T>,
}

pub fn compute_f<T: Real>(params: &BcParams<T>) -> Result<FidelityResult<T>> {
    let per_string = parity_fidelity(params.m, params.theta)?;
    let f = per_string.powi(params.n as i32);
    let direct = if params.is_exact() {
        Some(fidelity(&build_w(params, 0)?, &build_w(params, 1)?)?)
    } else {
        None
    };
    Ok(FidelityResult { f, per_string, direct })
}

/// Multiplicativity only, without the direct cross-check.
pub fn compute_f_fast<T: Real>(params: &BcParams<T>) -> Result<T> {
    Ok(parity_fidelity(params.m, params.theta)?.powi(params.n as i32))
}

/// `d = D(W_0, W_1)`, exact or bracketed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DValue<T> {
    Exact { d: T },
    /// Fuchs–van de Graaf bracket `[1 - f, sqrt(1 - f^2)]`.
    Interval { lower: T, upper: T },
}

impl<T: Real> DValue<T> {
    pub fn lower(&self) -> T {
        match *self {
            DValue::Exact { d } => d,
            DValue::Interval { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> T {
        match *self {
            DValue::Exact { d } => d,
            DValue::Interval { upper, .. } => upper,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, DValue::Exact { .. })
    }
}

pub fn compute_d<T: Real>(params: &BcParams<T>) -> Result<DValue<T>> {
    if params.is_exact() {
        let d = trace_distance(&build_w(params, 0)?, &build_w(params, 1)?)?;
        Ok(DValue::Exact { d })
    } else {
        let f = compute_f_fast(params)?;
        Ok(fvdg_interval(f))
    }
}

fn fvdg_interval<T: Real>(f: T) -> DValue<T> {
    let f = f.min(T::one()).max(T::zero());
    DValue::Interval { lower: T::one() - f, upper: (T::one() - f * f).max(T::zero()).sqrt() }
}

/// Classical bounds: Bob guesses the bit with probability at most `N q^M`
/// (union over strings), Alice changes her commitment with probability `p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassicalBounds<T> {
    pub alice: T,
    pub bob_raw: T,
    pub bob_clipped: T,
    pub bob_was_clipped: bool,
}

pub fn classical_bounds<T: Real>(p: T, q: T, m: usize, n: usize) -> ClassicalBounds<T> {
    let bob_raw = T::of(n as f64) * q.powi(m as i32);
    ClassicalBounds {
        alice: p.powi(n as i32),
        bob_raw,
        bob_clipped: bob_raw.min(T::one()),
        bob_was_clipped: bob_raw > T::one(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BcCheatReport<T: Real> {
    pub theta: T,
    pub m: usize,
    pub n: usize,
    pub f: T,
    /// `F(W_0, W_1)` on the full operators, when computed.
    pub f_direct: Option<T>,
    pub d: DValue<T>,
    /// `f + d`, with the lower end of `d` for interval rows.
    pub f_plus_d: T,
    /// `(1 + f^2)/2`.
    pub alice_quantum: T,
    /// `(1 + d)/2`; lower end for interval rows.
    pub bob_quantum: T,
    pub bob_quantum_upper: T,
    pub p: T,
    pub q: T,
    pub alice_classical: T,
    pub bob_classical_raw: T,
    pub bob_classical_clipped: T,
    pub bob_classical_was_clipped: bool,
}

impl<T: Real> BcCheatReport<T> {
    pub fn is_exact(&self) -> bool {
        self.d.is_exact()
    }

    /// `f + d >= 1 - 1e-9`.
    pub fn satisfies_bound(&self) -> bool {
        self.f_plus_d.as_f64() >= 1.0 - 1e-9
    }
}

/// Cheat report; the direct `F(W_0, W_1)` cross-check is computed when
/// `cross_check` is set and the row is exact.
pub fn cheat_report_with<T: Real>(params: &BcParams<T>, cross_check: bool) -> Result<BcCheatReport<T>> {
    let ot = params.ot();
    let p = ot::alice_cheat_hash_prob(&ot)?.p;
    let q = ot::bob_helstrom_prob(&ot)?;
    let (f, f_direct) = if cross_check {
        let r = compute_f(params)?;
        (r.f, r.direct)
    } else {
        (compute_f_fast(params)?, None)
    };
    let d = if params.is_exact() { compute_d(params)? } else { fvdg_interval(f) };
    let half = T::of(0.5);
    let cb = classical_bounds(p, q, params.m, params.n);
    Ok(BcCheatReport {
        theta: params.theta,
        m: params.m,
        n: params.n,
        f,
        f_direct,
        d,
        f_plus_d: f + d.lower(),
        alice_quantum: half * (T::one() + f * f),
        bob_quantum: half * (T::one() + d.lower()),
        bob_quantum_upper: half * (T::one() + d.upper()),
        p,
        q,
        alice_classical: cb.alice,
        bob_classical_raw: cb.bob_raw,
        bob_classical_clipped: cb.bob_clipped,
        bob_classical_was_clipped: cb.bob_was_clipped,
    })
}

pub fn cheat_report<T: Real>(params: &BcParams<T>) -> Result<BcCheatReport<T>> {
    cheat_report_with(params, true)
}

/// Rows for every `(M, N)` in the ranges, ordered by `M` then `N`. Rows
/// beyond the exact cap are interval rows when `allow_interval` is set and
/// an error otherwise.
pub fn sweep<T: Real>(
    theta: T,
    m_range: std::ops::RangeInclusive<usize>,
    n_range: std::ops::RangeInclusive<usize>,
    exact_cap: usize,
    allow_interval: bool,
) -> Result<Vec<BcCheatReport<T>>> {
    let mut rows = Vec::new();
    for m in m_range {
        for n in n_range.clone() {
            let params = BcParams::new(m, n, theta)?.with_exact_cap(exact_cap);
            if !params.is_exact() && !allow_interval {
                return Err(Error::DimensionCap {
                    dim: 1usize.checked_shl((m * n) as u32).unwrap_or(usize::MAX),
                    cap: 1usize << exact_cap.min(63),
                });
            }
            rows.push(cheat_report(&params)?);
        }
    }
    Ok(rows)
}
