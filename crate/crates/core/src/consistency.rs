//! The defining constraints of quantum oblivious transfer, as residuals.
//!
//! Alice holds `A`, Bob holds `B`, and `U` is whatever else the protocol
//! leaves behind. For bit `b` the joint state is the pure `|psi^b>` on
//! `A ⊗ B ⊗ U`, and Bob measures `{E_0, E_1, E_#}` on `B`. OT requires
//!
//! * `Tr(rho_b^B E_b) = Tr(rho_b^B E_#) = 1/2` (Bob learns the bit half the time),
//! * `Tr(rho_b^B E_{1-b}) = 0` (he is never wrong),
//! * `D(rho_0^BU, rho_1^BU) = 1/2` (he can do no better than the measurement),
//! * Alice cannot tell from `AU` whether Bob learned `b`: for every effect `F`
//!   on `AU` the probability of `F` jointly with `E_b` equals that jointly
//!   with `E_#`. This is the operator equality
//!   `Tr_B[E_b |psi^b><psi^b|] = Tr_B[E_# |psi^b><psi^b|]`.
//!
//! [`search`] looks numerically for states and measurements meeting all of
//! them at fixed dimensions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, measures, trace_distance, ComplexMatrix, DensityOperator, Matrix, Povm, PureState, DEFAULT_DIM_CAP,
};
use crate::ot::{make_states, make_usd_povm, OtParams};
use crate::scalar::Real;

/// Components at or below this value count as satisfied.
pub const SATISFIED: f64 = 1e-10;

/// Subsystem dimensions `(d_A, d_B, d_U)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
    pub u: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize, u: usize) -> Result<Self> {
        if a == 0 || b == 0 || u == 0 {
            return Err(Error::InvalidParameter(format!("dimensions must be positive, got ({a}, {b}, {u})")));
        }
        let total = a.checked_mul(b).and_then(|x| x.checked_mul(u)).unwrap_or(usize::MAX);
        if total > DEFAULT_DIM_CAP {
            return Err(Error::DimensionCap { dim: total, cap: DEFAULT_DIM_CAP });
        }
        Ok(Self { a, b, u })
    }

    pub fn total(&self) -> usize {
        self.a * self.b * self.u
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.u)
    }
}

/// A candidate OT solution.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteCandidate<T: Real> {
    pub dims: Dims,
    pub psi0: PureState<T>,
    pub psi1: PureState<T>,
    /// Effects labeled `bit0`, `bit1`, `hash`.
    pub bob_povm: Povm<T>,
}

impl<T: Real> TripartiteCandidate<T> {
    pub fn new(dims: Dims, psi0: PureState<T>, psi1: PureState<T>, bob_povm: Povm<T>) -> Result<Self> {
        let c = Self { dims, psi0, psi1, bob_povm };
        c.check_shapes()?;
        Ok(c)
    }

    fn check_shapes(&self) -> Result<()> {
        let n = self.dims.total();
        if self.psi0.dim() != n || self.psi1.dim() != n {
            return Err(Error::Shape(format!(
                "states of dimension {} and {} for dims {}",
                self.psi0.dim(),
                self.psi1.dim(),
                self.dims
            )));
        }
        if self.bob_povm.dim() != self.dims.b {
            return Err(Error::Shape(format!("POVM on dimension {} but d_B = {}", self.bob_povm.dim(), self.dims.b)));
        }
        for label in ["bit0", "bit1", "hash"] {
            if self.bob_povm.effect(label).is_none() {
                return Err(Error::Shape(format!("POVM lacks the `{label}` effect")));
            }
        }
        Ok(())
    }

    pub fn state(&self, bit: usize) -> &PureState<T> {
        if bit == 0 {
            &self.psi0
        } else {
            &self.psi1
        }
    }

    fn effect(&self, label: &str) -> &ComplexMatrix<T> {
        self.bob_povm.effect(label).expect("checked at construction")
    }
}

/// One of the five constraint families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    HalfBit,
    HalfHash,
    WrongBit,
    BobInfo,
    Alice,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::HalfBit, Family::HalfHash, Family::WrongBit, Family::BobInfo, Family::Alice];

    pub fn name(self) -> &'static str {
        match self {
            Family::HalfBit => "half_bit",
            Family::HalfHash => "half_hash",
            Family::WrongBit => "wrong_bit",
            Family::BobInfo => "bob_info",
            Family::Alice => "alice",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let key = key.strip_prefix("r_").unwrap_or(&key);
        match key {
            "half_bit" | "half_b" => Ok(Family::HalfBit),
            "half_hash" => Ok(Family::HalfHash),
            "wrong_bit" | "wrongbit" => Ok(Family::WrongBit),
            "bob_info" | "bobinfo" => Ok(Family::BobInfo),
            "alice" => Ok(Family::Alice),
            _ => Err(Error::InvalidParameter(format!("unknown constraint family `{s}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Active constraint families and their weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstraintSet {
    active: [bool; 5],
    weights: [f64; 5],
}

impl Default for ConstraintSet {
    fn default() -> Self {
        Self::all()
    }
}

impl ConstraintSet {
    pub fn all() -> Self {
        Self { active: [true; 5], weights: [1.0; 5] }
    }

    /// Only the listed families.
    pub fn only(families: &[Family]) -> Result<Self> {
        relax(families)
    }

    /// Every family except the listed ones.
    pub fn without(dropped: &[Family]) -> Result<Self> {
        let keep: Vec<Family> = Family::ALL.into_iter().filter(|f| !dropped.contains(f)).collect();
        relax(&keep)
    }

    pub fn with_weight(mut self, family: Family, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight for {family} must be positive and finite")));
        }
        self.weights[family.index()] = weight;
        Ok(self)
    }

    pub fn is_active(&self, family: Family) -> bool {
        self.active[family.index()]
    }

    pub fn weight(&self, family: Family) -> f64 {
        self.weights[family.index()]
    }

    pub fn active_families(&self) -> Vec<Family> {
        Family::ALL.into_iter().filter(|&f| self.is_active(f)).collect()
    }

    pub fn dropped_families(&self) -> Vec<Family> {
        Family::ALL.into_iter().filter(|&f| !self.is_active(f)).collect()
    }
}

/// Configuration evaluating only the given (nonempty) families.
pub fn relax(families: &[Family]) -> Result<ConstraintSet> {
    if families.is_empty() {
        return Err(Error::InvalidParameter("constraint subset must be nonempty".into()));
    }
    let mut set = ConstraintSet { active: [false; 5], weights: [1.0; 5] };
    for f in families {
        set.active[f.index()] = true;
    }
    Ok(set)
}

/// Constraint residuals of a candidate. Per-bit arrays are indexed by `b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `|Tr(rho_b^B E_b) - 1/2|`.
    pub r_half_b: [f64; 2],
    /// `|Tr(rho_b^B E_#) - 1/2|`.
    pub r_half_hash: [f64; 2],
    /// `Tr(rho_b^B E_{1-b})`.
    pub r_wrongbit: [f64; 2],
    /// `|D(rho_0^BU, rho_1^BU) - 1/2|`.
    pub r_bobinfo: f64,
    /// `|| Tr_B[E_b psi^b] - Tr_B[E_# psi^b] ||_1`.
    pub r_alice: [f64; 2],
    /// Weighted sum over the active families.
    pub total: f64,
}

impl ResidualReport {
    /// Unweighted sum of one family's components.
    pub fn family(&self, family: Family) -> f64 {
        match family {
            Family::HalfBit => self.r_half_b[0] + self.r_half_b[1],
            Family::HalfHash => self.r_half_hash[0] + self.r_half_hash[1],
            Family::WrongBit => self.r_wrongbit[0] + self.r_wrongbit[1],
            Family::BobInfo => self.r_bobinfo,
            Family::Alice => self.r_alice[0] + self.r_alice[1],
        }
    }

    fn weighted(&self, set: &ConstraintSet) -> f64 {
        Family::ALL.into_iter().filter(|&f| set.is_active(f)).map(|f| set.weight(f) * self.family(f)).sum()
    }

    fn snapped(mut self, set: &ConstraintSet) -> Self {
        let snap = |x: &mut f64| {
            if *x <= SATISFIED {
                *x = 0.0;
            }
        };
        for x in self
            .r_half_b
            .iter_mut()
            .chain(self.r_half_hash.iter_mut())
            .chain(self.r_wrongbit.iter_mut())
            .chain(self.r_alice.iter_mut())
        {
            snap(x);
        }
        snap(&mut self.r_bobinfo);
        self.total = self.weighted(set);
        self
    }
}

/// `rho^B` of a state on `A ⊗ B ⊗ U`.
fn reduced_b<T: Real>(psi: &[Complex<T>], d: Dims) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::zeros(d.b, d.b);
    for a in 0..d.a {
        for u in 0..d.u {
            for i in 0..d.b {
                let x = psi[(a * d.b + i) * d.u + u];
                for j in 0..d.b {
                    out[(i, j)] += x * psi[(a * d.b + j) * d.u + u].conj();
                }
            }
        }
    }
    out
}

/// `rho^{BU}` of a state on `A ⊗ B ⊗ U`.
fn reduced_bu<T: Real>(psi: &[Complex<T>], d: Dims) -> ComplexMatrix<T> {
    let n = d.b * d.u;
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..d.a {
        let block = &psi[a * n..(a + 1) * n];
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += block[i] * block[j].conj();
            }
        }
    }
    out
}

/// `Tr_B[(I ⊗ E ⊗ I) |psi><psi|]` on `A ⊗ U`.
fn alice_view<T: Real>(psi: &[Complex<T>], e: &ComplexMatrix<T>, d: Dims) -> ComplexMatrix<T> {
    let n = d.a * d.u;
    // phi[(a, u)][beta] = sum_gamma E[beta][gamma] psi[a, gamma, u]
    let mut phi: Vec<Complex<T>> = vec![Complex::zero(); n * d.b];
    for a in 0..d.a {
        for u in 0..d.u {
            for beta in 0..d.b {
                let mut acc: Complex<T> = Complex::zero();
                for gamma in 0..d.b {
                    acc += e[(beta, gamma)] * psi[(a * d.b + gamma) * d.u + u];
                }
                phi[(a * d.u + u) * d.b + beta] = acc;
            }
        }
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let (a2, u2) = (c / d.u, c % d.u);
            let mut acc: Complex<T> = Complex::zero();
            for beta in 0..d.b {
                acc += phi[r * d.b + beta] * psi[(a2 * d.b + beta) * d.u + u2].conj();
            }
            out[(r, c)] = acc;
        }
    }
    out
}

fn trace_product<T: Real>(rho: &ComplexMatrix<T>, e: &ComplexMatrix<T>) -> T {
    let n = rho.rows();
    let mut acc = Complex::zero();
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * e[(j, i)];
        }
    }
    acc.re
}

fn raw_residual<T: Real>(c: &TripartiteCandidate<T>, set: &ConstraintSet) -> Result<ResidualReport> {
    let d = c.dims;
    let half = 0.5;
    let labels = ["bit0", "bit1"];
    let hash = c.effect("hash");
    let mut r_half_b = [0.0; 2];
    let mut r_half_hash = [0.0; 2];
    let mut r_wrongbit = [0.0; 2];
    let mut r_alice = [0.0; 2];
    let need_b = set.is_active(Family::HalfBit) || set.is_active(Family::HalfHash) || set.is_active(Family::WrongBit);
    for bit in 0..2 {
        let psi = c.state(bit).amplitudes();
        let e_b = c.effect(labels[bit]);
        if need_b {
            let rho = reduced_b(psi, d);
            r_half_b[bit] = (trace_product(&rho, e_b).as_f64() - half).abs();
            r_half_hash[bit] = (trace_product(&rho, hash).as_f64() - half).abs();
            r_wrongbit[bit] = trace_product(&rho, c.effect(labels[1 - bit])).as_f64().max(0.0);
        }
        if set.is_active(Family::Alice) {
            let mut diff = alice_view(psi, e_b, d).sub(&alice_view(psi, hash, d))?;
            diff.hermitize();
            r_alice[bit] = measures::trace_norm_hermitian(&diff)?.as_f64();
        }
    }
    let r_bobinfo = if set.is_active(Family::BobInfo) {
        let mut r0 = reduced_bu(c.psi0.amplitudes(), d);
        let mut r1 = reduced_bu(c.psi1.amplitudes(), d);
        r0.hermitize();
        r1.hermitize();
        let dist = trace_distance(&DensityOperator::from_trusted(r0), &DensityOperator::from_trusted(r1))?;
        (dist.as_f64() - half).abs()
    } else {
        0.0
    };
    let mut report = ResidualReport { r_half_b, r_half_hash, r_wrongbit, r_bobinfo, r_alice, total: 0.0 };
    report.total = report.weighted(set);
    Ok(report)
}

/// Residuals of every family (inactive families in `set` are reported as 0
/// and excluded from `total`). Components at or below 1e-10 are reported as 0.
pub fn residual_with<T: Real>(c: &TripartiteCandidate<T>, set: &ConstraintSet) -> Result<ResidualReport> {
    c.check_shapes()?;
    Ok(raw_residual(c, set)?.snapped(set))
}

/// Residuals with all five families active at unit weight.
pub fn residual<T: Real>(c: &TripartiteCandidate<T>) -> Result<ResidualReport> {
    residual_with(c, &ConstraintSet::all())
}

/// A point at which the Bob-side families vanish, when the dimensions allow:
///
/// * `d_A >= 2, d_B >= 3`: `|psi^b> = (|0>|b>|0> + |1>|2>|0>)/sqrt(2)`, Bob
///   measuring in the computational basis with `E_# = I - E_0 - E_1`. Also
///   satisfies `D = 1/2`.
/// * `d_B = 2`: `|psi^b> = |0>|psi_b>|0>` with the USD measurement at
///   `cos(2 theta) = 1/2`. Here `D = sqrt(3)/2`.
pub fn witness_candidate<T: Real>(dims: Dims) -> Option<TripartiteCandidate<T>> {
    let n = dims.total();
    let one = Complex::new(T::one(), T::zero());
    let idx = |a: usize, b: usize, u: usize| (a * dims.b + b) * dims.u + u;
    if dims.a >= 2 && dims.b >= 3 {
        let h = T::FRAC_1_SQRT_2();
        let mk = |bit: usize| {
            let mut v = vec![Complex::zero(); n];
            v[idx(0, bit, 0)] = one.scale(h);
            v[idx(1, 2, 0)] = one.scale(h);
            PureState::new(v).expect("unit vector")
        };
        let proj = |k: usize| Matrix::from_fn(dims.b, dims.b, |i, j| if i == k && j == k { one } else { Complex::zero() });
        let e0 = proj(0);
        let e1 = proj(1);
        let hash = Matrix::identity(dims.b).sub(&e0).ok()?.sub(&e1).ok()?;
        let povm = Povm::new(dims.b, vec![("bit0".into(), e0), ("bit1".into(), e1), ("hash".into(), hash)]).ok()?;
        return TripartiteCandidate::new(dims, mk(0), mk(1), povm).ok();
    }
    if dims.b >= 2 {
        let params = OtParams::new(T::PI() / T::of(6.0)).ok()?;
        let (p0, p1) = make_states(&params);
        let usd = make_usd_povm(&params).ok()?;
        let embed = |m: &ComplexMatrix<T>| Matrix::from_fn(dims.b, dims.b, |i, j| if i < 2 && j < 2 { m[(i, j)] } else { Complex::zero() });
        let e0 = embed(usd.effect("bit0")?);
        let e1 = embed(usd.effect("bit1")?);
        let hash = Matrix::identity(dims.b).sub(&e0).ok()?.sub(&e1).ok()?;
        let mk = |p: &PureState<T>| {
            let mut v = vec![Complex::zero(); n];
            v[idx(0, 0, 0)] = p.amplitudes()[0];
            v[idx(0, 1, 0)] = p.amplitudes()[1];
            PureState::new(v).expect("unit vector")
        };
        let povm = Povm::new(dims.b, vec![("bit0".into(), e0), ("bit1".into(), e1), ("hash".into(), hash)]).ok()?;
        return TripartiteCandidate::new(dims, mk(&p0), mk(&p1), povm).ok();
    }
    None
}

/// Search settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchConfig {
    pub dims: Dims,
    pub restarts: usize,
    /// Maximum number of coordinate sweeps per restart.
    pub max_iters: usize,
    pub seed: u64,
    pub constraints: ConstraintSet,
    /// Start restart 0 from [`witness_candidate`] instead of a random point.
    pub witness_start: bool,
}

impl SearchConfig {
    pub fn new(dims: Dims, restarts: usize, max_iters: usize, seed: u64) -> Self {
        Self { dims, restarts, max_iters, seed, constraints: ConstraintSet::all(), witness_start: true }
    }

    pub fn with_constraints(mut self, constraints: ConstraintSet) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn with_witness_start(mut self, on: bool) -> Self {
        self.witness_start = on;
        self
    }
}

/// Best point found by [`search`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub dims: Dims,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub best_total_residual: f64,
    pub best_restart: usize,
    pub components: ResidualReport,
    /// Families excluded from the objective.
    pub relaxations: Vec<Family>,
    pub witness_start: bool,
    /// Coordinate sweeps used by each restart.
    pub iterations: Vec<usize>,
    pub total_evaluations: u64,
}

/// Real parameter vector of a candidate: the two state vectors followed by
/// the three POVM generators `G_i`, all as interleaved real/imaginary parts.
struct Layout {
    dims: Dims,
}

impl Layout {
    fn state_len(&self) -> usize {
        2 * self.dims.total()
    }

    fn gen_len(&self) -> usize {
        2 * self.dims.b * self.dims.b
    }

    fn len(&self) -> usize {
        2 * self.state_len() + 3 * self.gen_len()
    }

    fn complex<T: Real>(x: &[f64]) -> Vec<Complex<T>> {
        x.chunks_exact(2).map(|p| Complex::new(T::of(p[0]), T::of(p[1]))).collect()
    }

    fn decode<T: Real>(&self, x: &[f64]) -> Option<TripartiteCandidate<T>> {
        let sl = self.state_len();
        let psi0 = PureState::normalized(Self::complex(&x[..sl])).ok()?;
        let psi1 = PureState::normalized(Self::complex(&x[sl..2 * sl])).ok()?;
        let db = self.dims.b;
        let gl = self.gen_len();
        let gens: Vec<ComplexMatrix<T>> = (0..3)
            .map(|k| {
                let off = 2 * sl + k * gl;
                Matrix::new(db, db, Self::complex(&x[off..off + gl])).expect("square generator")
            })
            .collect();
        let povm = povm_from_generators(&gens)?;
        Some(TripartiteCandidate { dims: self.dims, psi0, psi1, bob_povm: povm })
    }

    fn encode<T: Real>(&self, c: &TripartiteCandidate<T>) -> Result<Vec<f64>> {
        let mut x = Vec::with_capacity(self.len());
        for psi in [&c.psi0, &c.psi1] {
            for z in psi.amplitudes() {
                x.push(z.re.as_f64());
                x.push(z.im.as_f64());
            }
        }
        for label in ["bit0", "bit1", "hash"] {
            let g = psd_sqrt(c.effect(label))?;
            for z in g.as_slice() {
                x.push(z.re.as_f64());
                x.push(z.im.as_f64());
            }
        }
        Ok(x)
    }
}

fn psd_sqrt<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    spectral_map(m, |v| v.max(T::zero()).sqrt())
}

fn spectral_map<T: Real>(m: &ComplexMatrix<T>, f: impl Fn(T) -> T) -> Result<ComplexMatrix<T>> {
    let eig = linalg::hermitian_eig(m)?;
    let n = m.rows();
    let v = &eig.vectors;
    let fv: Vec<T> = eig.values.iter().map(|&x| f(x)).collect();
    Ok(Matrix::from_fn(n, n, |i, j| {
        (0..n).fold(Complex::zero(), |acc, k| acc + v[(i, k)] * v[(j, k)].conj() * fv[k])
    }))
}

/// `E_i = S^{-1/2} G_i^dagger G_i S^{-1/2}` with `S = sum_i G_i^dagger G_i`.
/// Returns `None` when `S` is numerically singular.
pub fn povm_from_generators<T: Real>(gens: &[ComplexMatrix<T>]) -> Option<Povm<T>> {
    let n = gens.first()?.rows();
    let grams: Vec<ComplexMatrix<T>> = gens
        .iter()
        .map(|g| {
            let mut m = g.adjoint_mul(g).expect("square");
            m.hermitize();
            m
        })
        .collect();
    let mut s = ComplexMatrix::zeros(n, n);
    for m in &grams {
        s = s.add(m).ok()?;
    }
    let values = linalg::hermitian_eigenvalues(&s).ok()?;
    let (max, min) = (values[0], values[n - 1]);
    if !(min > max * T::tol(1e-12)) {
        return None;
    }
    let inv_sqrt = spectral_map(&s, |v| T::one() / v.sqrt()).ok()?;
    let labels = ["bit0", "bit1", "hash"];
    let effects = grams
        .iter()
        .zip(labels)
        .map(|(m, l)| {
            let mut e = inv_sqrt.matmul(m).expect("square").matmul(&inv_sqrt).expect("square");
            e.hermitize();
            (l.to_string(), e)
        })
        .collect();
    Some(Povm::unchecked(n, effects))
}

struct Objective<'a> {
    layout: &'a Layout,
    set: &'a ConstraintSet,
    evaluations: u64,
}

impl Objective<'_> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        match self.layout.decode::<f64>(x) {
            Some(c) => raw_residual(&c, self.set).map_or(f64::INFINITY, |r| r.total),
            None => f64::INFINITY,
        }
    }
}

const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-11;
const MAX_STEP: f64 = 1.0;

/// Derivative-free coordinate search: each coordinate is moved by `±step_i`;
/// a successful move doubles that coordinate's step, a failed pair halves it.
fn coordinate_descent(obj: &mut Objective<'_>, x: &mut [f64], max_iters: usize) -> (f64, usize) {
    let mut best = obj.eval(x);
    let mut step = vec![INITIAL_STEP; x.len()];
    let mut sweeps = 0;
    while sweeps < max_iters {
        sweeps += 1;
        for i in 0..x.len() {
            let orig = x[i];
            let mut moved = false;
            for dir in [1.0, -1.0] {
                x[i] = orig + dir * step[i];
                let v = obj.eval(x);
                if v < best {
                    best = v;
                    moved = true;
                    break;
                }
            }
            if moved {
                step[i] = (step[i] * 2.0).min(MAX_STEP);
            } else {
                x[i] = orig;
                step[i] *= 0.5;
            }
        }
        if best <= SATISFIED * 1e-2 || step.iter().all(|&s| s < MIN_STEP) {
            break;
        }
    }
    (best, sweeps)
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Multi-restart feasibility search. Deterministic in
/// `(dims, restarts, max_iters, seed, constraints, witness_start)`.
pub fn search(config: &SearchConfig) -> Result<FeasibilityReport> {
    if config.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let dims = Dims::new(config.dims.a, config.dims.b, config.dims.u)?;
    let layout = Layout { dims };
    let mut obj = Objective { layout: &layout, set: &config.constraints, evaluations: 0 };
    let witness = if config.witness_start { witness_candidate::<f64>(dims) } else { None };

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut iterations = Vec::with_capacity(config.restarts);
    for r in 0..config.restarts {
        let mut x = match (&witness, r) {
            (Some(w), 0) => layout.encode(w)?,
            _ => {
                let mut rng = restart_rng(config.seed, r);
                (0..layout.len()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
            }
        };
        let (value, sweeps) = coordinate_descent(&mut obj, &mut x, config.max_iters);
        iterations.push(sweeps);
        if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
            best = Some((value, r, x));
        }
    }
    let (_, best_restart, x) = best.expect("at least one restart");
    let candidate = layout
        .decode::<f64>(&x)
        .ok_or_else(|| Error::Construction("search ended at a singular measurement".into()))?;
    let components = residual_with(&candidate, &config.constraints)?;
    Ok(FeasibilityReport {
        dims,
        seed: config.seed,
        restarts: config.restarts,
        max_iters: config.max_iters,
        best_total_residual: components.total,
        best_restart,
        components,
        relaxations: config.constraints.dropped_families(),
        witness_start: config.witness_start,
        iterations,
        total_evaluations: obj.evaluations,
    })
}
