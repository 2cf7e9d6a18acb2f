//! Entanglement-based QKD with coincidence post-selection, honest and under
//! the "demonic photon" attack.
//!
//! A source emits one polarization-entangled pair per trial slot. Outcomes at
//! polarizer angles `alpha`, `beta` are uniform `±1` with correlation
//! `E = V cos 2(alpha - beta)`. Only trials in which both parties register a
//! detection (coincidences) are kept.
//!
//! Under attack Eve intercepts Bob's photon, measures it at a setting drawn
//! from Bob's published set, and sends a demon that registers at Bob only if
//! his setting matches hers, always reporting her outcome. The post-selected
//! statistics are those of the honest source, while Eve knows every kept
//! outcome of Bob.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attack {
    None,
    Demon,
}

impl FromStr for Attack {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "honest" => Ok(Attack::None),
            "demon" => Ok(Attack::Demon),
            other => Err(Error::InvalidParameter(format!("unknown attack `{other}` (expected none or demon)"))),
        }
    }
}

impl fmt::Display for Attack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Attack::None => "none",
            Attack::Demon => "demon",
        })
    }
}

/// Simulation settings. Angles in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QkdConfig {
    pub n_pairs: u64,
    pub alice_settings: Vec<f64>,
    pub bob_settings: Vec<f64>,
    pub visibility: f64,
    pub channel_transmission_honest: f64,
    pub channel_transmission_eve: f64,
    /// Alice's detectors are ideal; must be 1.
    pub alice_detector_eff: f64,
    pub bob_detector_eff: f64,
    pub attack: Attack,
    pub seed: u64,
}

/// Alice `{0, pi/4}`, Bob `{pi/8, 3pi/8}`.
pub fn chsh_angles() -> (Vec<f64>, Vec<f64>) {
    use std::f64::consts::PI;
    (vec![0.0, PI / 4.0], vec![PI / 8.0, 3.0 * PI / 8.0])
}

impl Default for QkdConfig {
    fn default() -> Self {
        let (a, b) = chsh_angles();
        Self {
            n_pairs: 1_000_000,
            alice_settings: a,
            bob_settings: b,
            visibility: 1.0,
            channel_transmission_honest: 1.0,
            channel_transmission_eve: 1.0,
            alice_detector_eff: 1.0,
            bob_detector_eff: 1.0,
            attack: Attack::None,
            seed: 0,
        }
    }
}

fn in_unit(name: &str, x: f64, allow_zero: bool) -> Result<()> {
    let ok = x.is_finite() && x <= 1.0 && (x > 0.0 || (allow_zero && x == 0.0));
    if !ok {
        let range = if allow_zero { "[0, 1]" } else { "(0, 1]" };
        return Err(Error::InvalidParameter(format!("{name} = {x} outside {range}")));
    }
    Ok(())
}

impl QkdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 {
            return Err(Error::InvalidParameter("n_pairs must be at least 1".into()));
        }
        if self.alice_settings.is_empty() || self.bob_settings.is_empty() {
            return Err(Error::InvalidParameter("setting lists must be nonempty".into()));
        }
        if !self.alice_settings.iter().chain(&self.bob_settings).all(|a| a.is_finite()) {
            return Err(Error::InvalidParameter("setting angles must be finite".into()));
        }
        in_unit("visibility", self.visibility, true)?;
        in_unit("channel_transmission_honest", self.channel_transmission_honest, false)?;
        in_unit("channel_transmission_eve", self.channel_transmission_eve, false)?;
        in_unit("bob_detector_eff", self.bob_detector_eff, false)?;
        if self.alice_detector_eff != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "alice_detector_eff must be 1 (got {})",
                self.alice_detector_eff
            )));
        }
        Ok(())
    }

    fn correlation(&self, alpha: f64, beta: f64) -> f64 {
        self.visibility * (2.0 * (alpha - beta)).cos()
    }
}

/// One trial slot. Outcomes are `±1`, or `None` when nothing registered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub alice_setting: usize,
    pub bob_setting: usize,
    pub alice_outcome: Option<i8>,
    pub bob_outcome: Option<i8>,
    pub eve_setting: Option<usize>,
    pub eve_outcome: Option<i8>,
    pub coincident: bool,
}

/// Coincidence statistics of one (Alice setting, Bob setting) cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellStats {
    pub alice_setting: usize,
    pub bob_setting: usize,
    pub alice_angle: f64,
    pub bob_angle: f64,
    pub trials: u64,
    pub coincidences: u64,
    /// Sum of `a * b` over coincidences.
    pub product_sum: i64,
    /// `E = product_sum / coincidences`, or `None` for an empty cell.
    pub correlator: Option<f64>,
    /// `sqrt((1 - E^2) / n)`.
    pub std_error: Option<f64>,
}

/// A value with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `|value - target| <= k * std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }

    fn proportion(hits: u64, n: u64) -> Self {
        if n == 0 {
            return Self { value: f64::NAN, std_error: f64::NAN };
        }
        let p = hits as f64 / n as f64;
        Self { value: p, std_error: (p * (1.0 - p) / n as f64).sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QkdRunStats {
    pub n_pairs: u64,
    pub seed: u64,
    pub attack: Attack,
    /// Row-major over (Alice setting, Bob setting).
    pub cells: Vec<CellStats>,
    /// CHSH value for the default cell assignment, when there are at least
    /// two settings on each side and the four cells are populated.
    pub chsh: Option<Estimate>,
    pub coincidences: u64,
    pub coincidence_rate: Estimate,
    /// Fraction of coincidences where Eve's outcome equals Bob's. Zero when
    /// there is no eavesdropper.
    pub eve_knowledge_fraction: f64,
    /// Coincidences where Bob's setting differs from Eve's.
    pub coincident_setting_mismatches: u64,
    /// Coincidences where Bob's outcome differs from Eve's.
    pub coincident_outcome_mismatches: u64,
    /// Fraction of `+1` outcomes among coincidences.
    pub alice_plus_fraction: Estimate,
    pub bob_plus_fraction: Estimate,
}

impl QkdRunStats {
    pub fn cell(&self, alice: usize, bob: usize) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.alice_setting == alice && c.bob_setting == bob)
    }
}

/// The four cells entering `S` and their signs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellAssignment {
    pub cells: [(usize, usize); 4],
    pub signs: [f64; 4],
}

impl Default for CellAssignment {
    /// `S = E_11 - E_12 + E_21 + E_22`.
    fn default() -> Self {
        Self { cells: [(0, 0), (0, 1), (1, 0), (1, 1)], signs: [1.0, -1.0, 1.0, 1.0] }
    }
}

/// CHSH combination with propagated standard error.
pub fn chsh(stats: &QkdRunStats, assignment: &CellAssignment) -> Result<Estimate> {
    let mut value = 0.0;
    let mut var = 0.0;
    for (&(i, j), &sign) in assignment.cells.iter().zip(&assignment.signs) {
        let cell = stats
            .cell(i, j)
            .ok_or_else(|| Error::InsufficientData(format!("no cell for settings ({i}, {j})")))?;
        let (Some(e), Some(se)) = (cell.correlator, cell.std_error) else {
            return Err(Error::InsufficientData(format!("cell ({i}, {j}) has no coincidences")));
        };
        value += sign * e;
        var += se * se;
    }
    Ok(Estimate { value, std_error: var.sqrt() })
}

fn outcome(plus: bool) -> i8 {
    if plus {
        1
    } else {
        -1
    }
}

/// Outcome correlated with `a` by `E`: equal to `a` with probability `(1+E)/2`.
fn correlated<R: Rng>(rng: &mut R, a: i8, e: f64) -> i8 {
    if rng.random::<f64>() < 0.5 * (1.0 + e) {
        a
    } else {
        -a
    }
}

fn run_trial(config: &QkdConfig, base: &ChaCha8Rng, trial: u64) -> TrialRecord {
    let mut rng = base.clone();
    rng.set_stream(trial);
    let na = config.alice_settings.len();
    let nb = config.bob_settings.len();
    let i = rng.random_range(0..na);
    let j = rng.random_range(0..nb);
    let alpha = config.alice_settings[i];
    let a = outcome(rng.random::<bool>());
    let alice_registered = rng.random::<f64>() < config.alice_detector_eff;
    let mut rec = TrialRecord {
        trial,
        alice_setting: i,
        bob_setting: j,
        alice_outcome: alice_registered.then_some(a),
        bob_outcome: None,
        eve_setting: None,
        eve_outcome: None,
        coincident: false,
    };
    let bob_registered = match config.attack {
        Attack::None => {
            let b = correlated(&mut rng, a, config.correlation(alpha, config.bob_settings[j]));
            let arrives = rng.random::<f64>() < config.channel_transmission_honest;
            let detected = rng.random::<f64>() < config.bob_detector_eff;
            if arrives && detected {
                rec.bob_outcome = Some(b);
            }
            arrives && detected
        }
        Attack::Demon => {
            let k = rng.random_range(0..nb);
            let e = correlated(&mut rng, a, config.correlation(alpha, config.bob_settings[k]));
            rec.eve_setting = Some(k);
            rec.eve_outcome = Some(e);
            let arrives = rng.random::<f64>() < config.channel_transmission_eve;
            let detected = rng.random::<f64>() < config.bob_detector_eff;
            // The demon aborts unless Bob's polarizer is set as Eve's was.
            let fires = j == k && arrives && detected;
            if fires {
                rec.bob_outcome = Some(e);
            }
            fires
        }
    };
    rec.coincident = alice_registered && bob_registered;
    rec
}

/// Runs the simulation, passing every trial to `sink`.
pub fn simulate_with_records(config: &QkdConfig, mut sink: impl FnMut(&TrialRecord)) -> Result<QkdRunStats> {
    config.validate()?;
    let na = config.alice_settings.len();
    let nb = config.bob_settings.len();
    let mut trials = vec![0u64; na * nb];
    let mut coinc = vec![0u64; na * nb];
    let mut prod = vec![0i64; na * nb];
    let (mut eve_match, mut set_mismatch, mut out_mismatch) = (0u64, 0u64, 0u64);
    let (mut alice_plus, mut bob_plus, mut total) = (0u64, 0u64, 0u64);
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    for t in 0..config.n_pairs {
        let rec = run_trial(config, &base, t);
        sink(&rec);
        let cell = rec.alice_setting * nb + rec.bob_setting;
        trials[cell] += 1;
        if !rec.coincident {
            continue;
        }
        let (a, b) = (rec.alice_outcome.expect("coincident"), rec.bob_outcome.expect("coincident"));
        total += 1;
        coinc[cell] += 1;
        prod[cell] += i64::from(a * b);
        alice_plus += u64::from(a > 0);
        bob_plus += u64::from(b > 0);
        if let (Some(k), Some(e)) = (rec.eve_setting, rec.eve_outcome) {
            if e == b {
                eve_match += 1;
            } else {
                out_mismatch += 1;
            }
            if k != rec.bob_setting {
                set_mismatch += 1;
            }
        }
    }
    let mut cells = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            let c = i * nb + j;
            let n = coinc[c];
            let (correlator, std_error) = if n == 0 {
                (None, None)
            } else {
                let e = prod[c] as f64 / n as f64;
                (Some(e), Some(((1.0 - e * e).max(0.0) / n as f64).sqrt()))
            };
            cells.push(CellStats {
                alice_setting: i,
                bob_setting: j,
                alice_angle: config.alice_settings[i],
                bob_angle: config.bob_settings[j],
                trials: trials[c],
                coincidences: n,
                product_sum: prod[c],
                correlator,
                std_error,
            });
        }
    }
    let mut stats = QkdRunStats {
        n_pairs: config.n_pairs,
        seed: config.seed,
        attack: config.attack,
        cells,
        chsh: None,
        coincidences: total,
        coincidence_rate: Estimate::proportion(total, config.n_pairs),
        eve_knowledge_fraction: match config.attack {
            Attack::Demon if total > 0 => eve_match as f64 / total as f64,
            _ => 0.0,
        },
        coincident_setting_mismatches: set_mismatch,
        coincident_outcome_mismatches: out_mismatch,
        alice_plus_fraction: Estimate::proportion(alice_plus, total),
        bob_plus_fraction: Estimate::proportion(bob_plus, total),
    };
    if na >= 2 && nb >= 2 {
        stats.chsh = chsh(&stats, &CellAssignment::default()).ok();
    }
    Ok(stats)
}

pub fn simulate(config: &QkdConfig) -> Result<QkdRunStats> {
    simulate_with_records(config, |_| {})
}

/// Coincidence rates per trial slot and the rate-stealth condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    /// `t_honest * eta_B`.
    pub honest_rate: f64,
    /// `t_eve * eta_B / |bob_settings|`.
    pub attack_rate: f64,
    /// `|bob_settings| * t_honest`, the least `t_eve` that hides the attack.
    pub required_t_eve: f64,
    /// Whether `required_t_eve <= 1`.
    pub stealth_feasible: bool,
    /// Whether the configured `t_eve` meets the requirement.
    pub configured_stealthy: bool,
    /// `"stealthy"` or `"attack rate-detectable"`.
    pub verdict: String,
}

pub fn rate_analysis(config: &QkdConfig) -> Result<RateReport> {
    config.validate()?;
    let nb = config.bob_settings.len() as f64;
    let eta = config.bob_detector_eff * config.alice_detector_eff;
    let required = nb * config.channel_transmission_honest;
    let feasible = required <= 1.0;
    let configured = config.channel_transmission_eve >= required;
    Ok(RateReport {
        honest_rate: config.channel_transmission_honest * eta,
        attack_rate: config.channel_transmission_eve * eta / nb,
        required_t_eve: required,
        stealth_feasible: feasible,
        configured_stealthy: feasible && configured,
        verdict: if feasible { "stealthy" } else { "attack rate-detectable" }.to_string(),
    })
}

/// Simulated coincidence rate against its analytic value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateCheck {
    pub analytic: f64,
    pub simulated: Estimate,
    pub within_4_sigma: bool,
}

/// Compares the simulated coincidence rate of `stats` with the analytic
/// rate for the attack mode it was produced under.
pub fn check_rate(report: &RateReport, stats: &QkdRunStats) -> RateCheck {
    let analytic = match stats.attack {
        Attack::None => report.honest_rate,
        Attack::Demon => report.attack_rate,
    };
    let sim = stats.coincidence_rate;
    let se = (analytic * (1.0 - analytic) / stats.n_pairs as f64).sqrt();
    RateCheck { analytic, simulated: sim, within_4_sigma: (sim.value - analytic).abs() <= 4.0 * se + 1e-15 }
}
