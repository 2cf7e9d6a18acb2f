//! Subcommand implementations. Each produces the bytes of its output files
//! and leaves writing them to the caller.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use physsec::bc::{self, DValue};
use physsec::consistency::{self, ConstraintSet, Dims, Family, SearchConfig};
use physsec::ot::{self, OtParams};
use physsec::qkd::{self, Attack, QkdConfig};

use crate::parse;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// What a subcommand produced.
pub struct Outcome {
    pub primary: Vec<u8>,
    /// Secondary files, keyed by path.
    pub extra: Vec<(PathBuf, Vec<u8>)>,
    /// Set when an invariant check failed; the output is still written.
    pub sentinel: Option<String>,
}

impl Outcome {
    fn ok(primary: Vec<u8>) -> Self {
        Self { primary, extra: Vec::new(), sentinel: None }
    }
}

/// 17 significant digits.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(CliError::other)?;
    for row in rows {
        w.write_record(&row).map_err(CliError::other)?;
    }
    w.into_inner().map_err(|e| CliError::Other(e.to_string()))
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(CliError::other)?;
    out.push(b'\n');
    Ok(out)
}

// ---------------------------------------------------------------- ot-analyze

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct OtAnalyzeArgs {
    /// Comma-separated angles (radians, `pi/6`, or `30deg`).
    #[arg(long, value_delimiter = ',', value_parser = parse::angle, allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    /// Evenly spaced angles `start:stop:count`, appended after --theta.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

#[derive(Serialize)]
struct OtRow {
    theta: f64,
    p: f64,
    q: f64,
    honest_success: f64,
    honest_hash: f64,
    degenerate: bool,
}

pub fn ot_analyze(args: &OtAnalyzeArgs, format: Format) -> Result<Outcome, CliError> {
    let grid = match &args.grid {
        Some(g) => parse::grid(g).map_err(CliError::Usage)?,
        None => Vec::new(),
    };
    let thetas: Vec<f64> = args.theta.iter().copied().chain(grid).collect();
    if thetas.is_empty() {
        return Err(CliError::Usage("empty θ grid; pass --theta or --grid".into()));
    }
    let mut rows = Vec::with_capacity(thetas.len());
    for theta in thetas {
        let params = OtParams::new(theta)
            .map_err(|_| CliError::Usage(format!("θ = {theta} is outside the valid interval (0, π/4]")))?;
        let ps = ot::partial_security(&params).map_err(CliError::other)?;
        let honest = ot::honest_distribution(&params, 0).map_err(CliError::other)?;
        rows.push(OtRow {
            theta,
            p: ps.p,
            q: ps.q,
            honest_success: honest.bit0,
            honest_hash: honest.hash,
            degenerate: params.is_degenerate(),
        });
    }
    let bytes = match format {
        Format::Json => json_bytes(&rows)?,
        Format::Csv => csv_bytes(
            &["theta", "p", "q", "honest_success", "honest_hash", "degenerate"],
            rows.iter().map(|r| {
                vec![fmt(r.theta), fmt(r.p), fmt(r.q), fmt(r.honest_success), fmt(r.honest_hash), r.degenerate.to_string()]
            }),
        )?,
    };
    Ok(Outcome::ok(bytes))
}

// ---------------------------------------------------------------- bc-analyze

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct BcAnalyzeArgs {
    /// Angle of the underlying OT states.
    #[arg(long, value_parser = parse::angle, allow_hyphen_values = true)]
    pub theta: f64,
    /// Bits per string, e.g. `1..4`.
    #[arg(long = "m", value_parser = parse::range)]
    pub m_range: std::ops::RangeInclusive<usize>,
    /// Number of strings, e.g. `1..3`.
    #[arg(long = "n", value_parser = parse::range)]
    pub n_range: std::ops::RangeInclusive<usize>,
    /// Report Fuchs–van de Graaf intervals for rows beyond the exact cap.
    #[arg(long)]
    pub interval: bool,
    /// Largest M·N computed exactly.
    #[arg(long, default_value_t = bc::DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
}

pub fn bc_analyze(args: &BcAnalyzeArgs, format: Format) -> Result<Outcome, CliError> {
    if args.exact_cap > bc::DEFAULT_EXACT_CAP {
        return Err(CliError::Usage(format!(
            "--exact-cap {} exceeds the dimension cap (M·N ≤ {})",
            args.exact_cap,
            bc::DEFAULT_EXACT_CAP
        )));
    }
    OtParams::new(args.theta)
        .map_err(|_| CliError::Usage(format!("θ = {} is outside the valid interval (0, π/4]", args.theta)))?;
    let worst = args.m_range.end() * args.n_range.end();
    if worst > args.exact_cap && !args.interval {
        return Err(CliError::Usage(format!(
            "M·N = {worst} exceeds the exact-computation cap {}; pass --interval to report \
             Fuchs–van de Graaf bounds for those rows",
            args.exact_cap
        )));
    }
    let rows = bc::sweep(args.theta, args.m_range.clone(), args.n_range.clone(), args.exact_cap, args.interval)
        .map_err(CliError::other)?;
    let bad: Vec<String> =
        rows.iter().filter(|r| !r.satisfies_bound()).map(|r| format!("(M={}, N={})", r.m, r.n)).collect();
    let bytes = match format {
        Format::Json => json_bytes(&rows)?,
        Format::Csv => csv_bytes(
            &[
                "theta",
                "M",
                "N",
                "f",
                "d",
                "f_plus_d",
                "alice_quantum",
                "bob_quantum",
                "alice_classical",
                "bob_classical_raw",
                "bob_classical_clipped",
                "exact_or_interval",
            ],
            rows.iter().map(|r| {
                let kind = match r.d {
                    DValue::Exact { .. } => "exact",
                    DValue::Interval { .. } => "interval",
                };
                vec![
                    fmt(r.theta),
                    r.m.to_string(),
                    r.n.to_string(),
                    fmt(r.f),
                    fmt(r.d.lower()),
                    fmt(r.f_plus_d),
                    fmt(r.alice_quantum),
                    fmt(r.bob_quantum),
                    fmt(r.alice_classical),
                    fmt(r.bob_classical_raw),
                    fmt(r.bob_classical_clipped),
                    kind.to_string(),
                ]
            }),
        )?,
    };
    let sentinel = (!bad.is_empty()).then(|| format!("f + d < 1 - 1e-9 at {}", bad.join(", ")));
    Ok(Outcome { primary: bytes, extra: Vec::new(), sentinel })
}

// ------------------------------------------------------------ ot-feasibility

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct FeasibilityArgs {
    /// Subsystem dimensions `d_A,d_B,d_U`.
    #[arg(long, value_parser = parse::dims, default_value = "2,2,2")]
    pub dims: [usize; 3],
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    /// Coordinate sweeps per restart.
    #[arg(long, default_value_t = 300)]
    pub max_iters: usize,
    /// Constraint families to drop: half_bit, half_hash, wrong_bit, bob_info, alice.
    #[arg(long, value_delimiter = ',')]
    pub drop: Vec<String>,
    /// Start every restart from a random point.
    #[arg(long)]
    pub no_witness_start: bool,
}

pub fn ot_feasibility(args: &FeasibilityArgs, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let [a, b, u] = args.dims;
    let dims = Dims::new(a, b, u).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.restarts == 0 {
        return Err(CliError::Usage("--restarts must be at least 1".into()));
    }
    let dropped = args
        .drop
        .iter()
        .map(|s| s.parse::<Family>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let constraints = ConstraintSet::without(&dropped).map_err(|e| CliError::Usage(e.to_string()))?;
    let config = SearchConfig::new(dims, args.restarts, args.max_iters, seed)
        .with_constraints(constraints)
        .with_witness_start(!args.no_witness_start);
    let report = consistency::search(&config).map_err(CliError::other)?;
    let bytes = match format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => {
            let c = &report.components;
            let relax: Vec<&str> = report.relaxations.iter().map(|f| f.name()).collect();
            csv_bytes(
                &[
                    "d_a",
                    "d_b",
                    "d_u",
                    "seed",
                    "restarts",
                    "max_iters",
                    "relaxations",
                    "best_total_residual",
                    "r_half_b_0",
                    "r_half_b_1",
                    "r_half_hash_0",
                    "r_half_hash_1",
                    "r_wrongbit_0",
                    "r_wrongbit_1",
                    "r_bobinfo",
                    "r_alice_0",
                    "r_alice_1",
                ],
                [vec![
                    a.to_string(),
                    b.to_string(),
                    u.to_string(),
                    seed.to_string(),
                    report.restarts.to_string(),
                    report.max_iters.to_string(),
                    relax.join(";"),
                    fmt(report.best_total_residual),
                    fmt(c.r_half_b[0]),
                    fmt(c.r_half_b[1]),
                    fmt(c.r_half_hash[0]),
                    fmt(c.r_half_hash[1]),
                    fmt(c.r_wrongbit[0]),
                    fmt(c.r_wrongbit[1]),
                    fmt(c.r_bobinfo),
                    fmt(c.r_alice[0]),
                    fmt(c.r_alice[1]),
                ]],
            )?
        }
    };
    let sentinel = (report.best_total_residual < 0.0).then(|| "negative residual".to_string());
    Ok(Outcome { primary: bytes, extra: Vec::new(), sentinel })
}

// ----------------------------------------------------------------- qkd-demon

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AttackArg {
    None,
    Demon,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct QkdArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub pairs: u64,
    /// Alice's polarizer angles.
    #[arg(long, value_delimiter = ',', value_parser = parse::angle, default_value = "0,pi/4", allow_hyphen_values = true)]
    pub alice_angles: Vec<f64>,
    /// Bob's polarizer angles.
    #[arg(long, value_delimiter = ',', value_parser = parse::angle, default_value = "pi/8,3pi/8", allow_hyphen_values = true)]
    pub bob_angles: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub visibility: f64,
    /// Transmission of the honest channel.
    #[arg(long, default_value_t = 1.0)]
    pub t_honest: f64,
    /// Transmission of Eve's replacement channel.
    #[arg(long, default_value_t = 1.0)]
    pub t_eve: f64,
    /// Bob's detector efficiency.
    #[arg(long, default_value_t = 1.0)]
    pub eta_bob: f64,
    #[arg(long, value_enum, default_value_t = AttackArg::None)]
    pub attack: AttackArg,
    /// Also write every trial to this CSV file.
    #[arg(long)]
    pub trials_csv: Option<PathBuf>,
}

impl QkdArgs {
    pub fn config(&self, seed: u64) -> QkdConfig {
        QkdConfig {
            n_pairs: self.pairs,
            alice_settings: self.alice_angles.clone(),
            bob_settings: self.bob_angles.clone(),
            visibility: self.visibility,
            channel_transmission_honest: self.t_honest,
            channel_transmission_eve: self.t_eve,
            alice_detector_eff: 1.0,
            bob_detector_eff: self.eta_bob,
            attack: match self.attack {
                AttackArg::None => Attack::None,
                AttackArg::Demon => Attack::Demon,
            },
            seed,
        }
    }
}

#[derive(Serialize)]
struct QkdSummary<'a> {
    config: &'a QkdConfig,
    stats: &'a qkd::QkdRunStats,
    rate_analysis: &'a qkd::RateReport,
    rate_check: &'a qkd::RateCheck,
}

fn opt_outcome(x: Option<i8>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

pub fn qkd_demon(args: &QkdArgs, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let config = args.config(seed);
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = qkd::rate_analysis(&config).map_err(CliError::other)?;
    let mut trials = args.trials_csv.as_ref().map(|_| {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["trial", "a_set", "b_set", "a_out", "b_out", "e_set", "e_out", "coincident"])
            .expect("in-memory write");
        w
    });
    let stats = qkd::simulate_with_records(&config, |r| {
        if let Some(w) = trials.as_mut() {
            w.write_record([
                r.trial.to_string(),
                r.alice_setting.to_string(),
                r.bob_setting.to_string(),
                opt_outcome(r.alice_outcome),
                opt_outcome(r.bob_outcome),
                r.eve_setting.map_or_else(String::new, |k| k.to_string()),
                opt_outcome(r.eve_outcome),
                u8::from(r.coincident).to_string(),
            ])
            .expect("in-memory write");
        }
    })
    .map_err(CliError::other)?;
    let check = qkd::check_rate(&report, &stats);
    let bytes = match format {
        Format::Json => json_bytes(&QkdSummary { config: &config, stats: &stats, rate_analysis: &report, rate_check: &check })?,
        Format::Csv => csv_bytes(
            &["a_set", "b_set", "alpha", "beta", "trials", "coincidences", "correlator", "std_error"],
            stats.cells.iter().map(|c| {
                vec![
                    c.alice_setting.to_string(),
                    c.bob_setting.to_string(),
                    fmt(c.alice_angle),
                    fmt(c.bob_angle),
                    c.trials.to_string(),
                    c.coincidences.to_string(),
                    c.correlator.map_or_else(String::new, fmt),
                    c.std_error.map_or_else(String::new, fmt),
                ]
            }),
        )?,
    };
    let mut extra = Vec::new();
    if let (Some(path), Some(w)) = (&args.trials_csv, trials) {
        extra.push((path.clone(), w.into_inner().map_err(|e| CliError::Other(e.to_string()))?));
    }
    let sentinel = match config.attack {
        Attack::Demon if stats.coincident_setting_mismatches + stats.coincident_outcome_mismatches > 0 => Some(format!(
            "{} coincidences with Bob's setting or outcome differing from Eve's",
            stats.coincident_setting_mismatches + stats.coincident_outcome_mismatches
        )),
        _ => None,
    };
    Ok(Outcome { primary: bytes, extra, sentinel })
}
