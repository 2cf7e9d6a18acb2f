//! `physsec` command-line driver.
//!
//! Every run that writes to `--output PATH` also writes `PATH.manifest.json`
//! recording the subcommand, its parameters, the seed and the output paths.
//! `physsec replay MANIFEST` re-runs it.
//!
//! Exit status: 0 on success, 1 on runtime errors, 2 on usage errors, 3 when
//! an invariant check on the results failed (the output is still written).

mod commands;
mod parse;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use commands::{BcAnalyzeArgs, FeasibilityArgs, Format, OtAnalyzeArgs, QkdArgs};

const ARTIFACT: &str = "physsec";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Sentinel(String),
    Other(String),
}

impl CliError {
    pub fn other(e: impl fmt::Display) -> Self {
        CliError::Other(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Sentinel(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Sentinel(m) => write!(f, "invariant violated: {m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "physsec", version, about = "Analysis of quantum two-party protocols and the QKD coincidence attack")]
struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted (no manifest is written then).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format. Tables default to csv, reports to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Honest and cheating probabilities of the partial OT over a θ grid.
    OtAnalyze(OtAnalyzeArgs),
    /// Bit-commitment f, d and cheat probabilities over (M, N).
    BcAnalyze(BcAnalyzeArgs),
    /// Numerical feasibility search over the OT constraints.
    OtFeasibility(FeasibilityArgs),
    /// Monte-Carlo run of entanglement QKD, honest or under the demon attack.
    QkdDemon(QkdArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Write the outputs (same file names) into this directory instead.
    #[arg(long)]
    into: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "parameters", rename_all = "kebab-case")]
enum Run {
    OtAnalyze(OtAnalyzeArgs),
    BcAnalyze(BcAnalyzeArgs),
    OtFeasibility(FeasibilityArgs),
    QkdDemon(QkdArgs),
}

impl Run {
    fn default_format(&self) -> Format {
        match self {
            Run::OtAnalyze(_) | Run::BcAnalyze(_) => Format::Csv,
            Run::OtFeasibility(_) | Run::QkdDemon(_) => Format::Json,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    artifact: String,
    version: String,
    #[serde(flatten)]
    run: Run,
    seed: u64,
    format: Format,
    outputs: Vec<PathBuf>,
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut s: OsString = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))
}

fn execute(run: &Run, seed: u64, format: Format, output: Option<&Path>) -> Result<(), CliError> {
    let outcome = match run {
        Run::OtAnalyze(a) => commands::ot_analyze(a, format)?,
        Run::BcAnalyze(a) => commands::bc_analyze(a, format)?,
        Run::OtFeasibility(a) => commands::ot_feasibility(a, seed, format)?,
        Run::QkdDemon(a) => commands::qkd_demon(a, seed, format)?,
    };
    match output {
        Some(path) => write_file(path, &outcome.primary)?,
        None => std::io::stdout().write_all(&outcome.primary).map_err(CliError::other)?,
    }
    for (path, bytes) in &outcome.extra {
        write_file(path, bytes)?;
    }
    if let Some(path) = output {
        let mut outputs = vec![path.to_path_buf()];
        outputs.extend(outcome.extra.iter().map(|(p, _)| p.clone()));
        let manifest = RunManifest {
            artifact: ARTIFACT.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            run: run.clone(),
            seed,
            format,
            outputs,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(CliError::other)?;
        bytes.push(b'\n');
        write_file(&manifest_path(path), &bytes)?;
    }
    match outcome.sentinel {
        Some(msg) => Err(CliError::Sentinel(msg)),
        None => Ok(()),
    }
}

fn relocate(path: &Path, dir: &Path) -> Result<PathBuf, CliError> {
    let name = path.file_name().ok_or_else(|| CliError::Usage(format!("{} has no file name", path.display())))?;
    Ok(dir.join(name))
}

fn replay(args: &ReplayArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.manifest.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed manifest: {e}")))?;
    if manifest.artifact != ARTIFACT {
        return Err(CliError::Usage(format!("manifest belongs to `{}`, not {ARTIFACT}", manifest.artifact)));
    }
    if manifest.version != env!("CARGO_PKG_VERSION") {
        eprintln!("warning: manifest written by version {}, replaying with {}", manifest.version, env!("CARGO_PKG_VERSION"));
    }
    let primary = manifest.outputs.first().ok_or_else(|| CliError::Usage("manifest lists no outputs".into()))?;
    let mut run = manifest.run.clone();
    let output = match &args.into {
        None => primary.clone(),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Other(format!("cannot create {}: {e}", dir.display())))?;
            if let Run::QkdDemon(q) = &mut run {
                if let Some(t) = &q.trials_csv {
                    q.trials_csv = Some(relocate(t, dir)?);
                }
            }
            relocate(primary, dir)?
        }
    };
    execute(&run, manifest.seed, manifest.format, Some(&output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Replay(args) => replay(&args),
        cmd => {
            let run = match cmd {
                Command::OtAnalyze(a) => Run::OtAnalyze(a),
                Command::BcAnalyze(a) => Run::BcAnalyze(a),
                Command::OtFeasibility(a) => Run::OtFeasibility(a),
                Command::QkdDemon(a) => Run::QkdDemon(a),
                Command::Replay(_) => unreachable!(),
            };
            let format = cli.format.unwrap_or_else(|| run.default_format());
            execute(&run, cli.seed, format, cli.output.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
