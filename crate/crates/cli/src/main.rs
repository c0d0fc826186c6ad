//! `eitsqz`: tables of steady-state spin squeezing for sweeps of the pump
//! rates, the cooperativity and the intracavity field.

mod commands;
mod config;
mod sweep;
mod table;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Command, ConfigFile, Format, RunConfig};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "eitsqz", version, about = "Steady-state spin squeezing tables")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Minimal variance and squeezing at one operating point.
    Variance(Opts),
    /// ΔS_min, ⟨δS_y²⟩ and |⟨S⟩|/2 over a pump-rate sweep.
    ScanGamma(Opts),
    /// Optimal pump rates for one or more cooperativities.
    Optimize(Opts),
    /// Optimal squeezing against cooperativity with a power-law fit.
    Scaling(Opts),
    /// S_y noise spectrum split into field and atomic parts.
    Spectrum(Opts),
    /// ΔS_min against the intracavity field amplitude.
    FieldScan(Opts),
    /// Self-consistency suites; exits 1 if any fails.
    Validate(Opts),
    /// Rerun from a config file or an earlier output; the command comes from the file.
    Run(Opts),
}

/// Every flag is optional; unset flags fall back to the config file, then defaults.
/// Values are numbers, comma lists, or ranges `lo:hi:logN` / `lo:hi:linN`.
#[derive(Args, Debug, Default)]
struct Opts {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_p_prime: Option<String>,
    /// Atom number.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    /// Two-photon detuning δ̃ in γ₀ units.
    #[arg(long, allow_hyphen_values = true)]
    delta_tilde: Option<String>,
    /// Cavity detuning Δc in γ₀ units.
    #[arg(long, allow_hyphen_values = true)]
    delta_c: Option<String>,
    /// Frequencies in units of κ.
    #[arg(long, allow_hyphen_values = true)]
    omega_bar: Option<String>,
    /// Intracavity field |g̃⟨A₂⟩| in γ₀ units.
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c_values: Option<String>,
    /// γ₀ in Hz; adds columns in absolute units.
    #[arg(long, allow_hyphen_values = true)]
    gamma0_hz: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Random operating points per validation sweep.
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// key = value file, or an earlier CSV/JSON output.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// csv or json; inferred from a `.json` output name.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads; falls back to SQZ_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl Opts {
    fn flags(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("c", &self.c),
            ("rho", &self.rho),
            ("gamma_p", &self.gamma_p),
            ("gamma_p_prime", &self.gamma_p_prime),
            ("n", &self.n),
            ("delta_tilde", &self.delta_tilde),
            ("delta_c", &self.delta_c),
            ("omega_bar", &self.omega_bar),
            ("amplitude", &self.amplitude),
            ("c_values", &self.c_values),
            ("gamma0_hz", &self.gamma0_hz),
            ("seed", &self.seed),
            ("points", &self.points),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect()
    }

    fn format(&self) -> Result<Format> {
        match (&self.format, &self.output) {
            (Some(f), _) => f.parse(),
            (None, Some(p)) if p.extension().is_some_and(|e| e == "json") => Ok(Format::Json),
            _ => Ok(Format::Csv),
        }
    }
}

fn threads(flag: Option<usize>, file: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = flag.or(file) {
        return Ok(Some(n));
    }
    match std::env::var("SQZ_THREADS") {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse().map(Some).map_err(|_| anyhow!("invalid SQZ_THREADS value `{v}`"))
        }
        _ => Ok(None),
    }
}

fn execute(sub: Sub) -> Result<i32> {
    let (named, opts) = match sub {
        Sub::Variance(o) => (Some(Command::Variance), o),
        Sub::ScanGamma(o) => (Some(Command::ScanGamma), o),
        Sub::Optimize(o) => (Some(Command::Optimize), o),
        Sub::Scaling(o) => (Some(Command::Scaling), o),
        Sub::Spectrum(o) => (Some(Command::Spectrum), o),
        Sub::FieldScan(o) => (Some(Command::FieldScan), o),
        Sub::Validate(o) => (Some(Command::Validate), o),
        Sub::Run(o) => (None, o),
    };
    let file = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ConfigFile::parse(&text).with_context(|| format!("config {}", path.display()))?
        }
        None => ConfigFile::default(),
    };
    let command = match (named, file.command) {
        (Some(c), _) => c,
        (None, Some(c)) => c,
        (None, None) => return Err(anyhow!("`run` needs --config with a `command` entry")),
    };
    let cfg = RunConfig::resolve(command, &file.values, &opts.flags())?;
    let format = opts.format()?;

    if let Some(n) = threads(opts.threads, file.threads)? {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    let outcome = commands::run(&cfg).with_context(|| format!("{command} failed"))?;
    write_output(&outcome.table, &cfg, format, opts.output.as_deref())?;
    Ok(outcome.exit_code)
}

fn write_output(table: &table::Table, cfg: &RunConfig, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            table.write(cfg, VERSION, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(cfg, VERSION, format, &mut w)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
