//! `orthoavg` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 numerical failure or failed check.

mod commands;
mod config;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orthoavg::asym::EConstVariant;

use config::{parse_label, parse_n_list, parse_output, ConfigFile, OutputFormat, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<orthoavg::Error> for CliError {
    fn from(e: orthoavg::Error) -> Self {
        use orthoavg::Error as E;
        match e {
            E::InvalidParameter(_) | E::Parse(_) | E::OnJump(_) | E::InsufficientMoments { .. } => {
                CliError::Usage(e.to_string())
            }
            E::Quadrature { .. }
            | E::PrecisionExhausted { .. }
            | E::Positivity(_)
            | E::ComplexResidue(_)
            | E::IllConditioned(_)
            | E::Sampling(_) => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "orthoavg", version, about = "Exact and asymptotic averages over the orthogonal ensembles")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// JSON run configuration; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Symbol description (JSON).
    #[arg(long, global = true)]
    symbol: Option<PathBuf>,
    /// Comma-separated list of n (or N for --beta / moments).
    #[arg(long, global = true)]
    n: Option<String>,
    /// Ensemble label: 0+, 2-, 1+, 1- or all.
    #[arg(long, global = true)]
    label: Option<String>,
    /// Working precision in bits (at least 53).
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Quadrature tolerance for moments.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Random seed for Monte Carlo.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    output: Option<String>,
    /// Reading of the 2^{-a0 a_m} factor: as_printed or alpha_end.
    #[arg(long, global = true)]
    e_const_variant: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute Fourier moments up to 2·max(n) and write the cache file.
    Moments {
        /// Destination file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact averages by both routes against the large-n predictions.
    Compare,
    /// Residuals of the exact determinant and polynomial identities.
    Identities,
    /// Gap generating functions E_n(t0; s), or circular ensembles with --beta.
    Gap {
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        /// 1, 2 or 4: evaluate the circular ensemble generating function at N = each --n.
        #[arg(long)]
        beta: Option<u32>,
    },
    /// Distribution of the number of free eigenangles in (0, t0).
    Occupancy {
        #[arg(long)]
        t0: Option<f64>,
    },
    /// Monte Carlo sample summaries.
    Mc {
        /// Arc end for the gap indicator (default π/2).
        #[arg(long)]
        t0: Option<f64>,
        /// Samples per (label, n) (default 100).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Special constants at the working precision.
    Constants,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Moments { .. } => "moments",
            Command::Compare => "compare",
            Command::Identities => "identities",
            Command::Gap { .. } => "gap",
            Command::Occupancy { .. } => "occupancy",
            Command::Mc { .. } => "mc",
            Command::Constants => "constants",
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let command = cli.command.name().to_string();
    if let Some(c) = &file.command {
        if c != &command {
            return Err(CliError::Usage(format!("config is for command {c:?}, invoked {command:?}")));
        }
    }
    let a = &cli.common;
    let n_list = match &a.n {
        Some(s) => parse_n_list(s)?,
        None => file.n_list.clone().unwrap_or_default(),
    };
    let label = match a.label.as_deref().or(file.label.as_deref()) {
        Some(s) => parse_label(s)?,
        None => None,
    };
    let precision_bits = a.precision_bits.or(file.precision_bits).unwrap_or(orthoavg::mp::DEFAULT_PRECISION);
    if precision_bits < 53 {
        return Err(CliError::Usage("--precision-bits must be at least 53".into()));
    }
    let tol = a.tol.or(file.tol);
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
    }
    let output = match a.output.as_deref().or(file.output.as_deref()) {
        Some(s) => parse_output(s)?,
        None => OutputFormat::Csv,
    };
    let e_const_variant = match a.e_const_variant.as_deref().or(file.e_const_variant.as_deref()) {
        Some(s) => s.parse::<EConstVariant>().map_err(|e| CliError::Usage(e.to_string()))?,
        None => EConstVariant::default(),
    };
    let (mut t0, mut s, mut beta, mut samples, mut out) = (file.t0, file.s, file.beta, file.samples, file.out.clone());
    match &cli.command {
        Command::Moments { out: o } => out = o.clone().or(out),
        Command::Gap { t0: a, s: b, beta: c } => {
            t0 = a.or(t0);
            s = b.or(s);
            beta = c.or(beta);
        }
        Command::Occupancy { t0: a } => t0 = a.or(t0),
        Command::Mc { t0: a, samples: b } => {
            t0 = a.or(t0);
            samples = b.or(samples);
        }
        Command::Compare | Command::Identities | Command::Constants => {}
    }
    Ok(RunConfig {
        command,
        symbol_path: a.symbol.clone().or(file.symbol_path),
        n_list,
        label,
        precision_bits,
        tol,
        seed: a.seed.or(file.seed).unwrap_or(42),
        output,
        e_const_variant,
        t0,
        s,
        beta,
        samples: samples.unwrap_or(100),
        out,
    })
}

fn write_out(cfg: &RunConfig, body: &[u8]) -> Result<(), CliError> {
    match &cfg.out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(body).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let outcome = match cfg.command.as_str() {
        "moments" => {
            let (ms, _) = commands::moments(&cfg)?;
            let mut buf = Vec::new();
            match cfg.output {
                OutputFormat::Csv => ms.write_cache(&mut buf),
                OutputFormat::Json => commands::moments_table(&ms).write(cfg.output, &mut buf),
            }
            .map_err(|e| CliError::Usage(e.to_string()))?;
            return write_out(&cfg, &buf);
        }
        "compare" => commands::compare(&cfg)?,
        "identities" => commands::identities(&cfg)?,
        "gap" => commands::gap(&cfg)?,
        "occupancy" => commands::occupancy(&cfg)?,
        "mc" => commands::mc(&cfg)?,
        "constants" => commands::constants_table(&cfg)?,
        other => return Err(CliError::Usage(format!("unknown command {other}"))),
    };
    let mut buf = Vec::new();
    outcome.table.write(cfg.output, &mut buf).map_err(|e| CliError::Usage(e.to_string()))?;
    write_out(&cfg, &buf)?;
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(outcome.failures.join("\n")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("numerical check failed:\n{m}");
            ExitCode::from(2)
        }
    }
}
