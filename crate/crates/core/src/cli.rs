//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 failed decode or audit.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::audit::{self, AuditMode};
use crate::bounds::{curve_csv, CurveSet};
use crate::catalog::{SchemeArgs, SchemeSpec};
use crate::error::Error;
use crate::rational;
use crate::system::{run_transcript, DemandVector, MessageLibrary, Randomness};
use crate::verify;

#[derive(Parser, Debug)]
#[command(
    name = "mupir",
    version,
    about = "Cache-aided multiuser private information retrieval"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one protocol instance and write its transcript as JSON.
    Simulate(SimulateArgs),
    /// Audit per-database demand privacy and write the report as JSON.
    Audit(AuditArgs),
    /// Evaluate a set of memory-load curves.
    Curve(CurveArgs),
    /// Run the full reproducibility suite.
    VerifyAll(VerifyArgs),
}

#[derive(Args, Debug)]
struct SchemeOpts {
    /// cia1, cia2, sj, pd, naive, dd1, dd2, strawman or share.
    #[arg(long)]
    scheme: String,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "Ku")]
    ku: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    /// Caching parameter of the product design.
    #[arg(long)]
    t: Option<usize>,
    /// Cache size of the naive scheme, e.g. `1/2`.
    #[arg(long = "M")]
    m: Option<String>,
    /// Fraction of each message handled by `--share-a`.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    share_a: Option<String>,
    #[arg(long)]
    share_b: Option<String>,
    /// Independent copies of the scheme laid side by side.
    #[arg(long, default_value_t = 1)]
    blocks: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    scheme: SchemeOpts,
    /// Demand vector, 1-based, e.g. `1,2`.
    #[arg(long)]
    theta: String,
    #[arg(long, env = "MUPIR_SEED", default_value_t = 0)]
    seed: u64,
    /// Seed of the random library; defaults to `--seed`.
    #[arg(long)]
    library_seed: Option<u64>,
    /// Use realization index `r` of the enumerable randomness instead of a seed.
    #[arg(long)]
    realization: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(flatten)]
    scheme: SchemeOpts,
    /// Database to audit, 1-based.
    #[arg(long, default_value_t = 1)]
    db: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    #[arg(long, default_value_t = audit::MIN_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = audit::SAMPLED_THRESHOLD)]
    threshold: f64,
    #[arg(long, env = "MUPIR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// fig2a, fig2b, fig3 or gap.
    #[arg(long)]
    set: String,
    /// Evenly spaced memory values; breakpoints are always added.
    #[arg(long, default_value_t = 121)]
    points: usize,
    #[arg(long = "K", default_value_t = 2)]
    k: usize,
    #[arg(long = "Ku", default_value_t = 2)]
    ku: usize,
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, env = "MUPIR_SEED", default_value_t = 0)]
    seed: u64,
    /// Comma-separated criterion numbers; all when omitted.
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
    /// Report file; the pass/fail matrix always goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DecodeFailure(_) => Failure::Verification(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn scheme_args(o: &SchemeOpts) -> Result<SchemeArgs, Error> {
    Ok(SchemeArgs {
        k: o.k,
        ku: o.ku,
        n: o.n,
        t: o.t,
        m: o.m.as_deref().map(rational::parse).transpose()?,
        lambda: o.lambda.as_deref().map(rational::parse).transpose()?,
        share_a: o.share_a.clone(),
        share_b: o.share_b.clone(),
    })
}

fn build(o: &SchemeOpts) -> Result<std::sync::Arc<dyn crate::system::Scheme>, Error> {
    SchemeSpec::parse(&o.scheme, &scheme_args(o)?)?.build_blocks(o.blocks)
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Outcome {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Config(e.to_string())),
    }
}

fn simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Outcome {
    let scheme = build(&a.scheme)?;
    let p = scheme.params();
    let demand = DemandVector::parse(&a.theta, p.k)?;
    let lib = MessageLibrary::random(p.k, p.l, a.library_seed.unwrap_or(a.seed));
    let randomness = match a.realization {
        Some(r) => {
            let size = scheme
                .randomness()
                .size()
                .ok_or_else(|| Error::NotEnumerable(scheme.name().into()))?;
            if r >= size {
                return Err(Failure::Config(format!("realization {r} outside [0, {size})")));
            }
            Randomness::Realization(r)
        }
        None => Randomness::Seed(a.seed),
    };
    let t = run_transcript(scheme.as_ref(), &lib, &demand, randomness)?;
    emit(&a.out, &(t.to_json() + "\n"), stdout)?;
    if !t.is_correct(&lib) {
        return Err(Failure::Verification("a user decoded the wrong message".into()));
    }
    Ok(())
}

fn run_audit(a: &AuditArgs, stdout: &mut dyn Write) -> Outcome {
    let scheme = build(&a.scheme)?;
    let mode = match a.mode {
        Mode::Exhaustive => AuditMode::Exhaustive,
        Mode::Sampled => AuditMode::Sampled {
            samples: a.samples,
            threshold: a.threshold,
        },
    };
    let r = audit::audit_privacy(
        scheme.as_ref(),
        a.db,
        &audit::all_demands(scheme.as_ref()),
        mode,
        a.seed,
    )?;
    emit(&a.out, &(r.to_json() + "\n"), stdout)?;
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "database {} can distinguish demands",
            a.db
        )))
    }
}

fn curve(a: &CurveArgs, stdout: &mut dyn Write) -> Outcome {
    let set = CurveSet::parse(&a.set, a.k, a.ku, a.n)?;
    let rows = set.evaluate(a.points)?;
    let text = match a.format {
        Format::Csv => curve_csv(&rows),
        Format::Json => {
            let mut labels: Vec<&str> = rows.iter().map(|p| p.label).collect();
            labels.dedup();
            let curves: Vec<serde_json::Value> = labels
                .iter()
                .map(|&l| {
                    let points: Vec<[String; 2]> = rows
                        .iter()
                        .filter(|p| p.label == l)
                        .map(|p| [rational::format(&p.m), rational::format(&p.r)])
                        .collect();
                    serde_json::json!({ "label": l, "points": points })
                })
                .collect();
            serde_json::to_string(&serde_json::json!({ "set": a.set, "curves": curves })).expect("plain JSON") + "\n"
        }
    };
    emit(&a.out, &text, stdout)
}

fn verify_all(a: &VerifyArgs, stdout: &mut dyn Write) -> Outcome {
    if let Some(bad) = a.only.iter().find(|&&i| i == 0 || i > verify::CRITERIA) {
        return Err(Failure::Config(format!(
            "no criterion {bad} (1..={})",
            verify::CRITERIA
        )));
    }
    let report = verify::verify_all(a.seed, &a.only);
    stdout
        .write_all(report.matrix().as_bytes())
        .map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(path) = &a.out {
        std::fs::write(path, report.to_json())
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification("some criteria failed".into()))
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Simulate(a) => simulate(a, stdout),
        Command::Audit(a) => run_audit(a, stdout),
        Command::Curve(a) => curve(a, stdout),
        Command::VerifyAll(a) => verify_all(a, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Config(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(stderr, "failed: {msg}");
            2
        }
    }
}

pub fn main() -> i32 {
    run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
