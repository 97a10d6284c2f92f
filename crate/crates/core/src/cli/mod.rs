//! Command-line surface.
//!
//! Exit codes: 0 success, 1 invariant violation, 2 bad input, 3 resource cap
//! (arithmetic overflow, search budget, dimension cap).

mod certificate;
mod config;
mod setfile;

use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use certificate::{check_certificate, tool_commit, CertCheck, CertStep, Certificate};
pub use config::Config;
pub use setfile::{parse_setfile, write_setfile};

use crate::constructions::{build_coset_union, density_family, DyadicDensity};
use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};
use crate::explorer::{search_methods, AnnealParams, SearchConfig, SearchRecord, DEFAULT_BUDGET};
use crate::fourier::{a_norm, fwht};
use crate::group::{GroupDim, DEFAULT_DIM_CAP};
use crate::iteration::{hypothesis_check, run_iteration, DEFAULT_STEP_CAP};
use crate::sets::PointSet;
use crate::spectrum::level_selectors;
use crate::verify::{property_suites, run_suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "f2norm",
    version,
    about = "Exact Fourier-algebra norms on F_2^n"
)]
struct Cli {
    /// TOML file with defaults (max_n, exhaustive_budget, step_cap,
    /// anneal_t0, anneal_ratio, anneal_steps, jobs).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the exact A(G) norm of a set.
    Norm { setfile: PathBuf },
    /// Build a disjoint union of cosets with a dyadic density.
    Construct {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        n: u32,
        /// Explicit exponents d1,d2,... instead of a family.
        #[arg(long, value_delimiter = ',')]
        exponents: Option<Vec<u32>>,
        /// Set file destination (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Witness JSON destination (defaults to <out>.witness.json).
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run the iteration and emit a lower-bound certificate.
    Lowerbound {
        setfile: PathBuf,
        #[arg(long)]
        max_order: u64,
        #[arg(long, default_value = "smallest-s")]
        strategy: String,
        #[arg(long)]
        step_cap: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate {α2^d}(1 − {α2^d}) for d = 0..=D.
    Profile {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        max_dim: u32,
        #[arg(long)]
        json: bool,
    },
    /// Run randomized property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Search for a minimum-norm set of a given size.
    Explore {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value = "exhaustive")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV ledger to append the record to.
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Replay a certificate against its set file.
    CheckCert { setfile: PathBuf, cert: PathBuf },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvariantViolation(_) | Error::NoQualifyingLevel => EXIT_VIOLATION,
        Error::Overflow(_) | Error::BudgetExceeded { .. } => EXIT_RESOURCE,
        Error::InvalidDim { n, cap } if n > cap => EXIT_RESOURCE,
        _ => EXIT_BAD_INPUT,
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::BadInput(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::BadInput(format!("stdout: {e}")))
}

fn load_set(path: &Path, cfg: &Config) -> Result<PointSet> {
    parse_setfile(&read(path)?, cfg.max_n.unwrap_or(DEFAULT_DIM_CAP))
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let dim_cap = cfg.max_n.unwrap_or(DEFAULT_DIM_CAP);
    match cli.command {
        Command::Norm { setfile } => {
            let a = load_set(&setfile, &cfg)?;
            let norm = a_norm(&fwht(&a.indicator())?)?;
            emit(
                out,
                &format!(
                    "{norm} = {} ({:.17})\n",
                    norm.to_fraction_string(),
                    norm.to_f64()
                ),
            )?;
        }
        Command::Construct {
            family,
            k,
            n,
            exponents,
            out: set_out,
            witness,
        } => {
            let n = GroupDim::with_cap(n, dim_cap)?;
            let density = match (exponents, family) {
                (Some(e), None) => DyadicDensity::new(e)?,
                (None, Some(f)) => {
                    let k = k.ok_or_else(|| Error::BadInput("--family needs --k".into()))?;
                    density_family(&f, k)?
                }
                _ => {
                    return Err(Error::BadInput(
                        "give exactly one of --family or --exponents".into(),
                    ))
                }
            };
            let (set, wit) = build_coset_union(&density, n)?;
            let text = write_setfile(&set);
            let mut wit_json =
                serde_json::to_string_pretty(&wit.to_record(n)).expect("serializable");
            wit_json.push('\n');
            let wit_path = witness.or_else(|| {
                set_out.as_ref().map(|p| {
                    let mut s = p.clone().into_os_string();
                    s.push(".witness.json");
                    PathBuf::from(s)
                })
            });
            match &set_out {
                Some(p) => write_file(p, &text)?,
                None => emit(out, &text)?,
            }
            if let Some(p) = wit_path {
                write_file(&p, &wit_json)?;
            }
        }
        Command::Lowerbound {
            setfile,
            max_order,
            strategy,
            step_cap,
            out: cert_out,
        } => {
            let a = load_set(&setfile, &cfg)?;
            let selectors = level_selectors();
            let sel = selectors.get(&strategy)?;
            let cap = step_cap.or(cfg.step_cap).unwrap_or(DEFAULT_STEP_CAP);
            let trace = run_iteration(&a, max_order, sel, cap)?;
            let json = Certificate::build(&a, &trace)?.to_json();
            match cert_out {
                Some(p) => write_file(&p, &json)?,
                None => emit(out, &json)?,
            }
        }
        Command::Profile {
            alpha,
            max_dim,
            json,
        } => {
            let alpha = DyadicScalar::parse(&alpha)?;
            if max_dim > 62 {
                return Err(Error::BadInput(format!("--max-dim {max_dim} exceeds 62")));
            }
            let report = hypothesis_check(alpha, 1u64 << max_dim)?;
            if json {
                let mut s = serde_json::to_string_pretty(&report).expect("serializable");
                s.push('\n');
                emit(out, &s)?;
            } else {
                let mut s = format!(
                    "alpha={} max_order={}\n",
                    alpha.to_fraction_string(),
                    report.max_order
                );
                for r in &report.per_dim {
                    s += &format!(
                        "d={} product={} scaled={}\n",
                        r.d,
                        r.product.to_fraction_string(),
                        r.scaled_product.to_fraction_string()
                    );
                }
                s += &format!(
                    "c_plain={}\nc_scaled={}\n",
                    report.c_plain.to_fraction_string(),
                    report.c_scaled.to_fraction_string()
                );
                emit(out, &s)?;
            }
        }
        Command::Verify {
            suite,
            trials,
            seed,
            jobs,
        } => {
            let jobs = jobs.or(cfg.jobs).unwrap_or_else(default_jobs);
            let registry = property_suites();
            let chosen: Vec<_> = if suite == "all" {
                registry.iter().collect()
            } else {
                vec![registry.get(&suite)?]
            };
            let mut code = EXIT_OK;
            for s in chosen {
                let report = run_suite(s, trials, seed, jobs)?;
                let mut text = format!(
                    "{}: {} trials, {} violations (seed {seed})\n",
                    report.name,
                    report.trials,
                    report.failures.len()
                );
                for (t, e) in report.failures.iter().take(5) {
                    text += &format!("  trial {t}: {e}\n");
                }
                emit(out, &text)?;
                if !report.passed() {
                    code = EXIT_VIOLATION;
                }
            }
            return Ok(code);
        }
        Command::Explore {
            n,
            size,
            method,
            seed,
            ledger,
        } => {
            let n = GroupDim::with_cap(n, dim_cap)?;
            let defaults = AnnealParams::default();
            let search_cfg = SearchConfig {
                budget: cfg.exhaustive_budget.map_or(DEFAULT_BUDGET, u128::from),
                anneal: AnnealParams {
                    t0: cfg.anneal_t0.unwrap_or(defaults.t0),
                    ratio: cfg.anneal_ratio.unwrap_or(defaults.ratio),
                    steps: cfg.anneal_steps.unwrap_or(defaults.steps),
                },
            };
            let methods = search_methods();
            let record = methods.get(&method)?.search(n, size, seed, &search_cfg)?;
            emit(
                out,
                &format!(
                    "n={} size={} method={} seed={} best_norm={} evaluations={} set={}\n",
                    record.n,
                    record.set_size,
                    record.method,
                    record.seed,
                    record.best_norm.to_fraction_string(),
                    record.evaluations,
                    record.best_set.to_hexbits()
                ),
            )?;
            if let Some(p) = ledger {
                append_ledger(&p, &record)?;
            }
        }
        Command::CheckCert { setfile, cert } => {
            let a = load_set(&setfile, &cfg)?;
            let cert = Certificate::from_json(&read(&cert)?)?;
            let check = check_certificate(&a, &cert)?;
            emit(
                out,
                &format!(
                    "certificate ok: {} steps, final_bound {} <= a_norm {}\n",
                    check.steps,
                    check.final_bound.to_fraction_string(),
                    check.a_norm.to_fraction_string()
                ),
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub const LEDGER_HEADER: [&str; 8] = [
    "n",
    "size",
    "method",
    "seed",
    "best_norm_num",
    "best_norm_exp",
    "set_hex",
    "evaluations",
];

/// Appends one row, writing the header first if the file is new or empty.
pub fn append_ledger(path: &Path, r: &SearchRecord) -> Result<()> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    let fresh = file.metadata().map_err(|e| io_err(path, e))?.len() == 0;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| Error::BadInput(format!("{}: {e}", path.display()));
    if fresh {
        w.write_record(LEDGER_HEADER).map_err(csv_err)?;
    }
    w.write_record([
        r.n.to_string(),
        r.set_size.to_string(),
        r.method.to_string(),
        r.seed.to_string(),
        r.best_norm.num().to_string(),
        r.best_norm.exp().to_string(),
        r.best_set.to_hexbits(),
        r.evaluations.to_string(),
    ])
    .map_err(csv_err)?;
    w.flush().map_err(|e| io_err(path, e))
}
