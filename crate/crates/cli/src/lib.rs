//! The `fct` command line.
//!
//! [`run`] parses an argument vector, dispatches one verb and returns the exit
//! code with captured output, so the binary and the tests share one path.
//! Exit codes: 0 success, 1 usage or input error, 2 domain refusal, 3 oracle
//! cap exceeded or lift failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fct_core::dimension::{
    bounds_report, dimension_report, BoundsReport, DimensionReport, LowerStatus,
};
use fct_core::graph::zuta_labeling;
use fct_core::invariants::{
    one_factor_groebner, two_factor_groebner, GeneratorSet, InvariantsError, OneFactorSplit,
};
use fct_core::oracle::{
    vanishing_basis_detailed, verify_vanishes, OracleError, VanishingBasisRequest,
};
use fct_core::{FactorGraph, Polynomial, Variable};
use serde::Serialize;
use thiserror::Error;

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Refused(String),
    #[error("{0}")]
    Limit(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Refused(_) => 2,
            CliError::Limit(_) => 3,
        }
    }
}

impl From<InvariantsError> for CliError {
    fn from(e: InvariantsError) -> Self {
        match e {
            InvariantsError::OverlapTooLarge(_) | InvariantsError::NotTwoFactor(_) => {
                CliError::Refused(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::CapExceeded { .. } | OracleError::LiftFailed { .. } => {
                CliError::Limit(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "fct",
    version,
    about = "Exact algebra for sparse factor analysis graphs"
)]
#[command(after_help = "Environment: FCT_THREADS caps internal parallelism (0 = serial).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounds plus the Jacobian-rank model dimension.
    Dim {
        #[command(flatten)]
        common: Common,
        /// Random loading draws; the largest rank wins.
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Labelings examined for the lower bound.
        #[arg(long, default_value_t = 10_000)]
        labeling_budget: usize,
    },
    /// Combinatorial bounds only.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        labeling_budget: usize,
    },
    /// A ZUTA labeling, or "none".
    Zuta {
        #[command(flatten)]
        common: Common,
    },
    /// Generator set for one or two latent nodes with at most two shared children.
    Invariants {
        #[command(flatten)]
        common: Common,
    },
    /// Checks that each polynomial of a file vanishes on the model.
    Verify {
        #[command(flatten)]
        common: Common,
        /// One polynomial per line; blank lines and lines starting with '#' are skipped.
        #[arg(long)]
        poly_file: PathBuf,
    },
    /// Certified basis of vanishing polynomials up to a degree.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: u32,
        /// Covariance variables, e.g. v1_v2,v3_v4 or s_1_2,s_3_4.
        #[arg(long, value_delimiter = ',')]
        support: Option<Vec<String>>,
        /// Largest number of candidate monomials.
        #[arg(long, default_value_t = 50_000)]
        cap: usize,
        /// Only monomials of exactly the given degree.
        #[arg(long)]
        homogeneous: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Graph JSON: {"observed": [...], "latent": [...], "edges": [[latent, observed], ...]}.
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

/// Parses `argv` (program name first) and runs one verb.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut stderr = String::new();
    let result = with_thread_cap(|| dispatch(cli.command, &mut stderr));
    match result {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr,
        },
        Err(Failure { error, stdout }) => {
            let _ = writeln!(stderr, "error: {error}");
            Outcome {
                code: error.code(),
                stdout,
                stderr,
            }
        }
    }
}

/// An error with whatever output was produced before it.
struct Failure {
    error: CliError,
    stdout: String,
}

impl From<CliError> for Failure {
    fn from(error: CliError) -> Self {
        Failure {
            error,
            stdout: String::new(),
        }
    }
}

impl From<InvariantsError> for Failure {
    fn from(e: InvariantsError) -> Self {
        CliError::from(e).into()
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        CliError::from(e).into()
    }
}

/// Runs `f` on a pool sized by `FCT_THREADS`; unset leaves the default pool.
fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var("FCT_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok());
    match threads {
        None => f(),
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(e) => {
                log::warn!("could not build a thread pool: {e}");
                f()
            }
        },
    }
}

fn load_graph(path: &Path, stderr: &mut String) -> Result<FactorGraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let g = FactorGraph::from_json(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    for w in g.warnings() {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(g)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("reports serialize");
    s.push('\n');
    s
}

fn dispatch(command: Command, stderr: &mut String) -> Result<String, Failure> {
    match command {
        Command::Dim {
            common,
            trials,
            seed,
            labeling_budget,
        } => {
            let g = load_graph(&common.graph, stderr)?;
            let r = dimension_report(&g, trials, seed, labeling_budget);
            Ok(match common.format {
                Format::Json => json(&r),
                Format::Table => dimension_table(&r),
            })
        }
        Command::Bounds {
            common,
            labeling_budget,
        } => {
            let g = load_graph(&common.graph, stderr)?;
            let r = bounds_report(&g, labeling_budget);
            Ok(match common.format {
                Format::Json => json(&r),
                Format::Table => bounds_table(&r),
            })
        }
        Command::Zuta { common } => {
            let g = load_graph(&common.graph, stderr)?;
            let lab = zuta_labeling(&g).map(|l| l.to_labeled(&g));
            Ok(match (common.format, lab) {
                (Format::Json, lab) => json(&lab),
                (Format::Table, None) => "none\n".to_string(),
                (Format::Table, Some(lab)) => {
                    let mut out = String::new();
                    for h in &lab.latent_order {
                        let _ = writeln!(out, "{h} {}", lab.witness[h]);
                    }
                    out
                }
            })
        }
        Command::Invariants { common } => {
            let g = load_graph(&common.graph, stderr)?;
            let set = generator_set(&g)?;
            Ok(match common.format {
                Format::Json => format!("{}\n", set.to_json()),
                Format::Table => set.to_table(),
            })
        }
        Command::Verify { common, poly_file } => {
            let g = load_graph(&common.graph, stderr)?;
            verify(&g, &poly_file, common.format)
        }
        Command::Oracle {
            common,
            degree,
            support,
            cap,
            homogeneous,
            seed,
        } => {
            let g = load_graph(&common.graph, stderr)?;
            let mut req = VanishingBasisRequest::new(&g, degree)
                .cap(cap)
                .homogeneous_only(homogeneous)
                .seed(seed);
            if let Some(items) = support {
                req = req.support(parse_support(&g, &items)?);
            }
            let basis = vanishing_basis_detailed(&req)?;
            Ok(match common.format {
                Format::Json => json(&OracleDoc {
                    found: basis.found,
                    certified: basis.certified,
                    monomials: basis.monomials,
                    prime: basis.prime,
                    polynomials: basis.polynomials.iter().map(ToString::to_string).collect(),
                }),
                Format::Table => basis.polynomials.iter().map(|f| format!("{f}\n")).collect(),
            })
        }
    }
}

/// One latent node uses the one-factor basis; two use the constructed two-factor basis.
fn generator_set(g: &FactorGraph) -> Result<GeneratorSet, CliError> {
    if g.m() == 1 {
        let split = OneFactorSplit::complement_of(g.children(0), g.p())?;
        return Ok(one_factor_groebner(&split));
    }
    Ok(two_factor_groebner(g)?)
}

#[derive(Serialize)]
struct OracleDoc {
    found: usize,
    certified: usize,
    monomials: usize,
    prime: u64,
    polynomials: Vec<String>,
}

#[derive(Serialize)]
struct Verdict {
    polynomial: String,
    vanishes: bool,
}

fn verify(g: &FactorGraph, path: &Path, format: Format) -> Result<String, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut verdicts = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Polynomial = line
            .parse()
            .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), n + 1)))?;
        let vanishes = verify_vanishes(&f, g)?;
        verdicts.push(Verdict {
            polynomial: line.to_string(),
            vanishes,
        });
    }
    let out = match format {
        Format::Json => json(&verdicts),
        Format::Table => verdicts
            .iter()
            .map(|v| {
                format!(
                    "{} {}\n",
                    if v.vanishes { "OK" } else { "FAIL" },
                    v.polynomial
                )
            })
            .collect(),
    };
    let failed = verdicts.iter().filter(|v| !v.vanishes).count();
    if failed == 0 {
        Ok(out)
    } else {
        Err(Failure {
            error: CliError::Usage(format!(
                "{failed} of {} polynomials do not vanish",
                verdicts.len()
            )),
            stdout: out,
        })
    }
}

/// Accepts `s_i_j` (one-based positions) or `u_v` with observed labels `u`, `v`.
fn parse_support(g: &FactorGraph, items: &[String]) -> Result<Vec<Variable>, CliError> {
    items
        .iter()
        .map(|item| {
            let item = item.trim();
            if let Some(v) =
                positional_sigma(item).filter(|v| v.pair().is_some_and(|(_, j)| j < g.p()))
            {
                return Ok(v);
            }
            item.match_indices('_')
                .find_map(|(i, _)| {
                    let (u, v) = (&item[..i], &item[i + 1..]);
                    Some((g.observed_index(u)?, g.observed_index(v)?))
                })
                .filter(|(u, v)| u != v)
                .map(|(u, v)| Variable::sigma(u, v))
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "support entry {item:?} is not a pair of observed nodes"
                    ))
                })
        })
        .collect()
}

fn positional_sigma(item: &str) -> Option<Variable> {
    let (i, j) = item.strip_prefix("s_")?.split_once('_')?;
    let (i, j): (usize, usize) = (i.parse().ok()?, j.parse().ok()?);
    (i >= 1 && j >= 1 && i != j).then(|| Variable::sigma(i - 1, j - 1))
}

fn status(s: LowerStatus) -> &'static str {
    match s {
        LowerStatus::Exhaustive => "exhaustive",
        LowerStatus::BudgetTruncated => "budget-truncated",
        LowerStatus::NotZuta => "not-zuta",
    }
}

fn lower_text(lower: Option<usize>) -> String {
    lower.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn bounds_rows(
    expected: usize,
    zero: usize,
    upper: usize,
    lower: Option<usize>,
    st: LowerStatus,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<20} {expected}", "expected");
    let _ = writeln!(out, "{:<20} {zero}", "zero_pattern_bound");
    let _ = writeln!(out, "{:<20} {upper}", "upper");
    let _ = writeln!(out, "{:<20} {}", "lower", lower_text(lower));
    let _ = writeln!(out, "{:<20} {}", "lower_status", status(st));
    out
}

fn bounds_table(r: &BoundsReport) -> String {
    bounds_rows(
        r.expected,
        r.zero_pattern_bound,
        r.upper,
        r.lower,
        r.lower_status,
    )
}

fn dimension_table(r: &DimensionReport) -> String {
    let mut out = bounds_rows(
        r.expected,
        r.zero_pattern_bound,
        r.upper,
        r.lower,
        r.lower_status,
    );
    let _ = writeln!(out, "{:<20} {}", "exact", r.exact);
    let _ = writeln!(out, "{:<20} {}", "defective", r.defective);
    let _ = writeln!(out, "{:<20} {}", "trials", r.trials);
    let _ = writeln!(out, "{:<20} {}", "seed", r.seed);
    out
}
