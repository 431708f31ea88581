//! Command-line front end. [`run`] returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | equilibrium / all checks pass or not applicable / search done |
//! | 1 | parse, validation or usage error |
//! | 2 | refuted / some check failed |
//! | 3 | undecided (family mode found no witness) |
//! | 4 | enumeration or best-response limit exceeded |

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::json;

use crate::audit::{run_audit, AuditConfig, AuditError, CHECK_NAMES};
use crate::dau::{Quantifier, WindowRule};
use crate::deviations::{is_nash, DeviationError, Status, VerifyMode, DEFAULT_EXHAUSTIVE_LIMIT};
use crate::game::{build_comm_graph, fmt_ratio, social_cost, StrategyVector};
use crate::profile::{parse_profile, parse_ratio, write_profile};
use crate::search::{
    best_response_dynamics, enumerate_ne, poa_row, render_table_csv, render_table_text,
    AlphaExpr, DynamicsStatus, SearchError, SearchSpec, DEFAULT_SEARCH_LIMIT, MAX_SEARCH_LIMIT,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REFUTED: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ncg", about = "Network creation game equilibria: verify, audit, search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Family,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Window {
    Union,
    MaxLevel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Quant {
    SharedR,
    PerSource,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a profile is a Nash equilibrium.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Largest n for exhaustive best responses.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
        exhaustive_limit: usize,
    },
    /// Run structural checks on a profile.
    Audit {
        file: PathBuf,
        /// Comma-separated check names, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Constant C of the DAU check, as p/q.
        #[arg(long, default_value = "5")]
        dau_c: String,
        #[arg(long, value_enum, default_value = "union")]
        dau_window: Window,
        #[arg(long, value_enum, default_value = "shared-r")]
        dau_quantifier: Quant,
    },
    /// Enumerate equilibria, print PoA tables or run best-response dynamics.
    Search {
        /// Player counts: `5`, `3,4` or `3-6`.
        #[arg(long)]
        n: Option<String>,
        /// Alpha expressions such as `1/2`, `n`, `4n+1`, `n/4`; repeat or comma-separate.
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<String>,
        /// Print one PoA row per (n, alpha).
        #[arg(long)]
        table: bool,
        /// Run best-response dynamics from this profile file.
        #[arg(long)]
        dynamics: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        max_rounds: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
        /// Visit disconnected graphs too (never equilibria).
        #[arg(long)]
        include_disconnected: bool,
        /// Visit every labelled profile instead of isomorphism classes (n <= 4).
        #[arg(long)]
        no_symmetry: bool,
        /// Audit checks used to discard candidates before exact verification.
        #[arg(long, value_delimiter = ',')]
        prune: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEARCH_LIMIT)]
        exhaustive_limit: usize,
    },
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Verify { file, mode, format, exhaustive_limit } => {
            verify(&file, mode, format, exhaustive_limit, out)
        }
        Command::Audit { file, checks, format, dau_c, dau_window, dau_quantifier } => {
            audit(&file, &checks, format, &dau_c, dau_window, dau_quantifier, out)
        }
        Command::Search {
            n,
            alpha,
            table,
            dynamics,
            max_rounds,
            format,
            include_disconnected,
            no_symmetry,
            prune,
            exhaustive_limit,
        } => {
            let opts = SearchOpts {
                n,
                alpha,
                table,
                format,
                include_disconnected,
                symmetry: !no_symmetry,
                prune,
                limit: exhaustive_limit,
            };
            match dynamics {
                Some(seed) => dynamics_cmd(&seed, max_rounds, out),
                None => search(opts, out),
            }
        }
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_ERROR, message: message.into() }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        fail(e.to_string())
    }
}

impl From<DeviationError> for Failure {
    fn from(e: DeviationError) -> Self {
        match e {
            DeviationError::LimitExceeded { .. } => Failure {
                code: EXIT_LIMIT,
                message: format!("{e}; raise --exhaustive-limit or use --mode family"),
            },
            other => fail(other.to_string()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::LimitExceeded { .. } => Failure {
                code: EXIT_LIMIT,
                message: format!(
                    "{e}; enumeration supports n <= {MAX_SEARCH_LIMIT} via --exhaustive-limit"
                ),
            },
            SearchError::Deviation(d) => d.into(),
            other => fail(other.to_string()),
        }
    }
}

impl From<AuditError> for Failure {
    fn from(e: AuditError) -> Self {
        fail(e.to_string())
    }
}

fn load(path: &PathBuf) -> Result<StrategyVector, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    parse_profile(&text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn verify(path: &PathBuf, mode: Mode, format: Format, limit: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let s = load(path)?;
    let mode = match mode {
        Mode::Exact => VerifyMode::Exact,
        Mode::Family => VerifyMode::Family,
    };
    let v = is_nash(&s, mode, limit)?;
    let status = match v.status {
        Status::Equilibrium => "equilibrium",
        Status::NotEquilibrium => "not-equilibrium",
        Status::Undecided => "undecided",
    };
    match format {
        Format::Text => {
            writeln!(out, "status: {status}")?;
            writeln!(out, "method: {}", serde_json::to_value(v.method).unwrap().as_str().unwrap())?;
            if let Some(w) = &v.witness {
                writeln!(out, "witness: {}", w.describe(&s))?;
            }
        }
        Format::Jsonl => {
            let witness = v.witness.as_ref().map(|w| {
                json!({
                    "player": w.deviation.player,
                    "kind": w.deviation.kind.name(),
                    "strategy": w.deviation.new_strategy,
                    "delta": w.delta.to_string(),
                    "description": w.describe(&s),
                })
            });
            let record = json!({
                "n": s.n(),
                "alpha": fmt_ratio(&s.alpha()),
                "status": status,
                "method": v.method,
                "witness": witness,
            });
            writeln!(out, "{record}")?;
        }
    }
    Ok(match v.status {
        Status::Equilibrium => EXIT_OK,
        Status::NotEquilibrium => EXIT_REFUTED,
        Status::Undecided => EXIT_UNDECIDED,
    })
}

fn audit(
    path: &PathBuf,
    checks: &str,
    format: Format,
    dau_c: &str,
    window: Window,
    quant: Quant,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let s = load(path)?;
    let names: Option<Vec<String>> = if checks.trim() == "all" {
        None
    } else {
        Some(checks.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect())
    };
    let c = parse_ratio(dau_c.trim()).ok_or_else(|| fail(format!("bad --dau-c '{dau_c}'")))?;
    if c <= Rational64::from_integer(4) {
        return Err(fail(format!("--dau-c must exceed 4, got {}", fmt_ratio(&c))));
    }
    let mut cfg = AuditConfig { dau_c: c, ..AuditConfig::default() };
    cfg.dau.window = match window {
        Window::Union => WindowRule::Union,
        Window::MaxLevel => WindowRule::MaxLevel,
    };
    cfg.dau.quantifier = match quant {
        Quant::SharedR => Quantifier::SharedR,
        Quant::PerSource => Quantifier::PerSource,
    };
    let report = run_audit(&s, names.as_deref(), &cfg)?;
    let text = match format {
        Format::Text => report.to_text(),
        Format::Jsonl => report.to_jsonl(),
    };
    out.write_all(text.as_bytes())?;
    Ok(if report.any_fail() { EXIT_REFUTED } else { EXIT_OK })
}

struct SearchOpts {
    n: Option<String>,
    alpha: Vec<String>,
    table: bool,
    format: TableFormat,
    include_disconnected: bool,
    symmetry: bool,
    prune: Vec<String>,
    limit: usize,
}

fn parse_ns(s: &str) -> Option<Vec<usize>> {
    let mut ns = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
                if a > b {
                    return None;
                }
                ns.extend(a..=b);
            }
            None => ns.push(part.parse().ok()?),
        }
    }
    (!ns.is_empty()).then_some(ns)
}

fn search(o: SearchOpts, out: &mut dyn Write) -> Result<i32, Failure> {
    let n_arg = o.n.as_deref().ok_or_else(|| fail("--n is required unless --dynamics is given"))?;
    let ns = parse_ns(n_arg).ok_or_else(|| fail(format!("bad --n '{n_arg}'")))?;
    if o.alpha.is_empty() {
        return Err(fail("--alpha is required"));
    }
    let exprs: Vec<AlphaExpr> = o.alpha.iter().map(|a| a.parse()).collect::<Result<_, SearchError>>()?;
    for p in &o.prune {
        if !CHECK_NAMES.contains(&p.as_str()) {
            return Err(AuditError::UnknownCheck(p.clone()).into());
        }
    }
    let mut rows = Vec::new();
    let mut listing = String::new();
    if matches!(o.format, TableFormat::Csv) && !o.table {
        listing.push_str("n,alpha,class,social_cost,tree,purchases\n");
    }
    for &n in &ns {
        let spec = SearchSpec {
            n,
            alphas: exprs.iter().map(|e| e.eval(n)).collect(),
            symmetry: o.symmetry,
            include_disconnected: o.include_disconnected,
            prune: o.prune.clone(),
            limit: o.limit,
        };
        for e in enumerate_ne(&spec)? {
            rows.push(poa_row(n, &e));
            if o.table {
                continue;
            }
            match o.format {
                TableFormat::Text => {
                    listing.push_str(&format!(
                        "# n={n} alpha={} classes={} pruned={}\n",
                        fmt_ratio(&e.alpha),
                        e.equilibria.len(),
                        e.pruned
                    ));
                    for s in &e.equilibria {
                        listing.push_str(&write_profile(s));
                        listing.push('\n');
                    }
                }
                TableFormat::Csv => {
                    for (i, s) in e.equilibria.iter().enumerate() {
                        let links: Vec<String> = s
                            .strategies()
                            .iter()
                            .enumerate()
                            .flat_map(|(u, set)| set.iter().map(move |v| format!("{u}>{v}")))
                            .collect();
                        let cost = social_cost(s).finite().map_or("inf".into(), |c| fmt_ratio(&c));
                        let tree = build_comm_graph(s).graph().is_tree();
                        listing.push_str(&format!(
                            "{n},{},{i},{cost},{tree},{}\n",
                            fmt_ratio(&e.alpha),
                            links.join(";")
                        ));
                    }
                }
            }
        }
    }
    if o.table {
        let text = match o.format {
            TableFormat::Text => render_table_text(&rows),
            TableFormat::Csv => render_table_csv(&rows),
        };
        out.write_all(text.as_bytes())?;
    } else {
        out.write_all(listing.as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn dynamics_cmd(seed: &PathBuf, max_rounds: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let s = load(seed)?;
    let t = best_response_dynamics(&s, max_rounds, DEFAULT_EXHAUSTIVE_LIMIT)?;
    for step in &t.steps {
        let set: Vec<String> = step.strategy.iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "round {}: player {} -> {{{}}} delta {}",
            step.round,
            step.player,
            set.join(","),
            step.delta
        )?;
    }
    let verdict = match t.status {
        DynamicsStatus::Converged => format!("converged after {} rounds", t.rounds),
        DynamicsStatus::Cycle { first_seen, round } => {
            format!("cycle: profile after round {round} repeats round {first_seen}")
        }
        DynamicsStatus::Undecided => format!("undecided: round cap {} reached", t.rounds),
    };
    writeln!(out, "status: {verdict}")?;
    out.write_all(write_profile(&t.last).as_bytes())?;
    Ok(match t.status {
        DynamicsStatus::Converged => EXIT_OK,
        _ => EXIT_UNDECIDED,
    })
}
