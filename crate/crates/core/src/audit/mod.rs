//! Structural predicates on a candidate `(s, alpha)`, one record per check.
//!
//! Each check evaluates its own preconditions and reports `NotApplicable`
//! when any of them is unmet. A failing check on an equilibrium is a
//! counterexample; on an arbitrary candidate it certifies non-equilibrium.

mod branching;
mod checks;
mod reduced;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dau::{epsilon_grid, DauOptions};
use crate::game::StrategyVector;

pub use branching::{find_branching, BranchingPattern, BranchingRule, PathBound};
pub use reduced::{build_reduced, ReducedDigraph, ReducedEdge, ReducedError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Precondition {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    NodePair { u: usize, v: usize, d_u: u64, d_v: u64, spread: u64, bound: u64 },
    Cycle { nodes: Vec<usize>, double_buyer: Option<usize> },
    Node { node: usize, degree_h: usize, out_h: usize, in_h: usize },
    Edge { u: usize, v: usize },
    TwoPath { nodes: Vec<usize>, length: usize, closed: bool },
    BareCycle { nodes: Vec<usize> },
    ReducedCycle { chains: Vec<Vec<usize>> },
    Component { representative: usize, value: String, bound: String },
    Girth { girth: usize, bound: String },
    Branching { path: Vec<usize>, two_nodes: Vec<usize>, branches: Vec<Vec<usize>> },
    Diameter { diam_g: usize, diam_h: usize, representative: usize },
    Ratio { social_cost: String, optimum: String, ratio: String, bound: String },
    Dau { epsilon: String, worst_source: Option<usize> },
    Agreement { u: usize, w: usize, count: usize, bound: String },
    PowerCollapse { diameter: usize, power_diameter: usize, failing_epsilons: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub check: &'static str,
    pub verdict: Verdict,
    pub preconditions: Vec<Precondition>,
    pub witness: Option<Witness>,
    pub measurements: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl CheckRecord {
    /// Pass when every precondition holds, otherwise not-applicable.
    pub(crate) fn gate(check: &'static str, preconditions: Vec<Precondition>) -> Self {
        let verdict = if preconditions.iter().all(|p| p.holds) {
            Verdict::Pass
        } else {
            Verdict::NotApplicable
        };
        CheckRecord {
            check,
            verdict,
            preconditions,
            witness: None,
            measurements: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn applicable(&self) -> bool {
        self.verdict != Verdict::NotApplicable
    }

    /// Marks failure; the first witness is kept.
    pub(crate) fn fail(&mut self, w: Witness) {
        self.verdict = Verdict::Fail;
        self.witness.get_or_insert(w);
    }

    pub(crate) fn measure(&mut self, key: &str, value: impl fmt::Display) {
        self.measurements.insert(key.to_string(), value.to_string());
    }

    pub(crate) fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

#[derive(Debug, Clone)]
pub struct AuditConfig {
    /// Constant `C > 4` of the DAU check.
    pub dau_c: Rational64,
    pub dau: DauOptions,
    pub epsilon_grid: Vec<Rational64>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            dau_c: Rational64::from_integer(5),
            dau: DauOptions::default(),
            epsilon_grid: epsilon_grid(),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("unknown check '{0}' (known: {known})", known = CHECK_NAMES.join(", "))]
    UnknownCheck(String),
}

/// Every check, in report order.
pub const CHECK_NAMES: &[&str] = &[
    "distance-spread",
    "distance-spread-strict",
    "minimal-cycles-directed",
    "degree-two-are-2-nodes",
    "edges-on-minimal-cycles",
    "two-paths",
    "reduced-forest",
    "degree-lower",
    "degree-lower-strong",
    "degree-upper",
    "girth",
    "tree-theorem",
    "branching-long-edges",
    "branching-long-internal",
    "branching-short-edges",
    "branching-short-internal",
    "diameter-relation",
    "poa-diameter-bound",
    "tree-poa-bound",
    "ne-dau",
    "agreement-sets",
    "power-collapse",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub records: Vec<CheckRecord>,
}

impl AuditReport {
    pub fn any_fail(&self) -> bool {
        self.records.iter().any(|r| r.verdict == Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn get(&self, check: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check)
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!("{}: {}\n", r.check, r.verdict));
            for p in &r.preconditions {
                let mark = if p.holds { "ok" } else { "unmet" };
                out.push_str(&format!("  pre {} [{}] {}\n", p.name, mark, p.detail));
            }
            if let Some(w) = &r.witness {
                out.push_str(&format!(
                    "  witness {}\n",
                    serde_json::to_string(w).expect("witness serializes")
                ));
            }
            for (k, v) in &r.measurements {
                out.push_str(&format!("  {k} = {v}\n"));
            }
            for n in &r.notes {
                out.push_str(&format!("  note: {n}\n"));
            }
        }
        out
    }
}

/// Runs the named checks (all when `None`) in `CHECK_NAMES` order.
pub fn run_audit(
    s: &StrategyVector,
    checks: Option<&[String]>,
    cfg: &AuditConfig,
) -> Result<AuditReport, AuditError> {
    let selected: Vec<&'static str> = match checks {
        None => CHECK_NAMES.to_vec(),
        Some(names) => {
            for n in names {
                if !CHECK_NAMES.contains(&n.as_str()) {
                    return Err(AuditError::UnknownCheck(n.clone()));
                }
            }
            CHECK_NAMES.iter().copied().filter(|c| names.iter().any(|n| n == c)).collect()
        }
    };
    let records = match checks::Ctx::new(s, cfg) {
        Some(ctx) => selected.par_iter().map(|&c| ctx.run(c)).collect(),
        None => selected
            .iter()
            .map(|&c| {
                CheckRecord::gate(
                    c,
                    vec![Precondition {
                        name: "connected".into(),
                        holds: false,
                        detail: "communication graph is disconnected".into(),
                    }],
                )
            })
            .collect(),
    };
    Ok(AuditReport { records })
}
