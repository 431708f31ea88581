//! Text format for strategy vectors:
//!
//! ```text
//! ncg 3 3/1
//! 0: 1
//! 1:
//! 2: 1
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeSet;

use num_rational::Rational64;
use thiserror::Error;

use crate::game::{fmt_ratio, StrategyVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ProfileError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ProfileError {
    ProfileError { line, msg: msg.into() }
}

/// Parses `p/q` or an integer.
pub fn parse_ratio(s: &str) -> Option<Rational64> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.parse().ok()?;
            let q: i64 = q.parse().ok()?;
            (q != 0).then(|| Rational64::new(p, q))
        }
        None => s.parse().ok().map(Rational64::from_integer),
    }
}

pub fn parse_profile(text: &str) -> Result<StrategyVector, ProfileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file, expected 'ncg <n> <alpha>'"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "ncg" {
        return Err(err(hline, format!("expected 'ncg <n> <alpha>', got '{header}'")));
    }
    let n: usize = fields[1].parse().map_err(|_| err(hline, format!("bad player count '{}'", fields[1])))?;
    let alpha = parse_ratio(fields[2]).ok_or_else(|| err(hline, format!("bad alpha '{}'", fields[2])))?;
    if alpha <= Rational64::from_integer(0) {
        return Err(err(hline, format!("alpha must be positive, got {}", fmt_ratio(&alpha))));
    }
    let mut strategies: Vec<Option<BTreeSet<usize>>> = vec![None; n];
    let mut last = hline;
    for (line, text) in lines {
        last = line;
        let (player, rest) = text
            .split_once(':')
            .ok_or_else(|| err(line, format!("expected 'u: v1 v2 ...', got '{text}'")))?;
        let u: usize = player.trim().parse().map_err(|_| err(line, format!("bad player id '{}'", player.trim())))?;
        if u >= n {
            return Err(err(line, format!("player {u} outside 0..{n}")));
        }
        if strategies[u].is_some() {
            return Err(err(line, format!("player {u} listed twice")));
        }
        let mut set = BTreeSet::new();
        for tok in rest.split_whitespace() {
            let v: usize = tok.parse().map_err(|_| err(line, format!("bad node id '{tok}'")))?;
            if v >= n {
                return Err(err(line, format!("node {v} outside 0..{n}")));
            }
            if v == u {
                return Err(err(line, format!("player {u} lists itself")));
            }
            if !set.insert(v) {
                return Err(err(line, format!("node {v} listed twice")));
            }
        }
        strategies[u] = Some(set);
    }
    let strategies = strategies
        .into_iter()
        .enumerate()
        .map(|(u, s)| s.ok_or_else(|| err(last, format!("missing line for player {u}"))))
        .collect::<Result<Vec<_>, _>>()?;
    StrategyVector::new(alpha, strategies).map_err(|e| err(hline, e.to_string()))
}

pub fn write_profile(s: &StrategyVector) -> String {
    let mut out = format!("ncg {} {}\n", s.n(), fmt_ratio(&s.alpha()));
    for (u, set) in s.strategies().iter().enumerate() {
        out.push_str(&format!("{u}:"));
        for v in set {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out
}
