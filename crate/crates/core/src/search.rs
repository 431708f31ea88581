//! Exhaustive equilibrium enumeration at small `n`, best-response dynamics
//! and price-of-anarchy tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::audit::{run_audit, AuditConfig, AuditError, Verdict};
use crate::deviations::{best_response, is_nash, DeviationError, VerifyMode};
use crate::game::{
    build_comm_graph, fmt_ratio, optimum_cost, player_cost, social_cost, CostDelta, GameError,
    StrategyVector,
};
use crate::mask;

/// Default bound on `n` for enumeration.
pub const DEFAULT_SEARCH_LIMIT: usize = 6;
/// Hard ceiling for enumeration regardless of configuration.
pub const MAX_SEARCH_LIMIT: usize = 7;
/// Largest `n` for the unreduced route over all `2^(n(n-1))` profiles.
pub const NAIVE_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("enumeration needs n <= {limit}, got n = {n}")]
    LimitExceeded { n: usize, limit: usize },
    #[error("bad alpha expression '{0}'")]
    BadAlpha(String),
    #[error("candidate {0} passed the screen but failed exact verification")]
    VerificationMismatch(String),
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    Deviation(#[from] DeviationError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// `alpha = a n + b` with exact rationals, e.g. `4n+1`, `n/4`, `1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaExpr {
    pub per_n: Rational64,
    pub constant: Rational64,
}

impl AlphaExpr {
    pub fn constant(a: Rational64) -> Self {
        AlphaExpr { per_n: Rational64::zero(), constant: a }
    }

    pub fn eval(&self, n: usize) -> Rational64 {
        self.per_n * Rational64::from_integer(n as i64) + self.constant
    }
}

fn parse_rational(s: &str) -> Option<Rational64> {
    crate::profile::parse_ratio(s.trim())
}

impl FromStr for AlphaExpr {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SearchError::BadAlpha(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut expr = AlphaExpr { per_n: Rational64::zero(), constant: Rational64::zero() };
        for term in compact.split('+') {
            if let Some((coef, rest)) = term.split_once('n') {
                let c = if coef.is_empty() { Rational64::one() } else { parse_rational(coef).ok_or_else(bad)? };
                let d = match rest.strip_prefix('/') {
                    Some(d) => parse_rational(d).filter(|d| !d.is_zero()).ok_or_else(bad)?,
                    None if rest.is_empty() => Rational64::one(),
                    None => return Err(bad()),
                };
                expr.per_n += c / d;
            } else {
                expr.constant += parse_rational(term).ok_or_else(bad)?;
            }
        }
        Ok(expr)
    }
}

impl fmt::Display for AlphaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |r: Rational64| {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                fmt_ratio(&r)
            }
        };
        let coef = if self.per_n.is_one() { String::new() } else { term(self.per_n) };
        match (self.per_n.is_zero(), self.constant.is_zero()) {
            (true, _) => f.write_str(&term(self.constant)),
            (false, true) => write!(f, "{coef}n"),
            (false, false) => write!(f, "{coef}n+{}", term(self.constant)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    pub n: usize,
    pub alphas: Vec<Rational64>,
    /// Reduce by graph isomorphism and single ownership; otherwise visit all
    /// profiles (only for `n <= NAIVE_LIMIT`).
    pub symmetry: bool,
    /// Also visit disconnected graphs. They are never equilibria, so this only
    /// changes the work done.
    pub include_disconnected: bool,
    /// Audit checks used as filters: a candidate failing an applicable one is
    /// dropped before exact verification.
    pub prune: Vec<String>,
    pub limit: usize,
}

impl SearchSpec {
    pub fn new(n: usize, alphas: Vec<Rational64>) -> Self {
        SearchSpec {
            n,
            alphas,
            symmetry: true,
            include_disconnected: false,
            prune: Vec::new(),
            limit: DEFAULT_SEARCH_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub alpha: Rational64,
    /// Canonical representatives, ordered by canonical key.
    pub equilibria: Vec<StrategyVector>,
    /// Distinct classes that survived the screen.
    pub candidates: usize,
    /// Classes removed by prune filters.
    pub pruned: usize,
}

// canonical forms

/// Calls `f` with every permutation `perm[old] = new` that lists vertices
/// in ascending invariant order.
fn for_each_refined_perm<K: Ord>(keys: &[K], f: &mut impl FnMut(&[usize])) {
    let n = keys.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && keys[order[j]] == keys[order[i]] {
            j += 1;
        }
        groups.push((i, j));
        i = j;
    }
    let mut perm = vec![0usize; n];
    fn rec(
        g: usize,
        groups: &[(usize, usize)],
        order: &mut [usize],
        perm: &mut [usize],
        f: &mut impl FnMut(&[usize]),
    ) {
        if g == groups.len() {
            for (pos, &v) in order.iter().enumerate() {
                perm[v] = pos;
            }
            f(perm);
            return;
        }
        let (lo, hi) = groups[g];
        permute(lo, hi, lo, order, &mut |order| rec(g + 1, groups, order, perm, f));
    }
    fn permute(lo: usize, hi: usize, k: usize, order: &mut [usize], f: &mut impl FnMut(&mut [usize])) {
        if k + 1 >= hi {
            f(order);
            return;
        }
        for i in k..hi {
            order.swap(k, i);
            permute(lo, hi, k + 1, order, f);
            order.swap(k, i);
        }
    }
    rec(0, &groups, &mut order, &mut perm, f);
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Canonical code of an undirected graph given by adjacency masks, and the
/// relabelling achieving it.
fn canonical_graph(adj: &[u64]) -> (u64, Vec<usize>) {
    let n = adj.len();
    let deg: Vec<u32> = adj.iter().map(|m| m.count_ones()).collect();
    let keys: Vec<(u32, Vec<u32>)> = (0..n)
        .map(|v| {
            let mut nd: Vec<u32> = mask::bits(adj[v]).map(|w| deg[w]).collect();
            nd.sort_unstable();
            (deg[v], nd)
        })
        .collect();
    let mut best = (u64::MAX, Vec::new());
    for_each_refined_perm(&keys, &mut |p| {
        let mut code = 0u64;
        for u in 0..n {
            for v in mask::bits(adj[u]).filter(|&v| v > u) {
                code |= 1 << pair_index(n, p[u], p[v]);
            }
        }
        if code < best.0 {
            best = (code, p.to_vec());
        }
    });
    best
}

/// Canonical code of a profile up to relabelling players (ownership kept),
/// with the relabelled purchase masks achieving it.
fn canonical_profile(purchases: &[u64]) -> (u64, Vec<u64>) {
    let n = purchases.len();
    let incoming = mask::bought_towards(purchases);
    let deg = |v: usize| (purchases[v].count_ones(), incoming[v].count_ones());
    let keys: Vec<((u32, u32), Vec<(u32, u32)>, Vec<(u32, u32)>)> = (0..n)
        .map(|v| {
            let mut outs: Vec<_> = mask::bits(purchases[v]).map(deg).collect();
            let mut ins: Vec<_> = mask::bits(incoming[v]).map(deg).collect();
            outs.sort_unstable();
            ins.sort_unstable();
            (deg(v), outs, ins)
        })
        .collect();
    let mut best = (u64::MAX, Vec::new());
    for_each_refined_perm(&keys, &mut |p| {
        let mut code = 0u64;
        for u in 0..n {
            for v in mask::bits(purchases[u]) {
                code |= 1 << (p[u] * (n - 1) + p[v] - usize::from(p[v] > p[u]));
            }
        }
        if code < best.0 {
            let mut relabelled = vec![0u64; n];
            for u in 0..n {
                relabelled[p[u]] = mask::bits(purchases[u]).fold(0, |m, v| m | 1 << p[v]);
            }
            best = (code, relabelled);
        }
    });
    best
}

/// Canonical key of `s` up to relabelling players; equal keys mean the
/// profiles differ only by a renaming of players.
pub fn profile_key(s: &StrategyVector) -> u64 {
    canonical_profile(&s.masks()).0
}

/// Canonical adjacency masks of every graph on `n` nodes up to isomorphism,
/// grown one vertex at a time.
fn graph_classes(n: usize) -> Vec<Vec<u64>> {
    let mut classes: Vec<Vec<u64>> = vec![Vec::new()];
    for k in 0..n {
        let next: BTreeMap<u64, Vec<u64>> = classes
            .par_iter()
            .flat_map_iter(|adj| {
                (0..1u64 << k).map(move |nbrs| {
                    let mut a = adj.clone();
                    for v in mask::bits(nbrs) {
                        a[v] |= 1 << k;
                    }
                    a.push(nbrs);
                    let (code, p) = canonical_graph(&a);
                    let mut canon = vec![0u64; a.len()];
                    for u in 0..a.len() {
                        canon[p[u]] = mask::bits(a[u]).fold(0, |m, v| m | 1 << p[v]);
                    }
                    (code, canon)
                })
            })
            .collect();
        classes = next.into_values().collect();
    }
    classes
}

fn is_connected(adj: &[u64]) -> bool {
    adj.is_empty() || mask::distance_sum(adj, 0, adj[0]).is_some()
}

/// Screens every single-ownership orientation of the graph `adj` against all
/// `alphas` at once: player `u` with purchases `B` is stable at `alpha` iff no
/// strategy of any size `k` beats `alpha |B| + D(u)`. Returns, per alpha, the
/// purchase masks of the stable orientations.
fn screen_orientations(adj: &[u64], alphas: &[Rational64]) -> Vec<Vec<Vec<u64>>> {
    let n = adj.len();
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| mask::bits(adj[u]).filter(move |&v| v > u).map(move |v| (u, v))).collect();
    let incident: Vec<Vec<usize>> =
        (0..n).map(|u| mask::bits(adj[u]).collect()).collect();
    // ok[u][b]: alphas at which u buying the incident subset b is stable
    let ok: Vec<Vec<u64>> = (0..n)
        .map(|u| {
            let d_now = mask::distance_sum(adj, u, adj[u]).expect("connected");
            let nb = &incident[u];
            (0..1u64 << nb.len())
                .map(|b| {
                    let bought = mask::bits(b).fold(0u64, |m, i| m | 1 << nb[i]);
                    let keep = adj[u] & !bought;
                    let mut min_d: Vec<Option<u64>> = vec![None; n];
                    for s in 0..1u64 << n {
                        if s >> u & 1 == 1 {
                            continue;
                        }
                        if let Some(d) = mask::distance_sum(adj, u, keep | s) {
                            let k = s.count_ones() as usize;
                            min_d[k] = Some(min_d[k].map_or(d, |x| x.min(d)));
                        }
                    }
                    let size = Rational64::from_integer(b.count_ones() as i64);
                    let mut bits = 0u64;
                    for (i, &a) in alphas.iter().enumerate() {
                        let now = a * size + Rational64::from_integer(d_now as i64);
                        let stable = min_d.iter().enumerate().all(|(k, d)| {
                            d.is_none_or(|d| {
                                a * Rational64::from_integer(k as i64) + Rational64::from_integer(d as i64) >= now
                            })
                        });
                        if stable {
                            bits |= 1 << i;
                        }
                    }
                    bits
                })
                .collect()
        })
        .collect();
    // position of each edge in its endpoints' incidence lists
    let pos: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(u, v)| {
            (
                incident[u].iter().position(|&x| x == v).unwrap(),
                incident[v].iter().position(|&x| x == u).unwrap(),
            )
        })
        .collect();
    let all = if alphas.len() == 64 { u64::MAX } else { (1u64 << alphas.len()) - 1 };
    let mut out = vec![Vec::new(); alphas.len()];
    let mut b = vec![0u64; n];
    for orient in 0..1u64 << edges.len() {
        b.iter_mut().for_each(|x| *x = 0);
        for (i, &(u, v)) in edges.iter().enumerate() {
            if orient >> i & 1 == 0 {
                b[u] |= 1 << pos[i].0;
            } else {
                b[v] |= 1 << pos[i].1;
            }
        }
        let mut stable = all;
        for u in 0..n {
            stable &= ok[u][b[u] as usize];
            if stable == 0 {
                break;
            }
        }
        if stable == 0 {
            continue;
        }
        let purchases: Vec<u64> = (0..n)
            .map(|u| mask::bits(b[u]).fold(0, |m, i| m | 1 << incident[u][i]))
            .collect();
        for i in mask::bits(stable) {
            out[i].push(purchases.clone());
        }
    }
    out
}

fn to_profile(alpha: Rational64, purchases: &[u64]) -> StrategyVector {
    StrategyVector::new(alpha, purchases.iter().map(|&m| mask::to_set(m)).collect())
        .expect("valid purchase masks")
}

fn check_limit(spec: &SearchSpec) -> Result<(), SearchError> {
    let limit = if spec.symmetry {
        spec.limit.min(MAX_SEARCH_LIMIT)
    } else {
        spec.limit.min(NAIVE_LIMIT)
    };
    if spec.n > limit {
        return Err(SearchError::LimitExceeded { n: spec.n, limit });
    }
    Ok(())
}

/// All equilibria on `spec.n` players, up to relabelling, for each alpha.
pub fn enumerate_ne(spec: &SearchSpec) -> Result<Vec<Enumeration>, SearchError> {
    check_limit(spec)?;
    for a in &spec.alphas {
        if *a <= Rational64::zero() {
            return Err(GameError::NonPositiveAlpha(fmt_ratio(a)).into());
        }
    }
    let n = spec.n;
    // per alpha: canonical key -> canonical purchases
    let found: Vec<BTreeMap<u64, Vec<u64>>> = if spec.symmetry {
        let classes: Vec<Vec<u64>> =
            graph_classes(n).into_iter().filter(|a| is_connected(a)).collect();
        let mut maps = vec![BTreeMap::new(); spec.alphas.len()];
        for (c, chunk) in spec.alphas.chunks(64).enumerate() {
            let per_class: Vec<Vec<Vec<(u64, Vec<u64>)>>> = classes
                .par_iter()
                .map(|adj| {
                    screen_orientations(adj, chunk)
                        .into_iter()
                        .map(|list| list.iter().map(|p| canonical_profile(p)).collect())
                        .collect()
                })
                .collect();
            for res in per_class {
                for (j, list) in res.into_iter().enumerate() {
                    for (key, canon) in list {
                        maps[c * 64 + j].entry(key).or_insert(canon);
                    }
                }
            }
        }
        maps
    } else {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        spec.alphas
            .iter()
            .map(|&alpha| {
                let hits: Vec<(u64, Vec<u64>)> = (0..1u64 << pairs.len())
                    .into_par_iter()
                    .filter_map(|bits| {
                        let mut purchases = vec![0u64; n];
                        for i in mask::bits(bits) {
                            let (u, v) = pairs[i];
                            purchases[u] |= 1 << v;
                        }
                        if !spec.include_disconnected && !is_connected(&mask::adjacency(&purchases)) {
                            return None;
                        }
                        let s = to_profile(alpha, &purchases);
                        let v = is_nash(&s, VerifyMode::Exact, n).ok()?;
                        (v.is_equilibrium() == Some(true)).then(|| canonical_profile(&purchases))
                    })
                    .collect();
                hits.into_iter().collect()
            })
            .collect()
    };
    let cfg = AuditConfig::default();
    let mut out = Vec::with_capacity(spec.alphas.len());
    for (&alpha, map) in spec.alphas.iter().zip(found) {
        let candidates = map.len();
        let profiles: Vec<StrategyVector> =
            map.values().map(|p| to_profile(alpha, p)).collect();
        let checked: Vec<Option<StrategyVector>> = profiles
            .into_par_iter()
            .map(|s| -> Result<Option<StrategyVector>, SearchError> {
                if !spec.prune.is_empty() {
                    let report = run_audit(&s, Some(&spec.prune), &cfg)?;
                    if report.records.iter().any(|r| r.verdict == Verdict::Fail) {
                        return Ok(None);
                    }
                }
                let v = is_nash(&s, VerifyMode::Exact, n.max(1))?;
                if v.is_equilibrium() != Some(true) {
                    return Err(SearchError::VerificationMismatch(format!("{:?}", s.strategies())));
                }
                Ok(Some(s))
            })
            .collect::<Result<_, _>>()?;
        let pruned = checked.iter().filter(|c| c.is_none()).count();
        out.push(Enumeration {
            alpha,
            equilibria: checked.into_iter().flatten().collect(),
            candidates,
            pruned,
        });
    }
    Ok(out)
}

// dynamics

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsStatus {
    /// A full round without improvement: the last profile is an equilibrium.
    Converged,
    /// The profile after round `round` repeats the one after `first_seen`.
    Cycle { first_seen: usize, round: usize },
    /// Round cap reached.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsStep {
    pub round: usize,
    pub player: usize,
    pub strategy: BTreeSet<usize>,
    pub delta: CostDelta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub steps: Vec<DynamicsStep>,
    pub status: DynamicsStatus,
    pub rounds: usize,
    pub last: StrategyVector,
}

/// Round-robin exact best responses in ascending player order; a player moves
/// only on strict improvement.
pub fn best_response_dynamics(
    s0: &StrategyVector,
    max_rounds: usize,
    limit: usize,
) -> Result<Trajectory, DeviationError> {
    let mut s = s0.clone();
    let mut steps = Vec::new();
    let mut seen: BTreeMap<Vec<BTreeSet<usize>>, usize> = BTreeMap::new();
    seen.insert(s.strategies().to_vec(), 0);
    for round in 1..=max_rounds {
        let mut moved = false;
        for u in 0..s.n() {
            let br = best_response(&s, u, limit)?;
            let delta = br.cost.delta_from(player_cost(&s, u).total());
            if delta.is_improving() {
                s = s.with_strategy(u, br.strategy.clone())?;
                steps.push(DynamicsStep { round, player: u, strategy: br.strategy, delta });
                moved = true;
            }
        }
        if !moved {
            return Ok(Trajectory { steps, status: DynamicsStatus::Converged, rounds: round, last: s });
        }
        if let Some(&first_seen) = seen.get(s.strategies()) {
            let status = DynamicsStatus::Cycle { first_seen, round };
            return Ok(Trajectory { steps, status, rounds: round, last: s });
        }
        seen.insert(s.strategies().to_vec(), round);
    }
    Ok(Trajectory { steps, status: DynamicsStatus::Undecided, rounds: max_rounds, last: s })
}

// price of anarchy tables

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoaRow {
    pub n: usize,
    pub alpha: Rational64,
    pub ne_classes: usize,
    pub max_cost: Option<Rational64>,
    pub opt_cost: Rational64,
    pub opt_certified: bool,
    pub poa: Option<Rational64>,
    pub all_trees: bool,
}

impl PoaRow {
    /// A non-tree equilibrium above `alpha = n`.
    pub fn non_tree_above_n(&self) -> bool {
        !self.all_trees && self.alpha > Rational64::from_integer(self.n as i64)
    }
}

pub fn poa_row(n: usize, e: &Enumeration) -> PoaRow {
    let max_cost = e.equilibria.iter().filter_map(|s| social_cost(s).finite()).max();
    let opt = optimum_cost(n, e.alpha);
    let poa = max_cost.map(|c| if opt.cost.is_zero() { Rational64::one() } else { c / opt.cost });
    PoaRow {
        n,
        alpha: e.alpha,
        ne_classes: e.equilibria.len(),
        max_cost,
        opt_cost: opt.cost,
        opt_certified: opt.certified,
        poa,
        all_trees: e.equilibria.iter().all(|s| build_comm_graph(s).graph().is_tree()),
    }
}

/// One row per `(n, alpha)` in the given order.
pub fn poa_table(ns: &[usize], alphas: &[AlphaExpr], limit: usize) -> Result<Vec<PoaRow>, SearchError> {
    let mut rows = Vec::new();
    for &n in ns {
        let mut spec = SearchSpec::new(n, alphas.iter().map(|a| a.eval(n)).collect());
        spec.limit = limit;
        for e in enumerate_ne(&spec)? {
            rows.push(poa_row(n, &e));
        }
    }
    Ok(rows)
}

const COLUMNS: [&str; 7] = ["n", "alpha", "ne_classes", "max_cost", "opt_cost", "poa", "all_trees"];

fn row_cells(r: &PoaRow) -> [String; 7] {
    let opt = if r.opt_certified { fmt_ratio(&r.opt_cost) } else { format!("<={}", fmt_ratio(&r.opt_cost)) };
    [
        r.n.to_string(),
        fmt_ratio(&r.alpha),
        r.ne_classes.to_string(),
        r.max_cost.map_or("-".into(), |c| fmt_ratio(&c)),
        opt,
        r.poa.map_or("-".into(), |p| fmt_ratio(&p)),
        r.all_trees.to_string(),
    ]
}

pub fn render_table_csv(rows: &[PoaRow]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&row_cells(r).join(","));
        out.push('\n');
    }
    out
}

pub fn render_table_text(rows: &[PoaRow]) -> String {
    let cells: Vec<[String; 7]> = rows.iter().map(row_cells).collect();
    let mut width = COLUMNS.map(str::len);
    for c in &cells {
        for (w, s) in width.iter_mut().zip(c) {
            *w = (*w).max(s.len());
        }
    }
    let line = |c: &[String]| {
        let mut s = c.iter().zip(width).map(|(x, w)| format!("{x:>w$}")).collect::<Vec<_>>().join("  ");
        s.push('\n');
        s
    };
    let mut out = line(&COLUMNS.map(String::from));
    for (r, c) in rows.iter().zip(&cells) {
        out.push_str(&line(c).trim_end().to_string());
        if r.non_tree_above_n() {
            out.push_str("  non-tree equilibrium above alpha = n");
        }
        out.push('\n');
    }
    out
}
