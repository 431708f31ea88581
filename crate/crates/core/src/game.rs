//! The sum classic network creation game: strategies, costs, optimum and
//! price of anarchy. All prices and costs are exact rationals.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;
use std::sync::OnceLock;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::graph::{Graph, GraphError, OwnedGraph};
use crate::mask;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(String),
    #[error("player {0} lists itself")]
    SelfPurchase(usize),
    #[error("player {player} lists node {target} outside 0..{n}")]
    TargetOutOfRange { player: usize, target: usize, n: usize },
    #[error("player {0} out of range")]
    PlayerOutOfRange(usize),
    #[error("empty equilibrium set")]
    NoEquilibria,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Formats a rational as `p/q`, always with an explicit denominator.
pub fn fmt_ratio(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A cost that is infinite when the owner's component does not span the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cost {
    Finite(Rational64),
    Infinite,
}

impl Cost {
    pub fn finite(self) -> Option<Rational64> {
        match self {
            Cost::Finite(c) => Some(c),
            Cost::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Cost::Infinite)
    }

    /// `self - before`.
    pub fn delta_from(self, before: Cost) -> CostDelta {
        match (before, self) {
            (Cost::Finite(a), Cost::Finite(b)) => CostDelta::Finite(b - a),
            (Cost::Finite(_), Cost::Infinite) => CostDelta::PlusInfinity,
            (Cost::Infinite, Cost::Finite(_)) => CostDelta::MinusInfinity,
            (Cost::Infinite, Cost::Infinite) => CostDelta::BothInfinite,
        }
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(c) => write!(f, "{c}"),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

/// Difference of two costs. `BothInfinite` means the player stays disconnected
/// either way, which is not an improvement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostDelta {
    Finite(Rational64),
    PlusInfinity,
    MinusInfinity,
    BothInfinite,
}

impl CostDelta {
    pub fn is_improving(self) -> bool {
        match self {
            CostDelta::Finite(d) => d.is_negative(),
            CostDelta::MinusInfinity => true,
            CostDelta::PlusInfinity | CostDelta::BothInfinite => false,
        }
    }
}

impl fmt::Display for CostDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostDelta::Finite(d) => write!(f, "{d}"),
            CostDelta::PlusInfinity => f.write_str("+inf"),
            CostDelta::MinusInfinity => f.write_str("-inf"),
            CostDelta::BothInfinite => f.write_str("inf-inf"),
        }
    }
}

/// Game state `s`: the link price and each player's purchased endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyVector {
    alpha: Rational64,
    strategies: Vec<BTreeSet<usize>>,
}

impl StrategyVector {
    pub fn new(alpha: Rational64, strategies: Vec<BTreeSet<usize>>) -> Result<Self, GameError> {
        if !alpha.is_positive() {
            return Err(GameError::NonPositiveAlpha(fmt_ratio(&alpha)));
        }
        let n = strategies.len();
        for (u, s) in strategies.iter().enumerate() {
            if s.contains(&u) {
                return Err(GameError::SelfPurchase(u));
            }
            if let Some(&t) = s.iter().find(|&&t| t >= n) {
                return Err(GameError::TargetOutOfRange { player: u, target: t, n });
            }
        }
        Ok(StrategyVector { alpha, strategies })
    }

    /// Each listed pair `(u, v)` is a link bought by `u`.
    pub fn from_links<I>(n: usize, alpha: Rational64, links: I) -> Result<Self, GameError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut strategies = vec![BTreeSet::new(); n];
        for (u, v) in links {
            if u >= n {
                return Err(GameError::PlayerOutOfRange(u));
            }
            strategies[u].insert(v);
        }
        StrategyVector::new(alpha, strategies)
    }

    pub fn n(&self) -> usize {
        self.strategies.len()
    }

    pub fn alpha(&self) -> Rational64 {
        self.alpha
    }

    pub fn strategy(&self, u: usize) -> &BTreeSet<usize> {
        &self.strategies[u]
    }

    pub fn strategies(&self) -> &[BTreeSet<usize>] {
        &self.strategies
    }

    pub fn with_alpha(&self, alpha: Rational64) -> Result<Self, GameError> {
        StrategyVector::new(alpha, self.strategies.clone())
    }

    /// Copy with player `u` playing `strategy` instead.
    pub fn with_strategy(&self, u: usize, strategy: BTreeSet<usize>) -> Result<Self, GameError> {
        if u >= self.n() {
            return Err(GameError::PlayerOutOfRange(u));
        }
        let mut strategies = self.strategies.clone();
        strategies[u] = strategy;
        StrategyVector::new(self.alpha, strategies)
    }

    pub fn total_purchases(&self) -> usize {
        self.strategies.iter().map(BTreeSet::len).sum()
    }

    /// Purchase sets as bitmasks; requires `n <= 64`.
    pub(crate) fn masks(&self) -> Vec<u64> {
        self.strategies.iter().map(|s| mask::from_set(s)).collect()
    }
}

/// `c_u = alpha |s_u| + D(u)` split into its two parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostBreakdown {
    pub link_cost: Rational64,
    /// `D(u)`, `None` when some node is unreachable from `u`.
    pub distance_cost: Option<u64>,
}

impl CostBreakdown {
    pub fn total(&self) -> Cost {
        match self.distance_cost {
            Some(d) => Cost::Finite(self.link_cost + Rational64::from_integer(d as i64)),
            None => Cost::Infinite,
        }
    }
}

/// Communication graph `G_s`. Links bought from both sides appear once.
pub fn build_comm_graph(s: &StrategyVector) -> OwnedGraph {
    OwnedGraph::from_purchases(&s.strategies).expect("strategy vector validated on construction")
}

pub fn player_cost(s: &StrategyVector, u: usize) -> CostBreakdown {
    let g = build_comm_graph(s);
    player_cost_in(s, g.graph(), u)
}

pub(crate) fn player_cost_in(s: &StrategyVector, g: &Graph, u: usize) -> CostBreakdown {
    CostBreakdown {
        link_cost: s.alpha * Rational64::from_integer(s.strategies[u].len() as i64),
        distance_cost: g.distance_sum(u),
    }
}

/// `c(s) = sum_u c_u(s)`.
pub fn social_cost(s: &StrategyVector) -> Cost {
    let g = build_comm_graph(s);
    (0..s.n())
        .map(|u| player_cost_in(s, g.graph(), u).total())
        .fold(Cost::Finite(Rational64::zero()), |a, b| a + b)
}

/// Social cost of a graph in which every edge is bought exactly once.
pub fn graph_social_cost(g: &Graph, alpha: Rational64) -> Cost {
    let mut total = alpha * Rational64::from_integer(g.edge_count() as i64);
    for u in 0..g.n() {
        match g.distance_sum(u) {
            Some(d) => total += Rational64::from_integer(d as i64),
            None => return Cost::Infinite,
        }
    }
    Cost::Finite(total)
}

/// Largest `n` for which the optimum is certified by exhaustive enumeration.
pub const CERTIFIED_OPTIMUM_LIMIT: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Optimum {
    pub cost: Rational64,
    /// False when `cost` is only the better of the star and clique costs.
    pub certified: bool,
}

/// `alpha (n-1) + 2 (n-1)^2`.
pub fn star_cost(n: usize, alpha: Rational64) -> Rational64 {
    let m = n.saturating_sub(1) as i64;
    alpha * Rational64::from_integer(m) + Rational64::from_integer(2 * m * m)
}

/// `alpha n(n-1)/2 + n(n-1)`.
pub fn clique_cost(n: usize, alpha: Rational64) -> Rational64 {
    let pairs = (n * n.saturating_sub(1) / 2) as i64;
    alpha * Rational64::from_integer(pairs) + Rational64::from_integer(2 * pairs)
}

/// Minimum social cost over all strategy vectors on `n` players.
///
/// For `n <= 7` this is an exhaustive minimum over connected graphs (each edge
/// bought once); above that the star/clique value is returned uncertified.
pub fn optimum_cost(n: usize, alpha: Rational64) -> Optimum {
    if n <= CERTIFIED_OPTIMUM_LIMIT {
        let cost = min_distance_sums(n)
            .iter()
            .enumerate()
            .filter_map(|(m, d)| {
                d.map(|d| alpha * Rational64::from_integer(m as i64) + Rational64::from_integer(d as i64))
            })
            .min()
            .unwrap_or_else(Rational64::zero);
        Optimum { cost, certified: true }
    } else {
        Optimum { cost: star_cost(n, alpha).min(clique_cost(n, alpha)), certified: false }
    }
}

/// For each edge count `m`, the least `sum_u D(u)` over connected labeled
/// graphs on `n` nodes with `m` edges. Computed once per `n`.
fn min_distance_sums(n: usize) -> &'static [Option<u64>] {
    static TABLES: [OnceLock<Vec<Option<u64>>>; CERTIFIED_OPTIMUM_LIMIT + 1] =
        [const { OnceLock::new() }; CERTIFIED_OPTIMUM_LIMIT + 1];
    TABLES[n].get_or_init(|| {
        use rayon::prelude::*;
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let p = pairs.len();
        let fold = |mut best: Vec<Option<u64>>, edges: u64| {
            let mut adj = vec![0u64; n];
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if edges >> i & 1 == 1 {
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                }
            }
            let mut total = 0u64;
            for u in 0..n {
                match mask::distance_sum(&adj, u, adj[u]) {
                    Some(d) => total += d,
                    None => return best,
                }
            }
            let m = edges.count_ones() as usize;
            best[m] = Some(best[m].map_or(total, |b| b.min(total)));
            best
        };
        let merge = |a: Vec<Option<u64>>, b: Vec<Option<u64>>| {
            a.into_iter()
                .zip(b)
                .map(|(x, y)| match (x, y) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                })
                .collect::<Vec<_>>()
        };
        (0..1u64 << p)
            .into_par_iter()
            .fold(|| vec![None; p + 1], fold)
            .reduce(|| vec![None; p + 1], merge)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriceOfAnarchy {
    pub ratio: Rational64,
    pub worst_cost: Rational64,
    pub optimum: Optimum,
}

/// Worst social cost over `equilibria` divided by the optimum. The profiles
/// are taken as given; callers are expected to have verified them.
pub fn poa(
    equilibria: &[StrategyVector],
    n: usize,
    alpha: Rational64,
) -> Result<PriceOfAnarchy, GameError> {
    let worst = equilibria
        .iter()
        .map(social_cost)
        .max()
        .ok_or(GameError::NoEquilibria)?;
    let optimum = optimum_cost(n, alpha);
    let worst_cost = worst
        .finite()
        .ok_or_else(|| GameError::Graph(GraphError::Disconnected))?;
    let ratio = if optimum.cost.is_zero() {
        Rational64::from_integer(1)
    } else {
        worst_cost / optimum.cost
    };
    Ok(PriceOfAnarchy { ratio, worst_cost, optimum })
}
