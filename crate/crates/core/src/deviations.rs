//! Unilateral deviations, exact best responses and Nash verification.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::game::{
    build_comm_graph, player_cost, Cost, CostDelta, GameError, StrategyVector,
};
use crate::graph::{bridges_and_components, h_out, is_two_node};
use crate::mask;

/// Default bound on `n` for exhaustive best responses (`2^(n-1)` candidates).
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 16;
/// Hard ceiling regardless of configuration.
pub const MAX_EXHAUSTIVE_LIMIT: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeviationError {
    #[error("exhaustive best response needs n <= {limit}, got n = {n}")]
    LimitExceeded { n: usize, limit: usize },
    #[error("deviation kind {kind} does not match the strategy change of player {player}")]
    KindMismatch { kind: DeviationKind, player: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviationKind {
    AddOne,
    DropOne,
    SwapOne,
    DropAllBuyOne,
    TwoSwap,
    DropTwoBuyOne,
    Arbitrary,
}

impl DeviationKind {
    pub fn name(self) -> &'static str {
        match self {
            DeviationKind::AddOne => "add-one",
            DeviationKind::DropOne => "drop-one",
            DeviationKind::SwapOne => "swap-one",
            DeviationKind::DropAllBuyOne => "drop-all-buy-one",
            DeviationKind::TwoSwap => "two-swap",
            DeviationKind::DropTwoBuyOne => "drop-two-buy-one",
            DeviationKind::Arbitrary => "arbitrary",
        }
    }

    /// Kind implied by the set difference alone (never `TwoSwap`).
    pub fn classify(old: &BTreeSet<usize>, new: &BTreeSet<usize>) -> DeviationKind {
        let removed = old.difference(new).count();
        let added = new.difference(old).count();
        match (removed, added) {
            (0, 1) => DeviationKind::AddOne,
            (1, 0) => DeviationKind::DropOne,
            (1, 1) => DeviationKind::SwapOne,
            (r, 1) if r >= 3 && r == old.len() => DeviationKind::DropAllBuyOne,
            (2, 1) => DeviationKind::DropTwoBuyOne,
            _ => DeviationKind::Arbitrary,
        }
    }
}

impl fmt::Display for DeviationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Player `player` replaces its strategy by `new_strategy`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Deviation {
    pub player: usize,
    pub new_strategy: BTreeSet<usize>,
    pub kind: DeviationKind,
}

impl Deviation {
    /// Deviation tagged by its set difference.
    pub fn new(
        s: &StrategyVector,
        player: usize,
        new_strategy: BTreeSet<usize>,
    ) -> Result<Self, DeviationError> {
        validate_target(s, player, &new_strategy)?;
        let kind = DeviationKind::classify(s.strategy(player), &new_strategy);
        Ok(Deviation { player, new_strategy, kind })
    }

    /// Deviation with an explicit tag, which must agree with the set
    /// difference (`TwoSwap` is a special swap-one).
    pub fn tagged(
        s: &StrategyVector,
        player: usize,
        new_strategy: BTreeSet<usize>,
        kind: DeviationKind,
    ) -> Result<Self, DeviationError> {
        validate_target(s, player, &new_strategy)?;
        let implied = DeviationKind::classify(s.strategy(player), &new_strategy);
        let ok = implied == kind || (kind == DeviationKind::TwoSwap && implied == DeviationKind::SwapOne);
        if !ok {
            return Err(DeviationError::KindMismatch { kind, player });
        }
        Ok(Deviation { player, new_strategy, kind })
    }

    pub fn removed<'a>(&'a self, s: &'a StrategyVector) -> impl Iterator<Item = usize> + 'a {
        s.strategy(self.player).difference(&self.new_strategy).copied()
    }

    pub fn added<'a>(&'a self, s: &'a StrategyVector) -> impl Iterator<Item = usize> + 'a {
        self.new_strategy.difference(s.strategy(self.player)).copied()
    }

    pub fn apply(&self, s: &StrategyVector) -> StrategyVector {
        s.with_strategy(self.player, self.new_strategy.clone())
            .expect("deviation validated on construction")
    }

    /// Human-readable form, e.g. `player 0 drop {1} buy {3}`.
    pub fn describe(&self, s: &StrategyVector) -> String {
        let mut out = format!("player {}", self.player);
        let removed: Vec<usize> = self.removed(s).collect();
        let added: Vec<usize> = self.added(s).collect();
        if !removed.is_empty() {
            out.push_str(&format!(" drop {}", fmt_set(&removed)));
        }
        if !added.is_empty() {
            out.push_str(&format!(" buy {}", fmt_set(&added)));
        }
        if removed.is_empty() && added.is_empty() {
            out.push_str(" keep");
        }
        out
    }
}

fn validate_target(
    s: &StrategyVector,
    player: usize,
    new_strategy: &BTreeSet<usize>,
) -> Result<(), DeviationError> {
    if player >= s.n() {
        return Err(GameError::PlayerOutOfRange(player).into());
    }
    if new_strategy.contains(&player) {
        return Err(GameError::SelfPurchase(player).into());
    }
    if let Some(&t) = new_strategy.iter().find(|&&t| t >= s.n()) {
        return Err(GameError::TargetOutOfRange { player, target: t, n: s.n() }.into());
    }
    Ok(())
}

pub(crate) fn fmt_set(items: &[usize]) -> String {
    let inner: Vec<String> = items.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// Change in the deviating player's cost, by rebuilding the graph.
pub fn cost_delta_recompute(s: &StrategyVector, d: &Deviation) -> CostDelta {
    let before = player_cost(s, d.player).total();
    let after = player_cost(&d.apply(s), d.player).total();
    after.delta_from(before)
}

/// Change in the deviating player's cost. Uses a single bitset BFS from the
/// player when `n <= 64`.
pub fn cost_delta(s: &StrategyVector, d: &Deviation) -> CostDelta {
    if s.n() > mask::MAX_NODES {
        return cost_delta_recompute(s, d);
    }
    let ctx = PlayerContext::new(s, d.player);
    let before = ctx.cost(mask::from_set(s.strategy(d.player)));
    let after = ctx.cost(mask::from_set(&d.new_strategy));
    after.delta_from(before)
}

/// Everything needed to price alternative strategies of one player.
struct PlayerContext {
    adj: Vec<u64>,
    base: u64,
    u: usize,
    alpha: Rational64,
}

impl PlayerContext {
    fn new(s: &StrategyVector, u: usize) -> Self {
        let masks = s.masks();
        PlayerContext {
            adj: mask::adjacency(&masks),
            base: mask::bought_towards(&masks)[u],
            u,
            alpha: s.alpha(),
        }
    }

    fn distance(&self, strategy: u64) -> Option<u64> {
        mask::distance_sum(&self.adj, self.u, self.base | strategy)
    }

    fn cost(&self, strategy: u64) -> Cost {
        match self.distance(strategy) {
            Some(d) => Cost::Finite(
                self.alpha * Rational64::from_integer(strategy.count_ones() as i64)
                    + Rational64::from_integer(d as i64),
            ),
            None => Cost::Infinite,
        }
    }

    /// Components of `G - u`, as masks, that no node bought towards `u`
    /// touches: every finite-cost strategy must hit each of them.
    fn unreached_components(&self) -> Vec<u64> {
        let n = self.adj.len();
        let mut left = if n == 64 { u64::MAX } else { (1u64 << n) - 1 } & !(1u64 << self.u);
        let mut out = Vec::new();
        while left != 0 {
            let start = left & left.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let mut next = 0;
                for v in mask::bits(frontier) {
                    next |= self.adj[v];
                }
                next &= left & !comp;
                comp |= next;
                frontier = next;
            }
            left &= !comp;
            if comp & self.base == 0 {
                out.push(comp);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    pub cost: Cost,
    pub strategy: BTreeSet<usize>,
}

/// Exact minimum of `c_u` over all `2^(n-1)` strategies of `u`. Ties go to the
/// lexicographically smallest strategy.
pub fn best_response(
    s: &StrategyVector,
    u: usize,
    limit: usize,
) -> Result<BestResponse, DeviationError> {
    let n = s.n();
    let limit = limit.min(MAX_EXHAUSTIVE_LIMIT);
    if n > limit {
        return Err(DeviationError::LimitExceeded { n, limit });
    }
    if u >= n {
        return Err(GameError::PlayerOutOfRange(u).into());
    }
    let ctx = PlayerContext::new(s, u);
    let required = ctx.unreached_components();
    let low = (1u64 << u) - 1;
    let mut best: Option<(Cost, u64)> = None;
    for m in 0..1u64 << (n - 1) {
        let strategy = (m & low) | ((m & !low) << 1);
        if required.iter().any(|&c| c & strategy == 0) {
            continue;
        }
        let cost = ctx.cost(strategy);
        let better = match best {
            None => true,
            Some((c, b)) => cost < c || (cost == c && mask::lex_less(strategy, b)),
        };
        if better {
            best = Some((cost, strategy));
        }
    }
    let (cost, strategy) = best.unwrap_or((Cost::Infinite, 0));
    Ok(BestResponse { cost, strategy: mask::to_set(strategy) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    Exact,
    Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Equilibrium,
    NotEquilibrium,
    /// Family mode found no improving deviation; that does not certify a NE.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub deviation: Deviation,
    pub delta: CostDelta,
}

impl Witness {
    pub fn describe(&self, s: &StrategyVector) -> String {
        format!("{}: delta {}", self.deviation.describe(s), self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationVerdict {
    pub status: Status,
    pub method: VerifyMode,
    pub witness: Option<Witness>,
}

impl VerificationVerdict {
    /// `Some(true)` only for certified equilibria, `None` when undecided.
    pub fn is_equilibrium(&self) -> Option<bool> {
        match self.status {
            Status::Equilibrium => Some(true),
            Status::NotEquilibrium => Some(false),
            Status::Undecided => None,
        }
    }
}

/// Exact mode compares every player's best response with the current cost;
/// the witness is the best response of the lowest-id player that improves.
/// Family mode only tries [`family_deviations`].
pub fn is_nash(
    s: &StrategyVector,
    mode: VerifyMode,
    limit: usize,
) -> Result<VerificationVerdict, DeviationError> {
    let witness = match mode {
        VerifyMode::Exact => {
            let limit = limit.min(MAX_EXHAUSTIVE_LIMIT);
            if s.n() > limit {
                return Err(DeviationError::LimitExceeded { n: s.n(), limit });
            }
            let found: Vec<Option<Witness>> = (0..s.n())
                .into_par_iter()
                .map(|u| exact_witness(s, u, limit))
                .collect::<Result<_, _>>()?;
            found.into_iter().flatten().next()
        }
        VerifyMode::Family => (0..s.n()).find_map(|u| family_witness(s, u)),
    };
    let status = match (&witness, mode) {
        (Some(_), _) => Status::NotEquilibrium,
        (None, VerifyMode::Exact) => Status::Equilibrium,
        (None, VerifyMode::Family) => Status::Undecided,
    };
    Ok(VerificationVerdict { status, method: mode, witness })
}

fn exact_witness(
    s: &StrategyVector,
    u: usize,
    limit: usize,
) -> Result<Option<Witness>, DeviationError> {
    let br = best_response(s, u, limit)?;
    let current = player_cost(s, u).total();
    let delta = br.cost.delta_from(current);
    if !delta.is_improving() {
        return Ok(None);
    }
    let deviation = Deviation::new(s, u, br.strategy)?;
    Ok(Some(Witness { deviation, delta }))
}

/// Most improving family deviation of `u`, earliest in generation order on ties.
fn family_witness(s: &StrategyVector, u: usize) -> Option<Witness> {
    let mut best: Option<Witness> = None;
    for d in family_deviations(s, u) {
        let delta = cost_delta(s, &d);
        if !delta.is_improving() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(w) => delta_less(delta, w.delta),
        };
        if better {
            best = Some(Witness { deviation: d, delta });
        }
    }
    best
}

fn delta_less(a: CostDelta, b: CostDelta) -> bool {
    match (a, b) {
        (CostDelta::MinusInfinity, CostDelta::MinusInfinity) => false,
        (CostDelta::MinusInfinity, _) => true,
        (_, CostDelta::MinusInfinity) => false,
        (CostDelta::Finite(x), CostDelta::Finite(y)) => x < y,
        _ => false,
    }
}

/// The named deviation families available to `u`, in the order drop-one,
/// add-one, swap-one, drop-two-buy-one, drop-all-buy-one, two-swap.
///
/// Add-one only targets non-neighbours; swap and buy targets range over every
/// node outside `s_u ∪ {u}`.
pub fn family_deviations(s: &StrategyVector, u: usize) -> Vec<Deviation> {
    let n = s.n();
    let og = build_comm_graph(s);
    let own = s.strategy(u);
    let outside: Vec<usize> = (0..n).filter(|&w| w != u && !own.contains(&w)).collect();
    let owned: Vec<usize> = own.iter().copied().collect();
    let mut out = Vec::new();
    let mut push = |set: BTreeSet<usize>, kind: DeviationKind| {
        out.push(Deviation { player: u, new_strategy: set, kind });
    };

    for &v in &owned {
        let mut t = own.clone();
        t.remove(&v);
        push(t, DeviationKind::DropOne);
    }
    for &w in &outside {
        if !og.graph().has_edge(u, w) {
            let mut t = own.clone();
            t.insert(w);
            push(t, DeviationKind::AddOne);
        }
    }
    for &v in &owned {
        for &w in &outside {
            let mut t = own.clone();
            t.remove(&v);
            t.insert(w);
            push(t, DeviationKind::SwapOne);
        }
    }
    for (i, &v1) in owned.iter().enumerate() {
        for &v2 in &owned[i + 1..] {
            for &w in &outside {
                let mut t = own.clone();
                t.remove(&v1);
                t.remove(&v2);
                t.insert(w);
                push(t, DeviationKind::DropTwoBuyOne);
            }
        }
    }
    if owned.len() >= 3 {
        for &w in &outside {
            push(BTreeSet::from([w]), DeviationKind::DropAllBuyOne);
        }
    }
    for (v, w) in two_swap_targets(s, u) {
        let mut t = own.clone();
        t.remove(&v);
        t.insert(w);
        push(t, DeviationKind::TwoSwap);
    }
    out
}

/// Pairs `(v, w)` such that `u` bought `(u, v)`, `v` is a 2-node of the same
/// component and `v` bought `(v, w)` inside it.
pub fn two_swap_targets(s: &StrategyVector, u: usize) -> Vec<(usize, usize)> {
    let og = build_comm_graph(s);
    let Ok(dec) = bridges_and_components(og.graph()) else {
        return Vec::new();
    };
    let h = &dec.components[dec.component_of(u)];
    let mut out = Vec::new();
    for &v in s.strategy(u) {
        if !h.contains(v) || !is_two_node(&og, &dec, v) || og.buys(v, u) {
            continue;
        }
        let w = h_out(&og, h, v)[0];
        if w != u && !s.strategy(u).contains(&w) {
            out.push((v, w));
        }
    }
    out
}
