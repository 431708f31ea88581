//! Bitset helpers for graphs on at most 64 nodes. Used by exhaustive
//! enumeration where allocating adjacency lists per candidate is too slow.

use std::collections::BTreeSet;

pub(crate) const MAX_NODES: usize = 64;

pub(crate) fn from_set(s: &BTreeSet<usize>) -> u64 {
    s.iter().fold(0u64, |m, &v| m | 1 << v)
}

pub(crate) fn to_set(mut m: u64) -> BTreeSet<usize> {
    let mut s = BTreeSet::new();
    while m != 0 {
        s.insert(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    s
}

pub(crate) fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// Undirected adjacency from per-player purchase masks.
pub(crate) fn adjacency(purchases: &[u64]) -> Vec<u64> {
    let mut adj = purchases.to_vec();
    for (u, &m) in purchases.iter().enumerate() {
        for v in bits(m) {
            adj[v] |= 1 << u;
        }
    }
    adj
}

/// For each `u`, the players that bought a link to `u`.
pub(crate) fn bought_towards(purchases: &[u64]) -> Vec<u64> {
    let mut base = vec![0u64; purchases.len()];
    for (u, &m) in purchases.iter().enumerate() {
        for v in bits(m) {
            base[v] |= 1 << u;
        }
    }
    base
}

/// `D(u)` when `u`'s neighbourhood is `own` and every other node keeps its
/// adjacency from `adj` (edges into `u` are irrelevant once `u` is the source).
pub(crate) fn distance_sum(adj: &[u64], u: usize, own: u64) -> Option<u64> {
    let n = adj.len();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut seen = 1u64 << u | own;
    let mut frontier = own & !(1u64 << u);
    let mut depth = 1u64;
    let mut total = 0u64;
    while frontier != 0 {
        total += depth * frontier.count_ones() as u64;
        let mut next = 0u64;
        for v in bits(frontier) {
            next |= adj[v];
        }
        next &= !seen;
        seen |= next;
        frontier = next;
        depth += 1;
    }
    (seen == all).then_some(total)
}

/// Orders sets by their sorted element lists, lexicographically.
pub(crate) fn lex_less(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let c = (a ^ b) & (a ^ b).wrapping_neg();
    if a & c != 0 {
        // a has the first differing element; b either has a larger one or ends.
        b & !(c | (c - 1)) != 0
    } else {
        a & !(c | (c - 1)) == 0
    }
}
