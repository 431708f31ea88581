//! Branching patterns: an `H`-path `u_0 .. u_k` rich in 2-nodes whose end
//! `u_k` starts two disjoint outgoing 2-paths of a minimum length.

use std::collections::BTreeSet;

use crate::graph::{h_out, is_two_node, EdgeDecomposition, OwnedGraph, TwoEdgeComponent};

/// How the length bound on `u_0 .. u_k` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathBound {
    /// At most `k` edges.
    Edges(usize),
    /// At most `k` internal nodes, i.e. `k + 1` edges.
    Internal(usize),
}

impl PathBound {
    fn max_edges(self) -> usize {
        match self {
            PathBound::Edges(k) => k,
            PathBound::Internal(k) => k + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchingRule {
    pub bound: PathBound,
    /// 2-nodes required on `u_0 .. u_{k-1}`.
    pub min_two_nodes: usize,
    /// Edges each outgoing 2-path must have.
    pub branch_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingPattern {
    pub path: Vec<usize>,
    pub two_nodes: Vec<usize>,
    /// Two outgoing 2-paths, each starting at the terminal `u_k`.
    pub branches: [Vec<usize>; 2],
}

/// Outgoing 2-paths of exactly `len` edges from `t`: `t` buys the first
/// link, and every node strictly inside is a 2-node followed along its
/// bought link.
fn outgoing(g: &OwnedGraph, dec: &EdgeDecomposition, h: &TwoEdgeComponent, t: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    'first: for v in h_out(g, h, t) {
        let mut chain = vec![t, v];
        while chain.len() <= len {
            let cur = *chain.last().unwrap();
            if !is_two_node(g, dec, cur) {
                continue 'first;
            }
            let next = h_out(g, h, cur)[0];
            if chain.contains(&next) {
                continue 'first;
            }
            chain.push(next);
        }
        out.push(chain);
    }
    out
}

/// First pattern in (terminal, path) order, or `None`.
pub fn find_branching(
    g: &OwnedGraph,
    dec: &EdgeDecomposition,
    h: &TwoEdgeComponent,
    rule: BranchingRule,
) -> Option<BranchingPattern> {
    let graph = g.graph();
    let max_edges = rule.bound.max_edges();
    for &t in h.nodes() {
        let branches = outgoing(g, dec, h, t, rule.branch_len);
        if branches.len() < 2 {
            continue;
        }
        // paths grown backwards from t
        let mut stack: Vec<Vec<usize>> = vec![vec![t]];
        while let Some(rev) = stack.pop() {
            if rev.len() > 1 {
                let two_nodes: Vec<usize> =
                    rev[1..].iter().rev().copied().filter(|&v| is_two_node(g, dec, v)).collect();
                if two_nodes.len() >= rule.min_two_nodes {
                    if let Some(pair) = disjoint_pair(&branches, &rev) {
                        let mut path = rev.clone();
                        path.reverse();
                        return Some(BranchingPattern { path, two_nodes, branches: pair });
                    }
                }
            }
            if rev.len() > max_edges {
                continue;
            }
            let last = *rev.last().unwrap();
            let mut next: Vec<usize> = graph
                .neighbors(last)
                .iter()
                .copied()
                .filter(|&w| h.contains(w) && !rev.contains(&w))
                .collect();
            next.sort_unstable_by(|a, b| b.cmp(a));
            for w in next {
                let mut p = rev.clone();
                p.push(w);
                stack.push(p);
            }
        }
    }
    None
}

fn disjoint_pair(branches: &[Vec<usize>], path: &[usize]) -> Option<[Vec<usize>; 2]> {
    let on_path: BTreeSet<usize> = path[1..].iter().copied().collect();
    let ok: Vec<&Vec<usize>> =
        branches.iter().filter(|b| b[1..].iter().all(|v| !on_path.contains(v))).collect();
    for (i, a) in ok.iter().enumerate() {
        for b in &ok[i + 1..] {
            if a[1..].iter().all(|v| !b[1..].contains(v)) {
                return Some([a.to_vec(), b.to_vec()]);
            }
        }
    }
    None
}
