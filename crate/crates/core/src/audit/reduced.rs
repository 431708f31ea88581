//! Reduced multigraph `H'` of a 2-edge-connected component: nodes of
//! `H`-degree at least three, one edge per maximal chain of degree-2 nodes.

use std::collections::BTreeSet;

use crate::graph::{OwnedGraph, TwoEdgeComponent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedEdge {
    /// Chain endpoints; when `oriented`, in buying direction.
    pub ends: (usize, usize),
    /// Degree-2 nodes along the chain, in order from `ends.0`.
    pub internal: Vec<usize>,
    /// Every link of the chain bought once, all in the same direction.
    pub oriented: bool,
}

impl ReducedEdge {
    /// `w(e)`: number of internal nodes.
    pub fn weight(&self) -> usize {
        self.internal.len()
    }

    /// `ends.0, internal..., ends.1`.
    pub fn chain(&self) -> Vec<usize> {
        let mut c = vec![self.ends.0];
        c.extend(&self.internal);
        c.push(self.ends.1);
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedDigraph {
    /// `H_{>=3}`, ascending.
    pub nodes: Vec<usize>,
    pub edges: Vec<ReducedEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReducedError {
    /// Fewer than three nodes.
    Trivial,
    /// Every node has degree two: `H` is a bare cycle and `H'` has no nodes.
    BareCycle(Vec<usize>),
}

impl ReducedDigraph {
    /// `m = |H_{>=3}|`.
    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn weight_sum(&self) -> usize {
        self.edges.iter().map(ReducedEdge::weight).sum()
    }

    /// Edges of `H''` (positive weight).
    pub fn positive(&self) -> impl Iterator<Item = &ReducedEdge> {
        self.edges.iter().filter(|e| e.weight() > 0)
    }

    /// A cycle of `H''` as a list of edges, or `None` when `H''` is a forest.
    /// Loops and parallel chains count as cycles.
    pub fn forest_violation(&self) -> Option<Vec<&ReducedEdge>> {
        let idx = |v: usize| self.nodes.binary_search(&v).expect("chain end in H'");
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut accepted: Vec<&ReducedEdge> = Vec::new();
        for e in self.positive() {
            let (a, b) = (idx(e.ends.0), idx(e.ends.1));
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                accepted.push(e);
                continue;
            }
            // the tree path from a to b closes the cycle
            let mut path = forest_path(&accepted, e.ends.0, e.ends.1);
            path.push(e);
            return Some(path);
        }
        None
    }
}

fn forest_path<'a>(edges: &[&'a ReducedEdge], from: usize, to: usize) -> Vec<&'a ReducedEdge> {
    if from == to {
        return Vec::new();
    }
    let mut stack: Vec<(usize, Vec<&ReducedEdge>)> = vec![(from, Vec::new())];
    let mut seen = BTreeSet::from([from]);
    while let Some((x, path)) = stack.pop() {
        for &e in edges {
            let y = match e.ends {
                (a, b) if a == x => b,
                (a, b) if b == x => a,
                _ => continue,
            };
            if !seen.insert(y) {
                continue;
            }
            let mut p = path.clone();
            p.push(e);
            if y == to {
                return p;
            }
            stack.push((y, p));
        }
    }
    Vec::new()
}

/// Builds `H'` for the component `h`.
pub fn build_reduced(g: &OwnedGraph, h: &TwoEdgeComponent) -> Result<ReducedDigraph, ReducedError> {
    if !h.is_nontrivial() {
        return Err(ReducedError::Trivial);
    }
    let graph = g.graph();
    let hn = |v: usize| -> Vec<usize> {
        graph.neighbors(v).iter().copied().filter(|&w| h.contains(w)).collect()
    };
    let nodes: Vec<usize> = h.nodes().iter().copied().filter(|&v| hn(v).len() >= 3).collect();
    if nodes.is_empty() {
        let mut cycle = vec![h.nodes()[0]];
        let mut prev = usize::MAX;
        loop {
            let cur = *cycle.last().unwrap();
            let next = hn(cur).into_iter().find(|&w| w != prev).unwrap();
            if next == cycle[0] {
                break;
            }
            prev = cur;
            cycle.push(next);
        }
        return Err(ReducedError::BareCycle(cycle));
    }
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut edges = Vec::new();
    for &a in &nodes {
        for b in hn(a) {
            if used.contains(&(a, b)) {
                continue;
            }
            let mut internal = Vec::new();
            let (mut prev, mut cur) = (a, b);
            while hn(cur).len() == 2 {
                internal.push(cur);
                let next = hn(cur).into_iter().find(|&w| w != prev).unwrap();
                prev = cur;
                cur = next;
            }
            used.insert((a, b));
            used.insert((cur, prev));
            let mut chain = vec![a];
            chain.extend(&internal);
            chain.push(cur);
            let single = |x: usize, y: usize| g.buys(x, y) && !g.buys(y, x);
            let forward = chain.windows(2).all(|w| single(w[0], w[1]));
            let backward = chain.windows(2).all(|w| single(w[1], w[0]));
            let edge = if backward && !forward {
                internal.reverse();
                ReducedEdge { ends: (cur, a), internal, oriented: true }
            } else {
                ReducedEdge { ends: (a, cur), internal, oriented: forward }
            };
            edges.push(edge);
        }
    }
    Ok(ReducedDigraph { nodes, edges })
}
