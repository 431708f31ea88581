//! Random instance generators shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ncg::game::StrategyVector;
use ncg::graph::{Graph, OwnedGraph};
use num_rational::Rational64;
use rand::Rng;

pub fn q(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// Oriented graph built from a directed edge list, as a strategy vector.
pub fn profile(n: usize, alpha: Rational64, links: &[(usize, usize)]) -> StrategyVector {
    StrategyVector::from_links(n, alpha, links.iter().copied()).unwrap()
}

pub fn rotational_cycle(n: usize, alpha: Rational64) -> StrategyVector {
    StrategyVector::from_links(n, alpha, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Graph {
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.insert((u, v));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Random single-ownership orientation of `g`.
pub fn random_orientation<R: Rng>(rng: &mut R, g: &Graph) -> Vec<(usize, usize)> {
    g.edges()
        .map(|(u, v)| if rng.random_bool(0.5) { (u, v) } else { (v, u) })
        .collect()
}

/// Random purchases: each ordered pair bought with probability `p`.
pub fn random_profile<R: Rng>(rng: &mut R, n: usize, p: f64, alpha: Rational64) -> StrategyVector {
    let mut links = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                links.push((u, v));
            }
        }
    }
    profile(n, alpha, &links)
}

/// Bridgeless core: a cycle of length `cycle_len` plus `ears` paths between
/// existing core nodes, each oriented consistently so its inner nodes are
/// 2-nodes; then `trees` extra nodes hung off random nodes.
pub fn random_host<R: Rng>(
    rng: &mut R,
    cycle_len: usize,
    ears: usize,
    max_ear: usize,
    trees: usize,
) -> OwnedGraph {
    let mut links: Vec<(usize, usize)> = Vec::new();
    let forward = rng.random_bool(0.5);
    for i in 0..cycle_len {
        let j = (i + 1) % cycle_len;
        links.push(if forward { (i, j) } else { (j, i) });
    }
    let mut n = cycle_len;
    for _ in 0..ears {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n);
        while b == a {
            b = rng.random_range(0..n);
        }
        let len = rng.random_range(2..=max_ear.max(2));
        let mut chain = vec![a];
        for _ in 0..len - 1 {
            chain.push(n);
            n += 1;
        }
        chain.push(b);
        if rng.random_bool(0.5) {
            chain.reverse();
        }
        links.extend(chain.windows(2).map(|w| (w[0], w[1])));
    }
    for _ in 0..trees {
        let parent = rng.random_range(0..n);
        links.push(if rng.random_bool(0.5) { (n, parent) } else { (parent, n) });
        n += 1;
    }
    OwnedGraph::from_directed_edges(n, links).unwrap()
}

/// A random 2-path `u_0 .. u_k` (`k >= 2`, `g(G) >= 2k`) of a random host and
/// a swap index `0 <= i <= k-2`.
pub struct TwoPathCase {
    pub strategies: StrategyVector,
    pub path: Vec<usize>,
    pub i: usize,
}

pub fn random_two_path_case<R: Rng>(rng: &mut R) -> Option<TwoPathCase> {
    let cycle_len = rng.random_range(6..=16);
    let ears = rng.random_range(0..=2);
    let trees = rng.random_range(0..=6);
    let og = random_host(rng, cycle_len, ears, 9, trees);
    let g = og.graph();
    let girth = ncg::graph::girth(g)?;
    let dec = ncg::graph::bridges_and_components(g).ok()?;
    let mut windows: Vec<Vec<usize>> = Vec::new();
    for h in dec.nontrivial() {
        for run in ncg::graph::maximal_two_paths(&og, &dec, h) {
            let nodes = &run.nodes;
            let m = nodes.len();
            if run.closed {
                for start in 0..m {
                    for k in 2..m {
                        if 2 * k <= girth {
                            windows.push((0..=k).map(|j| nodes[(start + j) % m]).collect());
                        }
                    }
                }
            } else {
                for start in 0..m {
                    for k in 2..m - start {
                        if 2 * k <= girth {
                            windows.push(nodes[start..=start + k].to_vec());
                        }
                    }
                }
            }
        }
    }
    if windows.is_empty() {
        return None;
    }
    let path = windows.swap_remove(rng.random_range(0..windows.len()));
    let k = path.len() - 1;
    let i = rng.random_range(0..=k - 2);
    let strategies = StrategyVector::new(q(1), og.purchases()).unwrap();
    Some(TwoPathCase { strategies, path, i })
}
