use std::collections::{BTreeSet, VecDeque};

use super::{bfs_avoiding, bfs_distances, trace_path, Graph, GraphError, OwnedGraph};

/// Cycle `u_0 - u_1 - ... - u_{k-1} - u_0` of a host graph, `k >= 3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclePath(Vec<usize>);

impl CyclePath {
    /// Validates distinct nodes, consecutive adjacency and the closing edge.
    pub fn new(g: &Graph, nodes: Vec<usize>) -> Result<Self, GraphError> {
        if nodes.len() < 3 {
            return Err(GraphError::NotACycle(format!(
                "length {} < 3 (simple graphs have no 2-cycles)",
                nodes.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for &v in &nodes {
            if v >= g.n() {
                return Err(GraphError::NodeOutOfRange { node: v, n: g.n() });
            }
            if !seen.insert(v) {
                return Err(GraphError::NotACycle(format!("node {v} repeated")));
            }
        }
        let k = nodes.len();
        for i in 0..k {
            let (a, b) = (nodes[i], nodes[(i + 1) % k]);
            if !g.has_edge(a, b) {
                return Err(GraphError::NotACycle(format!("{a}-{b} is not an edge")));
            }
        }
        Ok(CyclePath(nodes))
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Consecutive pairs `(u_i, u_{i+1})`, indices mod `k`.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.0.len();
        (0..k).map(move |i| (self.0[i], self.0[(i + 1) % k]))
    }

    /// Rotation/reflection-independent form, for de-duplication.
    pub fn canonical(&self) -> Vec<usize> {
        let k = self.0.len();
        let start = (0..k).min_by_key(|&i| self.0[i]).unwrap();
        let fwd: Vec<usize> = (0..k).map(|i| self.0[(start + i) % k]).collect();
        let bwd: Vec<usize> = (0..k).map(|i| self.0[(start + k - i) % k]).collect();
        fwd.min(bwd)
    }

    fn cycle_distance(&self, i: usize, j: usize) -> usize {
        let k = self.0.len();
        let d = i.abs_diff(j);
        d.min(k - d)
    }
}

/// Shortest cycle length, `None` for forests.
///
/// BFS from every root; a non-tree edge `xy` closes a walk of length
/// `d(x) + d(y) + 1` through the root and the minimum over all roots is exact.
pub fn girth(g: &Graph) -> Option<usize> {
    let n = g.n();
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        parent[root] = usize::MAX;
        queue.clear();
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            if let Some(b) = best {
                if 2 * dist[x] >= b {
                    break;
                }
            }
            for &y in g.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    queue.push_back(y);
                } else if parent[x] != y {
                    let len = dist[x] + dist[y] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// True iff `d_G(u, v) = d_C(u, v)` for all nodes of the cycle.
pub fn is_minimal_cycle(g: &Graph, c: &CyclePath) -> Result<bool, GraphError> {
    let c = CyclePath::new(g, c.0.clone())?;
    for (i, &u) in c.0.iter().enumerate() {
        let dist = bfs_distances(g, u);
        for (j, &v) in c.0.iter().enumerate().skip(i + 1) {
            if dist[v] != Some(c.cycle_distance(i, j)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff every edge of the cycle was bought in the same rotational sense.
/// A link bought by both endpoints counts for both orientations.
pub fn is_directed_cycle(g: &OwnedGraph, c: &CyclePath) -> Result<bool, GraphError> {
    let c = CyclePath::new(g.graph(), c.0.clone())?;
    let forward = c.steps().all(|(a, b)| g.buys(a, b));
    let backward = c.steps().all(|(a, b)| g.buys(b, a));
    Ok(forward || backward)
}

/// A minimum-perimeter cycle through the edge `uv`: `u`, then a shortest
/// `u`-`v` path in `G - uv`. `None` iff `uv` is a bridge.
pub fn minimal_cycle_through(
    g: &Graph,
    (u, v): (usize, usize),
) -> Result<Option<CyclePath>, GraphError> {
    if !g.has_edge(u, v) {
        return Err(GraphError::NotAnEdge(u, v));
    }
    let without = g.without_edge(u, v);
    let (dist, parent) = bfs_avoiding(&without, u, |_| false);
    if dist[v].is_none() {
        return Ok(None);
    }
    // u, ..., v closes back to u over the removed edge.
    let nodes = trace_path(&parent, v);
    Ok(Some(CyclePath(nodes)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn girth_examples() {
        assert_eq!(girth(&Graph::cycle(5)), Some(5));
        assert_eq!(girth(&Graph::complete(4)), Some(3));
        assert_eq!(girth(&Graph::path(7)), None);
        assert_eq!(girth(&Graph::star(6)), None);
        assert_eq!(girth(&Graph::empty(3)), None);
        // Petersen graph has girth 5
        let petersen = Graph::from_edges(
            10,
            [
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
            ],
        )
        .unwrap();
        assert_eq!(girth(&petersen), Some(5));
    }

    #[test]
    fn minimal_cycles() {
        let c4 = Graph::cycle(4);
        let c = CyclePath::new(&c4, vec![0, 1, 2, 3]).unwrap();
        assert!(is_minimal_cycle(&c4, &c).unwrap());

        let k4 = Graph::complete(4);
        let c = CyclePath::new(&k4, vec![0, 1, 2, 3]).unwrap();
        assert!(!is_minimal_cycle(&k4, &c).unwrap());

        let tri = CyclePath::new(&k4, vec![0, 2, 3]).unwrap();
        assert!(is_minimal_cycle(&k4, &tri).unwrap());
    }

    #[test]
    fn cycle_validation() {
        let c4 = Graph::cycle(4);
        assert!(CyclePath::new(&c4, vec![0, 1]).is_err());
        assert!(CyclePath::new(&c4, vec![0, 1, 0]).is_err());
        assert!(CyclePath::new(&c4, vec![0, 2, 3]).is_err());
    }

    #[test]
    fn directed_cycles() {
        let rot = OwnedGraph::from_directed_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let c = CyclePath::new(rot.graph(), vec![0, 1, 2, 3, 4]).unwrap();
        assert!(is_directed_cycle(&rot, &c).unwrap());
        let rev = CyclePath::new(rot.graph(), vec![4, 3, 2, 1, 0]).unwrap();
        assert!(is_directed_cycle(&rot, &rev).unwrap());

        let c4 = OwnedGraph::from_directed_edges(4, [(0, 1), (0, 3), (1, 2), (2, 3)]).unwrap();
        let c = CyclePath::new(c4.graph(), vec![0, 1, 2, 3]).unwrap();
        assert!(!is_directed_cycle(&c4, &c).unwrap());
    }

    #[test]
    fn cycle_through_edge() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert_eq!(minimal_cycle_through(&g, (2, 3)).unwrap(), None);
        assert_eq!(minimal_cycle_through(&g, (1, 3)), Err(GraphError::NotAnEdge(1, 3)));

        let c5 = Graph::cycle(5);
        let c = minimal_cycle_through(&c5, (0, 1)).unwrap().unwrap();
        assert_eq!(c.canonical(), vec![0, 1, 2, 3, 4]);

        // theta: hubs a=0, b=1; path 0-2-1 (length 2) and 0-3-4-1 (length 3)
        let theta = Graph::from_edges(5, [(0, 2), (2, 1), (0, 3), (3, 4), (4, 1)]).unwrap();
        let c = minimal_cycle_through(&theta, (0, 2)).unwrap().unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.canonical(), vec![0, 2, 1, 4, 3]);
    }
}
