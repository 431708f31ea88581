//! Undirected simple graphs and the ownership-annotated view used by the game.
//!
//! Distances are `Option<usize>`: `None` is the unreachable sentinel, so a sum
//! over a disconnected graph can never masquerade as a large finite value.

mod components;
mod cycles;
mod two_paths;

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

pub use components::{bridges_and_components, EdgeDecomposition, TwoEdgeComponent};
pub use cycles::{
    girth, is_directed_cycle, is_minimal_cycle, minimal_cycle_through, CyclePath,
};
pub use two_paths::{h_in, h_out, is_two_node, maximal_two_paths, TwoPathRun};

/// Hop distance, `None` when unreachable.
pub type Dist = Option<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node {node} out of range for graph on {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("{0}-{1} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("power exponent must be at least 1")]
    ZeroPower,
}

/// Simple undirected graph on nodes `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    fn try_add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::NodeOutOfRange { node: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Err(GraphError::ParallelEdge(u.min(v), u.max(v))),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                Ok(())
            }
        }
    }

    /// Adds `uv` unless it is already present. Panics on loops or bad ids.
    pub(crate) fn add_edge_if_absent(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n() && v < self.n());
        if let Err(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(pos, v);
            let pos = self.adj[v].binary_search(&u).unwrap_err();
            self.adj[v].insert(pos, u);
        }
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least three nodes");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
            .expect("clique is simple")
    }

    /// Star with center 0.
    pub fn star(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|v| (0, v))).expect("star is simple")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().copied().filter(move |&v| u < v).map(move |v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || bfs_distances(self, 0).iter().all(Option::is_some)
    }

    pub fn is_tree(&self) -> bool {
        self.n() >= 1 && self.edge_count() == self.n() - 1 && self.is_connected()
    }

    /// All-pairs distances, one BFS per node.
    pub fn distance_matrix(&self) -> Vec<Vec<Dist>> {
        (0..self.n()).map(|u| bfs_distances(self, u)).collect()
    }

    /// `None` when the graph is disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for u in 0..self.n() {
            for d in bfs_distances(self, u) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// Sum of distances from `u` to every other node, `None` if some node is unreachable.
    pub fn distance_sum(&self, u: usize) -> Option<u64> {
        bfs_distances(self, u)
            .into_iter()
            .try_fold(0u64, |acc, d| d.map(|d| acc + d as u64))
    }

    /// Subgraph induced by `nodes`, relabeled to `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let index: std::collections::HashMap<usize, usize> =
            nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut h = Graph::empty(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            for w in self.neighbors(v) {
                if let Some(&j) = index.get(w) {
                    if i < j {
                        h.add_edge_if_absent(i, j);
                    }
                }
            }
        }
        h
    }

    /// Copy of the graph without the edge `uv`.
    pub fn without_edge(&self, u: usize, v: usize) -> Graph {
        let mut g = self.clone();
        g.adj[u].retain(|&x| x != v);
        g.adj[v].retain(|&x| x != u);
        g
    }
}

/// Exact unweighted distances from `source`.
pub fn bfs_distances(g: &Graph, source: usize) -> Vec<Dist> {
    bfs_avoiding(g, source, |_| false).0
}

/// BFS that never enters nodes for which `blocked` holds (the source is always
/// entered). Returns distances and BFS parents.
pub(crate) fn bfs_avoiding<F>(g: &Graph, source: usize, blocked: F) -> (Vec<Dist>, Vec<Option<usize>>)
where
    F: Fn(usize) -> bool,
{
    let n = g.n();
    let mut dist = vec![None; n];
    let mut parent = vec![None; n];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].unwrap();
        for &y in g.neighbors(x) {
            if dist[y].is_none() && !blocked(y) {
                dist[y] = Some(dx + 1);
                parent[y] = Some(x);
                queue.push_back(y);
            }
        }
    }
    (dist, parent)
}

/// Walks BFS parents back from `target` to the search source.
pub(crate) fn trace_path(parent: &[Option<usize>], target: usize) -> Vec<usize> {
    let mut path = vec![target];
    let mut cur = target;
    while let Some(p) = parent[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    path
}

/// `G^k`: same nodes, `uv` an edge iff `0 < d(u, v) <= k`.
pub fn graph_power(g: &Graph, k: usize) -> Result<Graph, GraphError> {
    if k == 0 {
        return Err(GraphError::ZeroPower);
    }
    let mut adj = vec![Vec::new(); g.n()];
    for (u, row) in adj.iter_mut().enumerate() {
        for (v, d) in bfs_distances(g, u).into_iter().enumerate() {
            if matches!(d, Some(d) if d > 0 && d <= k) {
                row.push(v);
            }
        }
    }
    Ok(Graph { adj })
}

/// Who paid for an edge of the communication graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ownership {
    Single(usize),
    /// Both endpoints bought the link; it exists once but is billed twice.
    Both,
}

/// Communication graph together with the directed "who bought what" view.
///
/// `bought[u]` lists the endpoints `u` paid for. A link bought from both sides
/// appears in both lists and once in the undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnedGraph {
    graph: Graph,
    bought: Vec<Vec<usize>>,
}

impl OwnedGraph {
    pub fn from_purchases(purchases: &[BTreeSet<usize>]) -> Result<Self, GraphError> {
        let n = purchases.len();
        let mut graph = Graph::empty(n);
        let mut bought = Vec::with_capacity(n);
        for (u, set) in purchases.iter().enumerate() {
            for &v in set {
                if v >= n {
                    return Err(GraphError::NodeOutOfRange { node: v, n });
                }
                if v == u {
                    return Err(GraphError::SelfLoop(u));
                }
                graph.add_edge_if_absent(u, v);
            }
            bought.push(set.iter().copied().collect());
        }
        Ok(OwnedGraph { graph, bought })
    }

    /// Orients each edge `(u, v)` of the list as bought by `u`.
    pub fn from_directed_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut purchases = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(GraphError::NodeOutOfRange { node: u, n });
            }
            purchases[u].insert(v);
        }
        OwnedGraph::from_purchases(&purchases)
    }

    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Endpoints bought by `u`, sorted.
    #[inline]
    pub fn bought_by(&self, u: usize) -> &[usize] {
        &self.bought[u]
    }

    /// True if `u` paid for the link to `v` (directed edge `(u, v)`).
    pub fn buys(&self, u: usize, v: usize) -> bool {
        self.bought[u].binary_search(&v).is_ok()
    }

    pub fn owner(&self, u: usize, v: usize) -> Option<Ownership> {
        match (self.buys(u, v), self.buys(v, u)) {
            (true, true) => Some(Ownership::Both),
            (true, false) => Some(Ownership::Single(u)),
            (false, true) => Some(Ownership::Single(v)),
            (false, false) => None,
        }
    }

    pub fn double_bought_edges(&self) -> Vec<(usize, usize)> {
        self.graph
            .edges()
            .filter(|&(u, v)| self.owner(u, v) == Some(Ownership::Both))
            .collect()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.bought[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.graph.neighbors(v).iter().filter(|&&u| self.buys(u, v)).count()
    }

    /// `deg^+_X(v)`: links bought by `v` towards nodes of `X`.
    pub fn out_degree_within<F: Fn(usize) -> bool>(&self, v: usize, in_x: F) -> usize {
        self.bought[v].iter().filter(|&&u| in_x(u)).count()
    }

    /// `deg^-_X(v)`: links bought towards `v` by nodes of `X`.
    pub fn in_degree_within<F: Fn(usize) -> bool>(&self, v: usize, in_x: F) -> usize {
        self.graph
            .neighbors(v)
            .iter()
            .filter(|&&u| in_x(u) && self.buys(u, v))
            .count()
    }

    pub fn purchases(&self) -> Vec<BTreeSet<usize>> {
        self.bought.iter().map(|b| b.iter().copied().collect()).collect()
    }
}
