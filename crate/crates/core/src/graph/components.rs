use std::collections::BTreeSet;

use num_rational::Rational64;

use super::{Graph, GraphError};

/// Maximal 2-edge-connected subgraph together with the hanging-tree weights
/// `|T(u)|` of its nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoEdgeComponent {
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
    weights: Vec<usize>,
}

impl TwoEdgeComponent {
    /// Sorted node list.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Internal edges as `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// At least three nodes (a simple graph has no 2-node bridgeless component).
    pub fn is_nontrivial(&self) -> bool {
        self.nodes.len() >= 3
    }

    pub fn contains(&self, u: usize) -> bool {
        self.nodes.binary_search(&u).is_ok()
    }

    /// `|T(u)|`, or `None` if `u` is not in the component.
    pub fn weight(&self, u: usize) -> Option<usize> {
        self.nodes.binary_search(&u).ok().map(|i| self.weights[i])
    }

    pub fn weights(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Average degree `2|E(H)| / |V(H)|`.
    pub fn average_degree(&self) -> Rational64 {
        Rational64::new(2 * self.edges.len() as i64, self.nodes.len() as i64)
    }

    /// `deg_H(u)` computed from the host graph.
    pub fn degree_in(&self, g: &Graph, u: usize) -> usize {
        g.neighbors(u).iter().filter(|&&v| self.contains(v)).count()
    }
}

/// Bridges and 2-edge-connected components of a connected graph.
#[derive(Debug, Clone)]
pub struct EdgeDecomposition {
    pub bridges: BTreeSet<(usize, usize)>,
    pub components: Vec<TwoEdgeComponent>,
    component_of: Vec<usize>,
}

impl EdgeDecomposition {
    /// Index into `components` of the component holding `u`.
    pub fn component_of(&self, u: usize) -> usize {
        self.component_of[u]
    }

    pub fn is_bridge(&self, u: usize, v: usize) -> bool {
        self.bridges.contains(&(u.min(v), u.max(v)))
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &TwoEdgeComponent> {
        self.components.iter().filter(|c| c.is_nontrivial())
    }

    /// Nodes of `T(u)`: those reachable from `u` without entering another
    /// node of `u`'s component. Sorted.
    pub fn hanging_tree(&self, g: &Graph, u: usize) -> Vec<usize> {
        let id = self.component_of[u];
        let (dist, _) =
            super::bfs_avoiding(g, u, |v| v != u && self.component_of[v] == id);
        let mut nodes: Vec<usize> = (0..g.n()).filter(|&v| dist[v].is_some()).collect();
        nodes.sort_unstable();
        nodes
    }
}

/// Bridges by the low-link method (iterative DFS), then components of
/// `G - bridges`, then `|T(u)|` from subtree sizes of the bridge tree.
pub fn bridges_and_components(g: &Graph) -> Result<EdgeDecomposition, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let n = g.n();
    let bridges = find_bridges(g);

    let mut component_of = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut members = vec![start];
        component_of[start] = id;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if component_of[y] == usize::MAX && !bridges.contains(&(x.min(y), x.max(y))) {
                    component_of[y] = id;
                    members.push(y);
                    stack.push(y);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }

    let side_size = bridge_tree_sides(g, &bridges, &component_of, &groups);

    let components = groups
        .into_iter()
        .enumerate()
        .map(|(id, nodes)| {
            let edges = nodes
                .iter()
                .flat_map(|&u| {
                    g.neighbors(u)
                        .iter()
                        .copied()
                        .filter(move |&v| u < v)
                        .map(move |v| (u, v))
                })
                .filter(|&(_, v)| component_of[v] == id)
                .collect();
            let weights = nodes
                .iter()
                .map(|&u| {
                    1 + g
                        .neighbors(u)
                        .iter()
                        .filter(|&&x| component_of[x] != id)
                        .map(|&x| side_size(id, component_of[x]))
                        .sum::<usize>()
                })
                .collect();
            TwoEdgeComponent { nodes, edges, weights }
        })
        .collect();

    Ok(EdgeDecomposition { bridges, components, component_of })
}

/// In the tree whose nodes are components and whose edges are bridges, returns
/// a function giving the number of graph nodes on `to`'s side of the tree edge
/// `from - to`.
fn bridge_tree_sides(
    g: &Graph,
    bridges: &BTreeSet<(usize, usize)>,
    component_of: &[usize],
    groups: &[Vec<usize>],
) -> impl Fn(usize, usize) -> usize {
    let k = groups.len();
    let mut tree = vec![Vec::new(); k];
    for &(u, v) in bridges {
        tree[component_of[u]].push(component_of[v]);
        tree[component_of[v]].push(component_of[u]);
    }
    let mut parent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    let mut seen = vec![false; k];
    let mut stack = Vec::new();
    if k > 0 {
        seen[0] = true;
        stack.push(0);
    }
    while let Some(c) = stack.pop() {
        order.push(c);
        for &d in &tree[c] {
            if !seen[d] {
                seen[d] = true;
                parent[d] = c;
                stack.push(d);
            }
        }
    }
    let mut subtree: Vec<usize> = groups.iter().map(Vec::len).collect();
    for &c in order.iter().rev() {
        if parent[c] != usize::MAX {
            subtree[parent[c]] += subtree[c];
        }
    }
    let n = g.n();
    move |from: usize, to: usize| {
        if parent[to] == from {
            subtree[to]
        } else {
            n - subtree[from]
        }
    }
}

fn find_bridges(g: &Graph) -> BTreeSet<(usize, usize)> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut bridges = BTreeSet::new();
    let mut clock = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (node, parent, next neighbor index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = clock;
        low[root] = clock;
        clock += 1;
        while let Some(&mut (x, parent, ref mut next)) = stack.last_mut() {
            if let Some(&y) = g.neighbors(x).get(*next) {
                *next += 1;
                if y == parent {
                    continue;
                }
                if disc[y] == usize::MAX {
                    disc[y] = clock;
                    low[y] = clock;
                    clock += 1;
                    stack.push((y, x, 0));
                } else {
                    low[x] = low[x].min(disc[y]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[x]);
                    if low[x] > disc[parent] {
                        bridges.insert((x.min(parent), x.max(parent)));
                    }
                }
            }
        }
    }
    bridges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles_joined_by_bridge() {
        // a=0 b=1 c=2 / d=3 e=4 f=5, bridge c-d
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)])
            .unwrap();
        let dec = bridges_and_components(&g).unwrap();
        assert_eq!(dec.bridges, BTreeSet::from([(2, 3)]));
        assert_eq!(dec.components.len(), 2);
        let first = &dec.components[dec.component_of(0)];
        assert_eq!(first.nodes(), &[0, 1, 2]);
        assert_eq!(first.weights().collect::<Vec<_>>(), vec![(0, 1), (1, 1), (2, 4)]);
        let second = &dec.components[dec.component_of(3)];
        assert_eq!(second.nodes(), &[3, 4, 5]);
        assert_eq!(second.weight(3), Some(4));
    }

    #[test]
    fn cycle_is_one_component() {
        let dec = bridges_and_components(&Graph::cycle(5)).unwrap();
        assert!(dec.bridges.is_empty());
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.components[0].len(), 5);
        assert!(dec.components[0].weights().all(|(_, w)| w == 1));
    }

    #[test]
    fn path_is_all_bridges() {
        let dec = bridges_and_components(&Graph::path(4)).unwrap();
        assert_eq!(dec.bridges.len(), 3);
        assert_eq!(dec.nontrivial().count(), 0);
        assert!(dec.components.iter().all(|c| c.weight(c.nodes()[0]) == Some(4)));
    }

    #[test]
    fn disconnected_rejected() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(bridges_and_components(&g).unwrap_err(), GraphError::Disconnected);
    }

    #[test]
    fn long_path_does_not_overflow_stack() {
        let dec = bridges_and_components(&Graph::path(20_000)).unwrap();
        assert_eq!(dec.bridges.len(), 19_999);
    }
}
