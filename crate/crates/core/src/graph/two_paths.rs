use super::{EdgeDecomposition, OwnedGraph, TwoEdgeComponent};

/// Endpoints `v` bought towards nodes of `h`.
pub fn h_out(g: &OwnedGraph, h: &TwoEdgeComponent, v: usize) -> Vec<usize> {
    g.bought_by(v).iter().copied().filter(|&w| h.contains(w)).collect()
}

/// Nodes of `h` that bought a link towards `v`.
pub fn h_in(g: &OwnedGraph, h: &TwoEdgeComponent, v: usize) -> Vec<usize> {
    g.graph()
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&w| h.contains(w) && g.buys(w, v))
        .collect()
}

/// `deg^+_H(v) = deg^-_H(v) = 1` inside a non-trivial component.
pub fn is_two_node(g: &OwnedGraph, dec: &EdgeDecomposition, v: usize) -> bool {
    let h = &dec.components[dec.component_of(v)];
    h.is_nontrivial()
        && h.degree_in(g.graph(), v) == 2
        && h_out(g, h, v).len() == 1
        && h_in(g, h, v).len() == 1
}

/// A maximal 2-path `u_0 - ... - u_k` oriented so that `u_i` bought
/// `(u_i, u_{i+1})`, with at least one internal node. When every node of a
/// cycle is a 2-node the run is `closed` and `nodes` lists the cycle once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPathRun {
    pub nodes: Vec<usize>,
    pub closed: bool,
}

impl TwoPathRun {
    /// Edge count; for a closed run, the cycle length.
    pub fn len(&self) -> usize {
        if self.closed {
            self.nodes.len()
        } else {
            self.nodes.len() - 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Internal (2-node) positions.
    pub fn internal(&self) -> &[usize] {
        if self.closed {
            &self.nodes
        } else {
            &self.nodes[1..self.nodes.len() - 1]
        }
    }
}

/// All maximal 2-paths of the non-trivial component `h`, in order of their
/// smallest internal node.
pub fn maximal_two_paths(
    g: &OwnedGraph,
    dec: &EdgeDecomposition,
    h: &TwoEdgeComponent,
) -> Vec<TwoPathRun> {
    let is2 = |v: usize| is_two_node(g, dec, v);
    let succ = |v: usize| h_out(g, h, v)[0];
    let pred = |v: usize| h_in(g, h, v)[0];
    let mut seen = std::collections::BTreeSet::new();
    let mut runs = Vec::new();
    for &v in h.nodes() {
        if !is2(v) || seen.contains(&v) {
            continue;
        }
        // walk back to the first internal node
        let mut first = v;
        let mut closed = false;
        loop {
            let p = pred(first);
            if !is2(p) {
                break;
            }
            if p == v {
                closed = true;
                break;
            }
            first = p;
        }
        let mut nodes = Vec::new();
        if closed {
            let mut x = v;
            loop {
                nodes.push(x);
                x = succ(x);
                if x == v {
                    break;
                }
            }
        } else {
            nodes.push(pred(first));
            let mut x = first;
            while is2(x) {
                nodes.push(x);
                x = succ(x);
            }
            nodes.push(x);
        }
        let internal = if closed { &nodes[..] } else { &nodes[1..nodes.len() - 1] };
        seen.extend(internal.iter().copied());
        runs.push(TwoPathRun { nodes, closed });
    }
    runs
}
