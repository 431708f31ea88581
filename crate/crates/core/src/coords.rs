//! Boundary coordinate systems, bracket counts and the closed-form cost
//! difference of a 2-swap.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::Rational64;
use thiserror::Error;

use crate::graph::{
    bfs_avoiding, bfs_distances, bridges_and_components, girth, is_two_node, trace_path, Dist,
    EdgeDecomposition, Graph, GraphError, OwnedGraph,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordError {
    #[error("boundary must have 2 or 3 distinct nodes of the subgraph")]
    BadBoundary,
    #[error("subgraph is not inside a single 2-edge-connected component")]
    NotInOneComponent,
    #[error("boundary does not separate: shortest path {0:?} avoids it")]
    NotSeparating(Vec<usize>),
    #[error("query arity {got} does not match boundary size {expected}")]
    Arity { expected: usize, got: usize },
    #[error("angle bracket needs at least one underlined coordinate")]
    NoUnderline,
    #[error("square bracket is defined for two coordinates")]
    SquareArity,
    #[error("not a 2-path: {0}")]
    NotATwoPath(String),
    #[error("girth {girth:?} below 2k = {needed}; the closed form does not apply")]
    GirthTooSmall { girth: Option<usize>, needed: usize },
    #[error("swap index {i} outside 0..={max}")]
    IndexOutOfRange { i: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Distances from every node outside the interior `X̄` to the boundary
/// nodes, measured in `G - X̄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateSystem {
    interior: BTreeSet<usize>,
    boundary: Vec<usize>,
    /// `coords[i][v] = x_{i+1}(v)`; meaningless for interior nodes.
    coords: Vec<Vec<Dist>>,
}

impl CoordinateSystem {
    pub fn interior(&self) -> &BTreeSet<usize> {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// `(x_1(v), x_2(v), ...)`, `None` for interior nodes.
    pub fn coords(&self, v: usize) -> Option<Vec<Dist>> {
        if self.interior.contains(&v) {
            None
        } else {
            Some(self.coords.iter().map(|c| c[v]).collect())
        }
    }

    /// Nodes outside the interior, ascending.
    pub fn outside(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.coords.first().map_or(0, Vec::len);
        (0..n).filter(|v| !self.interior.contains(v))
    }
}

/// Builds the coordinate system of `x` with boundary `boundary`.
///
/// Only interior-to-outside separation is validated: no shortest path from a
/// non-boundary node of `x` to a node outside `X̄ ∪ ∂X` may avoid the boundary.
pub fn build_coords(
    g: &Graph,
    x: &[usize],
    boundary: &[usize],
) -> Result<CoordinateSystem, CoordError> {
    let dec = bridges_and_components(g)?;
    build_coords_with(g, &dec, x, boundary)
}

pub(crate) fn build_coords_with(
    g: &Graph,
    dec: &EdgeDecomposition,
    x: &[usize],
    boundary: &[usize],
) -> Result<CoordinateSystem, CoordError> {
    let xs: BTreeSet<usize> = x.iter().copied().collect();
    let bset: BTreeSet<usize> = boundary.iter().copied().collect();
    if !(2..=3).contains(&boundary.len())
        || bset.len() != boundary.len()
        || !bset.is_subset(&xs)
    {
        return Err(CoordError::BadBoundary);
    }
    if let Some(&v) = xs.iter().find(|&&v| v >= g.n()) {
        return Err(GraphError::NodeOutOfRange { node: v, n: g.n() }.into());
    }
    let comp = dec.component_of(boundary[0]);
    if xs.iter().any(|&v| dec.component_of(v) != comp) {
        return Err(CoordError::NotInOneComponent);
    }
    let internal: Vec<usize> = xs.difference(&bset).copied().collect();
    let mut interior = BTreeSet::new();
    for &v in &internal {
        interior.extend(dec.hanging_tree(g, v));
    }

    for &v in &internal {
        let full = bfs_distances(g, v);
        let (avoid, parent) = bfs_avoiding(g, v, |w| bset.contains(&w));
        for y in 0..g.n() {
            if interior.contains(&y) || bset.contains(&y) {
                continue;
            }
            if avoid[y].is_some() && avoid[y] == full[y] {
                return Err(CoordError::NotSeparating(trace_path(&parent, y)));
            }
        }
    }

    let coords = boundary
        .iter()
        .map(|&b| bfs_avoiding(g, b, |w| interior.contains(&w)).0)
        .collect();
    Ok(CoordinateSystem { interior, boundary: boundary.to_vec(), coords })
}

/// `⟨...⟩` counts nodes whose smallest underlined `x_i + a_i` is `<=` every
/// other `x_j + a_j`; `[x_1 + b_1, x_2 + b_2]` counts nodes with
/// `x_1 - x_2 = b_1 - b_2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BracketQuery {
    Angle { offsets: Vec<i64>, underlined: Vec<bool> },
    Square { offsets: [i64; 2] },
}

impl BracketQuery {
    /// `⟨x_1 + a_1 (underlined), x_2 + a_2, ...⟩`.
    pub fn first_underlined(offsets: &[i64]) -> Self {
        let mut underlined = vec![false; offsets.len()];
        underlined[0] = true;
        BracketQuery::Angle { offsets: offsets.to_vec(), underlined }
    }
}

fn shift(d: Dist, a: i64) -> Option<i64> {
    d.map(|d| d as i64 + a)
}

/// `a <= b` on `Z ∪ {∞}`; `None` when both sides are infinite.
fn le_ext(a: Option<i64>, b: Option<i64>) -> Option<bool> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.cmp(&b) != Ordering::Greater),
        (Some(_), None) => Some(true),
        (None, Some(_)) => Some(false),
        (None, None) => None,
    }
}

/// Cardinality of the bracket set over nodes outside `X̄`. Nodes whose
/// comparison involves two infinite values are not counted.
pub fn bracket_count(cs: &CoordinateSystem, q: &BracketQuery) -> Result<usize, CoordError> {
    let arity = cs.boundary.len();
    match q {
        BracketQuery::Angle { offsets, underlined } => {
            if offsets.len() != arity || underlined.len() != arity {
                return Err(CoordError::Arity { expected: arity, got: offsets.len() });
            }
            if !underlined.iter().any(|&u| u) {
                return Err(CoordError::NoUnderline);
            }
            let count = cs
                .outside()
                .filter(|&v| {
                    let vals: Vec<Option<i64>> =
                        (0..arity).map(|i| shift(cs.coords[i][v], offsets[i])).collect();
                    let lhs = (0..arity)
                        .filter(|&i| underlined[i])
                        .map(|i| vals[i])
                        .min_by(|a, b| match (a, b) {
                            (Some(a), Some(b)) => a.cmp(b),
                            (Some(_), None) => Ordering::Less,
                            (None, Some(_)) => Ordering::Greater,
                            (None, None) => Ordering::Equal,
                        })
                        .flatten();
                    (0..arity)
                        .filter(|&j| !underlined[j])
                        .all(|j| le_ext(lhs, vals[j]) == Some(true))
                })
                .count();
            Ok(count)
        }
        BracketQuery::Square { offsets } => {
            if arity != 2 {
                return Err(CoordError::SquareArity);
            }
            let target = offsets[0] - offsets[1];
            let count = cs
                .outside()
                .filter(|&v| match (cs.coords[0][v], cs.coords[1][v]) {
                    (Some(a), Some(b)) => a as i64 - b as i64 == target,
                    _ => false,
                })
                .count();
            Ok(count)
        }
    }
}

/// A 2-path `u_0 - ... - u_k` (`k >= 2`) of a non-trivial component, stored
/// so that `u_i` bought `(u_i, u_{i+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPath {
    nodes: Vec<usize>,
}

impl TwoPath {
    /// Accepts either orientation and normalises it.
    pub fn new(g: &OwnedGraph, nodes: Vec<usize>) -> Result<Self, CoordError> {
        let dec = bridges_and_components(g.graph())?;
        Self::with_decomposition(g, &dec, nodes)
    }

    pub(crate) fn with_decomposition(
        g: &OwnedGraph,
        dec: &EdgeDecomposition,
        mut nodes: Vec<usize>,
    ) -> Result<Self, CoordError> {
        let bad = |m: String| Err(CoordError::NotATwoPath(m));
        if nodes.len() < 3 {
            return bad("needs at least two edges".into());
        }
        if nodes.iter().collect::<BTreeSet<_>>().len() != nodes.len() {
            return bad("repeated node".into());
        }
        if let Some(&v) = nodes.iter().find(|&&v| v >= g.n()) {
            return Err(GraphError::NodeOutOfRange { node: v, n: g.n() }.into());
        }
        if !g.buys(nodes[0], nodes[1]) {
            nodes.reverse();
        }
        let comp = dec.component_of(nodes[1]);
        for w in nodes.windows(2) {
            if !g.buys(w[0], w[1]) {
                return bad(format!("{} did not buy the link to {}", w[0], w[1]));
            }
            if dec.is_bridge(w[0], w[1]) || dec.component_of(w[0]) != comp {
                return bad(format!("{}-{} is not inside the component", w[0], w[1]));
            }
        }
        for &v in &nodes[1..nodes.len() - 1] {
            if !is_two_node(g, dec, v) {
                return bad(format!("{v} is not a 2-node"));
            }
        }
        Ok(TwoPath { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Edge count `k`.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Closed form for the change in `u_i`'s cost when it swaps `(u_i, u_{i+1})`
/// for `(u_i, u_{i+2})`:
///
/// `U_{i+1} - U_{i+2} - ... - U_{k-1} - ⟨x_1 + k - i (underlined), x_2 + i⟩`
///
/// with `x_1`, `x_2` measured to `u_k`, `u_0`. Requires `g(G) >= 2k`.
pub fn two_swap_delta_formula(
    g: &OwnedGraph,
    path: &TwoPath,
    i: usize,
) -> Result<Rational64, CoordError> {
    let dec = bridges_and_components(g.graph())?;
    two_swap_delta_with(g, &dec, girth(g.graph()), path, i)
}

pub(crate) fn two_swap_delta_with(
    g: &OwnedGraph,
    dec: &EdgeDecomposition,
    girth: Option<usize>,
    path: &TwoPath,
    i: usize,
) -> Result<Rational64, CoordError> {
    let k = path.len();
    if i + 2 > k {
        return Err(CoordError::IndexOutOfRange { i, max: k - 2 });
    }
    if girth.is_some_and(|gr| gr < 2 * k) {
        return Err(CoordError::GirthTooSmall { girth, needed: 2 * k });
    }
    let u = &path.nodes;
    let h = &dec.components[dec.component_of(u[1])];
    let weight = |j: usize| h.weight(u[j]).expect("path node inside component") as i64;
    let cs = build_coords_with(g.graph(), dec, u, &[u[k], u[0]])?;
    let bracket = bracket_count(
        &cs,
        &BracketQuery::first_underlined(&[(k - i) as i64, i as i64]),
    )? as i64;
    let tail: i64 = (i + 2..k).map(weight).sum();
    Ok(Rational64::from_integer(weight(i + 1) - tail - bracket))
}
