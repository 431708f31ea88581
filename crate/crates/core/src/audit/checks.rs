use num_rational::Rational64;
use num_traits::{One, Zero};

use super::branching::{find_branching, BranchingRule, PathBound};
use super::reduced::{build_reduced, ReducedError};
use super::{AuditConfig, CheckRecord, Precondition, Witness};
use crate::dau::{check_power_collapse, is_dau, ne_dau_epsilon, Quantifier};
use crate::game::{
    build_comm_graph, fmt_ratio, optimum_cost, social_cost, StrategyVector,
    CERTIFIED_OPTIMUM_LIMIT,
};
use crate::graph::{
    bridges_and_components, girth, h_in, h_out, is_directed_cycle, is_minimal_cycle,
    is_two_node, maximal_two_paths, minimal_cycle_through, EdgeDecomposition, OwnedGraph,
    TwoEdgeComponent,
};

/// Additive slack between `diam(G)` and `diam(H)`.
const DIAMETER_SLACK: usize = 206;

pub(crate) struct Ctx<'a> {
    s: &'a StrategyVector,
    cfg: &'a AuditConfig,
    og: OwnedGraph,
    n: usize,
    alpha: Rational64,
    dec: EdgeDecomposition,
    dist: Vec<Vec<usize>>,
    dsum: Vec<u64>,
    girth: Option<usize>,
    diam: usize,
    /// Per component index; zero for trivial components.
    h_diam: Vec<usize>,
}

fn q(x: usize) -> Rational64 {
    Rational64::from_integer(x as i64)
}

fn fmt_girth(g: Option<usize>) -> String {
    g.map_or_else(|| "inf".to_string(), |g| g.to_string())
}

impl<'a> Ctx<'a> {
    /// `None` when the communication graph is disconnected.
    pub(crate) fn new(s: &'a StrategyVector, cfg: &'a AuditConfig) -> Option<Self> {
        let og = build_comm_graph(s);
        let g = og.graph();
        let dec = bridges_and_components(g).ok()?;
        let dist: Vec<Vec<usize>> = g
            .distance_matrix()
            .into_iter()
            .map(|row| row.into_iter().map(|d| d.expect("connected")).collect())
            .collect();
        let dsum = dist.iter().map(|row| row.iter().map(|&d| d as u64).sum()).collect();
        let diam = dist.iter().flatten().copied().max().unwrap_or(0);
        let h_diam = dec
            .components
            .iter()
            .map(|h| {
                let nodes = h.nodes();
                nodes.iter().flat_map(|&a| nodes.iter().map(move |&b| (a, b)))
                    .map(|(a, b)| dist[a][b])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        Some(Ctx {
            s,
            cfg,
            girth: girth(g),
            n: s.n(),
            alpha: s.alpha(),
            og,
            dec,
            dist,
            dsum,
            diam,
            h_diam,
        })
    }

    pub(crate) fn run(&self, check: &'static str) -> CheckRecord {
        match check {
            "distance-spread" => self.distance_spread(check, false),
            "distance-spread-strict" => self.distance_spread(check, true),
            "minimal-cycles-directed" => self.minimal_cycles_directed(check),
            "degree-two-are-2-nodes" => self.degree_two_are_two_nodes(check),
            "edges-on-minimal-cycles" => self.edges_on_minimal_cycles(check),
            "two-paths" => self.two_paths(check),
            "reduced-forest" => self.reduced_forest(check),
            "degree-lower" => self.degree_lower(check, false),
            "degree-lower-strong" => self.degree_lower(check, true),
            "degree-upper" => self.degree_upper(check),
            "girth" => self.girth_bound(check),
            "tree-theorem" => self.tree_theorem(check),
            "branching-long-edges" => self.branching(check, false, PathBound::Edges(7)),
            "branching-long-internal" => self.branching(check, false, PathBound::Internal(7)),
            "branching-short-edges" => self.branching(check, true, PathBound::Edges(4)),
            "branching-short-internal" => self.branching(check, true, PathBound::Internal(4)),
            "diameter-relation" => self.diameter_relation(check),
            "poa-diameter-bound" => self.poa_diameter(check),
            "tree-poa-bound" => self.tree_poa(check),
            "ne-dau" => self.ne_dau(check),
            "agreement-sets" => self.agreement_sets(check),
            "power-collapse" => self.power_collapse(check),
            other => unreachable!("unregistered check {other}"),
        }
    }

    fn components(&self) -> impl Iterator<Item = (usize, &TwoEdgeComponent)> {
        self.dec.components.iter().enumerate().filter(|(_, h)| h.is_nontrivial())
    }

    // preconditions

    fn pre_nontrivial(&self) -> Precondition {
        let count = self.components().count();
        Precondition {
            name: "non-trivial 2-edge-connected component".into(),
            holds: count > 0,
            detail: format!("{count} found"),
        }
    }

    fn pre_alpha_above(&self, k: usize) -> Precondition {
        let bound = q(k * self.n);
        let name = if k == 1 { "alpha > n".to_string() } else { format!("alpha > {k}n") };
        Precondition {
            name,
            holds: self.alpha > bound,
            detail: format!("alpha = {}, bound = {}", fmt_ratio(&self.alpha), bound),
        }
    }

    fn pre_girth(&self, min: usize, strict: bool) -> Precondition {
        let holds = self.girth.is_none_or(|g| if strict { g > min } else { g >= min });
        Precondition {
            name: format!("girth {} {min}", if strict { ">" } else { ">=" }),
            holds,
            detail: format!("girth = {}", fmt_girth(self.girth)),
        }
    }

    fn pre_h_diameter(&self, min: usize) -> Precondition {
        let best = self.components().map(|(i, _)| self.h_diam[i]).max();
        Precondition {
            name: format!("diam(H) >= {min}"),
            holds: best.is_some_and(|d| d >= min),
            detail: format!("largest diam(H) = {}", best.map_or("none".into(), |d| d.to_string())),
        }
    }

    fn pre_certified_optimum(&self) -> Precondition {
        Precondition {
            name: format!("n <= {CERTIFIED_OPTIMUM_LIMIT}"),
            holds: self.n <= CERTIFIED_OPTIMUM_LIMIT,
            detail: format!("n = {} (optimum certified by enumeration)", self.n),
        }
    }

    fn pre_tree(&self) -> Precondition {
        Precondition {
            name: "G is a tree".into(),
            holds: self.og.graph().is_tree(),
            detail: format!("{} edges on {} nodes", self.og.graph().edge_count(), self.n),
        }
    }

    // checks

    fn distance_spread(&self, name: &'static str, strict: bool) -> CheckRecord {
        let mut pre = vec![self.pre_nontrivial()];
        if strict {
            pre.push(self.pre_alpha_above(4));
        }
        let mut r = CheckRecord::gate(name, pre);
        if !r.applicable() {
            return r;
        }
        let bound = if strict { 2 * self.n } else { 3 * self.n } as u64;
        let mut worst = 0;
        for (_, h) in self.components() {
            let lo = *h.nodes().iter().min_by_key(|&&u| (self.dsum[u], u)).unwrap();
            let hi = *h.nodes().iter().max_by_key(|&&u| (self.dsum[u], std::cmp::Reverse(u))).unwrap();
            let spread = self.dsum[hi] - self.dsum[lo];
            worst = worst.max(spread);
            let bad = if strict { spread >= bound } else { spread > bound };
            if bad {
                r.fail(Witness::NodePair {
                    u: hi,
                    v: lo,
                    d_u: self.dsum[hi],
                    d_v: self.dsum[lo],
                    spread,
                    bound,
                });
            }
        }
        r.measure("max_spread", worst);
        r.measure("bound", bound);
        r
    }

    fn minimal_cycles_directed(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, vec![self.pre_nontrivial(), self.pre_alpha_above(4)]);
        if !r.applicable() {
            return r;
        }
        let g = self.og.graph();
        let mut seen = std::collections::BTreeSet::new();
        for (_, h) in self.components() {
            for &e in h.edges() {
                let Ok(Some(c)) = minimal_cycle_through(g, e) else { continue };
                if !seen.insert(c.canonical()) {
                    continue;
                }
                if !is_directed_cycle(&self.og, &c).unwrap_or(true) {
                    let nodes = c.nodes().to_vec();
                    let len = nodes.len();
                    let double_buyer = (0..len).map(|i| nodes[i]).find(|&x| {
                        let i = nodes.iter().position(|&y| y == x).unwrap();
                        let prev = nodes[(i + len - 1) % len];
                        let next = nodes[(i + 1) % len];
                        self.og.buys(x, prev) && self.og.buys(x, next)
                    });
                    r.fail(Witness::Cycle { nodes, double_buyer });
                }
            }
        }
        r.measure("cycles_examined", seen.len());
        r.note("only a minimum-perimeter cycle through each edge is examined");
        r
    }

    fn degree_two_are_two_nodes(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, vec![self.pre_nontrivial(), self.pre_alpha_above(4)]);
        if !r.applicable() {
            return r;
        }
        let g = self.og.graph();
        let mut count = 0;
        for (_, h) in self.components() {
            for &v in h.nodes() {
                let degree_h = h.degree_in(g, v);
                if degree_h != 2 {
                    continue;
                }
                count += 1;
                if !is_two_node(&self.og, &self.dec, v) {
                    r.fail(Witness::Node {
                        node: v,
                        degree_h,
                        out_h: h_out(&self.og, h, v).len(),
                        in_h: h_in(&self.og, h, v).len(),
                    });
                }
            }
        }
        r.measure("degree_two_nodes", count);
        r
    }

    fn edges_on_minimal_cycles(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, vec![self.pre_nontrivial()]);
        if !r.applicable() {
            return r;
        }
        let g = self.og.graph();
        let mut count = 0;
        for (_, h) in self.components() {
            for &(u, v) in h.edges() {
                count += 1;
                let ok = match minimal_cycle_through(g, (u, v)) {
                    Ok(Some(c)) => is_minimal_cycle(g, &c).unwrap_or(false),
                    _ => false,
                };
                if !ok {
                    r.fail(Witness::Edge { u, v });
                }
            }
        }
        r.measure("edges_examined", count);
        r
    }

    fn two_paths(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, vec![self.pre_nontrivial(), self.pre_girth(14, true)]);
        if !r.applicable() {
            return r;
        }
        let mut longest = 0;
        let mut windows = 0;
        for (_, h) in self.components() {
            for run in maximal_two_paths(&self.og, &self.dec, h) {
                longest = longest.max(run.len());
                if run.len() < 5 {
                    continue;
                }
                r.fail(Witness::TwoPath {
                    nodes: run.nodes.clone(),
                    length: run.len(),
                    closed: run.closed,
                });
                let m = run.nodes.len();
                let starts = if run.closed { m } else { m - 5 };
                for start in 0..starts {
                    let w: Vec<usize> = (0..6).map(|j| run.nodes[(start + j) % m]).collect();
                    if w[0] == w[5] {
                        continue;
                    }
                    windows += 1;
                    if windows > 8 {
                        continue;
                    }
                    let lhs = self.dsum[w[5]] as i64 - self.dsum[w[0]] as i64;
                    let weights: usize = w[1..5].iter().map(|&u| h.weight(u).unwrap_or(1)).sum();
                    let rhs = 2 * self.n as i64 - weights as i64;
                    let (upper, lower) = (lhs < rhs, lhs >= rhs);
                    let word = |b: bool| if b { "holds" } else { "violated" };
                    r.note(format!(
                        "window {:?}: D(u5)-D(u0) = {lhs}, 2n-(U1+..+U4) = {rhs}; \
                         strict upper bound {}, lower bound {}",
                        w,
                        word(upper),
                        word(lower)
                    ));
                }
            }
        }
        r.measure("longest_two_path", longest);
        r.measure("windows_evaluated", windows);
        r
    }

    fn reduced_forest(&self, name: &'static str) -> CheckRecord {
        let pre = vec![self.pre_nontrivial(), self.pre_alpha_above(4), self.pre_girth(14, true)];
        let mut r = CheckRecord::gate(name, pre);
        if !r.applicable() {
            return r;
        }
        let (mut nodes, mut edges, mut positive) = (0, 0, 0);
        for (_, h) in self.components() {
            match build_reduced(&self.og, h) {
                Err(ReducedError::BareCycle(c)) => {
                    r.note("H is a bare cycle, so its reduced graph has no nodes");
                    r.fail(Witness::BareCycle { nodes: c });
                }
                Err(ReducedError::Trivial) => {}
                Ok(red) => {
                    nodes += red.m();
                    edges += red.edges.len();
                    positive += red.positive().count();
                    if let Some(cycle) = red.forest_violation() {
                        let chains = cycle.iter().map(|e| e.chain()).collect();
                        r.fail(Witness::ReducedCycle { chains });
                    }
                }
            }
        }
        r.measure("reduced_nodes", nodes);
        r.measure("reduced_edges", edges);
        r.measure("positive_weight_edges", positive);
        r
    }

    fn degree_lower(&self, name: &'static str, strong: bool) -> CheckRecord {
        let (pre, bound, min_diam) = if strong {
            (
                vec![self.pre_alpha_above(4), self.pre_girth(20, false), self.pre_h_diameter(126)],
                Rational64::new(5, 2),
                126,
            )
        } else {
            (vec![self.pre_nontrivial(), self.pre_girth(14, true)], Rational64::new(9, 4), 0)
        };
        let mut r = CheckRecord::gate(name, pre);
        if !r.applicable() {
            return r;
        }
        let mut least: Option<Rational64> = None;
        for (i, h) in self.components() {
            if self.h_diam[i] < min_diam {
                continue;
            }
            let deg = h.average_degree();
            least = Some(least.map_or(deg, |l| l.min(deg)));
            if deg < bound {
                r.fail(Witness::Component {
                    representative: h.nodes()[0],
                    value: fmt_ratio(&deg),
                    bound: fmt_ratio(&bound),
                });
            }
        }
        if let Some(l) = least {
            r.measure("min_average_degree", fmt_ratio(&l));
        }
        r.measure("bound", fmt_ratio(&bound));
        r
    }

    fn degree_upper(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, vec![self.pre_nontrivial(), self.pre_alpha_above(1)]);
        if !r.applicable() {
            return r;
        }
        let n = q(self.n);
        let bound = q(2) + q(4) * n / (self.alpha - n);
        let mut most: Option<Rational64> = None;
        for (_, h) in self.components() {
            let deg = h.average_degree();
            most = Some(most.map_or(deg, |m| m.max(deg)));
            if deg > bound {
                r.fail(Witness::Component {
                    representative: h.nodes()[0],
                    value: fmt_ratio(&deg),
                    bound: fmt_ratio(&bound),
                });
            }
        }
        if let Some(m) = most {
            r.measure("max_average_degree", fmt_ratio(&m));
        }
        r.measure("bound", fmt_ratio(&bound));
        r
    }

    fn girth_bound(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, Vec::new());
        let bound = q(2) * self.alpha / q(self.n) + q(2);
        if let Some(g) = self.girth {
            if q(g) < bound {
                r.fail(Witness::Girth { girth: g, bound: fmt_ratio(&bound) });
            }
        }
        r.measure("girth", fmt_girth(self.girth));
        r.measure("bound", fmt_ratio(&bound));
        r
    }

    fn tree_theorem(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, vec![self.pre_alpha_above(17)]);
        if !r.applicable() {
            return r;
        }
        let g = self.og.graph();
        if !g.is_tree() {
            let cycle = g
                .edges()
                .find_map(|e| minimal_cycle_through(g, e).ok().flatten())
                .map(|c| c.nodes().to_vec())
                .unwrap_or_default();
            r.fail(Witness::Cycle { nodes: cycle, double_buyer: None });
        }
        r
    }

    fn branching(&self, name: &'static str, short: bool, bound: PathBound) -> CheckRecord {
        let (girth_min, diam_min, rule) = if short {
            (12, 126, BranchingRule { bound, min_two_nodes: 2, branch_len: 3 })
        } else {
            (16, 62, BranchingRule { bound, min_two_nodes: 3, branch_len: 2 })
        };
        let pre = vec![
            self.pre_alpha_above(4),
            self.pre_girth(girth_min, false),
            self.pre_h_diameter(diam_min),
        ];
        let mut r = CheckRecord::gate(name, pre);
        if !r.applicable() {
            return r;
        }
        r.note(match bound {
            PathBound::Edges(k) => format!("path bound read as at most {k} edges"),
            PathBound::Internal(k) => format!("path bound read as at most {k} internal nodes"),
        });
        for (i, h) in self.components() {
            if self.h_diam[i] < diam_min {
                continue;
            }
            if let Some(p) = find_branching(&self.og, &self.dec, h, rule) {
                r.fail(Witness::Branching {
                    path: p.path,
                    two_nodes: p.two_nodes,
                    branches: p.branches.to_vec(),
                });
            }
        }
        r
    }

    fn diameter_relation(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, vec![self.pre_nontrivial(), self.pre_alpha_above(4)]);
        if !r.applicable() {
            return r;
        }
        for (i, h) in self.components() {
            if self.diam > self.h_diam[i] + DIAMETER_SLACK {
                r.fail(Witness::Diameter {
                    diam_g: self.diam,
                    diam_h: self.h_diam[i],
                    representative: h.nodes()[0],
                });
            }
        }
        r.measure("diam_g", self.diam);
        r.measure("poa_estimate", self.diam + 1);
        r
    }

    fn ratio(&self) -> Option<(Rational64, Rational64, Rational64)> {
        let cost = social_cost(self.s).finite()?;
        let opt = optimum_cost(self.n, self.alpha).cost;
        let ratio = if opt.is_zero() { Rational64::one() } else { cost / opt };
        Some((cost, opt, ratio))
    }

    fn poa_diameter(&self, name: &'static str) -> CheckRecord {
        let alpha_ok = self.alpha >= q(2);
        let pre = vec![
            Precondition {
                name: "alpha >= 2".into(),
                holds: alpha_ok,
                detail: format!("alpha = {}", fmt_ratio(&self.alpha)),
            },
            self.pre_certified_optimum(),
        ];
        let mut r = CheckRecord::gate(name, pre);
        if !r.applicable() {
            return r;
        }
        let (cost, opt, ratio) = self.ratio().expect("connected");
        let bound = q(self.diam + 1);
        if ratio > bound {
            r.fail(Witness::Ratio {
                social_cost: fmt_ratio(&cost),
                optimum: fmt_ratio(&opt),
                ratio: fmt_ratio(&ratio),
                bound: fmt_ratio(&bound),
            });
        }
        r.measure("ratio", fmt_ratio(&ratio));
        r.measure("bound", fmt_ratio(&bound));
        r
    }

    fn tree_poa(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, vec![self.pre_tree(), self.pre_certified_optimum()]);
        if !r.applicable() {
            return r;
        }
        let (cost, opt, ratio) = self.ratio().expect("connected");
        let bound = q(5);
        if ratio >= bound {
            r.fail(Witness::Ratio {
                social_cost: fmt_ratio(&cost),
                optimum: fmt_ratio(&opt),
                ratio: fmt_ratio(&ratio),
                bound: fmt_ratio(&bound),
            });
        }
        r.measure("ratio", fmt_ratio(&ratio));
        r
    }

    fn ne_dau(&self, name: &'static str) -> CheckRecord {
        let c = self.cfg.dau_c;
        let limit = q(self.n) / c;
        let pre = vec![Precondition {
            name: "alpha < n/C".into(),
            holds: self.alpha < limit,
            detail: format!(
                "alpha = {}, C = {}, n/C = {}",
                fmt_ratio(&self.alpha),
                fmt_ratio(&c),
                fmt_ratio(&limit)
            ),
        }];
        let mut r = CheckRecord::gate(name, pre);
        if !r.applicable() {
            return r;
        }
        let eps = ne_dau_epsilon(c);
        let g = self.og.graph();
        let res = is_dau(g, 5, eps, self.cfg.dau).expect("connected");
        r.measure("epsilon", fmt_ratio(&eps));
        if let Some(rs) = &res.r {
            r.measure("window_start", rs[0]);
        }
        if !res.holds {
            r.fail(Witness::Dau { epsilon: fmt_ratio(&eps), worst_source: res.worst_source });
            if self.cfg.dau.quantifier == Quantifier::SharedR {
                let mut per = self.cfg.dau;
                per.quantifier = Quantifier::PerSource;
                let weak = is_dau(g, 5, eps, per).expect("connected");
                r.note(format!(
                    "per-source windows {}",
                    if weak.holds { "exist" } else { "do not exist either" }
                ));
            }
        }
        r
    }

    fn agreement_sets(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, Vec::new());
        let bound = q(self.n) - q(2) * self.alpha;
        let mut least: Option<(usize, usize, usize)> = None;
        for u in 0..self.n {
            for w in u + 1..self.n {
                let count = (0..self.n)
                    .filter(|&z| self.dist[z][u].abs_diff(self.dist[z][w]) <= 1)
                    .count();
                if least.is_none_or(|(c, _, _)| count < c) {
                    least = Some((count, u, w));
                }
            }
        }
        if let Some((count, u, w)) = least {
            r.measure("min_agreement", count);
            if q(count) < bound {
                r.fail(Witness::Agreement { u, w, count, bound: fmt_ratio(&bound) });
            }
        }
        r.measure("bound", fmt_ratio(&bound));
        r
    }

    fn power_collapse(&self, name: &'static str) -> CheckRecord {
        let mut r = CheckRecord::gate(name, Vec::new());
        let pc = check_power_collapse(self.og.graph(), &self.cfg.epsilon_grid, self.cfg.dau)
            .expect("connected");
        if !pc.holds() {
            r.fail(Witness::PowerCollapse {
                diameter: pc.diameter,
                power_diameter: pc.power_diameter,
                failing_epsilons: pc.implication_failures.iter().map(fmt_ratio).collect(),
            });
        }
        r.measure("diameter", pc.diameter);
        r.measure("power_diameter", pc.power_diameter);
        r
    }
}
