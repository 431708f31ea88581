//! Distance levels and distance-almost-uniformity.

use num_rational::Rational64;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{bfs_distances, graph_power, Graph, GraphError};

/// `levels[u][r] = |A_r(u)|`, the number of nodes at distance exactly `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub levels: Vec<Vec<usize>>,
}

impl LevelProfile {
    pub fn n(&self) -> usize {
        self.levels.len()
    }

    /// `|A_r(u)|`, zero beyond the eccentricity of `u`.
    pub fn level(&self, u: usize, r: usize) -> usize {
        self.levels[u].get(r).copied().unwrap_or(0)
    }

    pub fn max_radius(&self) -> usize {
        self.levels.iter().map(|l| l.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

pub fn level_sets(g: &Graph) -> Result<LevelProfile, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let levels = (0..g.n())
        .into_par_iter()
        .map(|u| {
            let mut counts = Vec::new();
            for d in bfs_distances(g, u).into_iter().flatten() {
                if counts.len() <= d {
                    counts.resize(d + 1, 0);
                }
                counts[d] += 1;
            }
            counts
        })
        .collect();
    Ok(LevelProfile { levels })
}

/// How a window of `k` levels is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowRule {
    /// `|A_r ∪ ... ∪ A_{r+k-1}|`.
    #[default]
    Union,
    /// `max_i |A_{r+i}|`.
    MaxLevel,
}

/// Whether the window start `r` is shared by all sources or chosen per source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantifier {
    #[default]
    SharedR,
    PerSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DauOptions {
    pub window: WindowRule,
    pub quantifier: Quantifier,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DauResult {
    pub holds: bool,
    /// Smallest working window start per source (all equal under `SharedR`).
    pub r: Option<Vec<usize>>,
    /// Under `SharedR` and failure: the source with the worst best window.
    pub worst_source: Option<usize>,
}

fn window_score(p: &LevelProfile, u: usize, r: usize, k: usize, rule: WindowRule) -> usize {
    let it = (r..r + k).map(|i| p.level(u, i));
    match rule {
        WindowRule::Union => it.sum(),
        WindowRule::MaxLevel => it.max().unwrap_or(0),
    }
}

/// `(k, eps)`-distance-almost-uniformity: some window of `k` consecutive
/// levels captures at least `n (1 - eps)` nodes from every source.
pub fn is_dau(g: &Graph, k: usize, eps: Rational64, opts: DauOptions) -> Result<DauResult, GraphError> {
    let p = level_sets(g)?;
    Ok(is_dau_levels(&p, k, eps, opts))
}

pub fn is_dau_levels(p: &LevelProfile, k: usize, eps: Rational64, opts: DauOptions) -> DauResult {
    let n = p.n();
    let need = Rational64::from_integer(n as i64) * (Rational64::one() - eps);
    let ok = |u: usize, r: usize| {
        Rational64::from_integer(window_score(p, u, r, k.max(1), opts.window) as i64) >= need
    };
    let top = p.max_radius();
    match opts.quantifier {
        Quantifier::SharedR => {
            if let Some(r) = (0..=top).find(|&r| (0..n).all(|u| ok(u, r))) {
                return DauResult { holds: true, r: Some(vec![r; n]), worst_source: None };
            }
            let worst = (0..n).min_by_key(|&u| {
                (0..=top).map(|r| window_score(p, u, r, k.max(1), opts.window)).max().unwrap_or(0)
            });
            DauResult { holds: n == 0, r: None, worst_source: worst }
        }
        Quantifier::PerSource => {
            let rs: Option<Vec<usize>> =
                (0..n).map(|u| (0..=top).find(|&r| ok(u, r))).collect();
            DauResult { holds: rs.is_some(), worst_source: None, r: rs }
        }
    }
}

/// `eps = 4/5 (1 + 1/C)`.
pub fn ne_dau_epsilon(c: Rational64) -> Rational64 {
    Rational64::new(4, 5) * (Rational64::one() + c.recip())
}

/// `|M_1(u, w)| = |{z : |d(z,u) - d(z,w)| <= 1}|`.
pub fn agreement_set(g: &Graph, u: usize, w: usize) -> Result<usize, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let du = bfs_distances(g, u);
    let dw = bfs_distances(g, w);
    Ok(du
        .iter()
        .zip(&dw)
        .filter(|(a, b)| a.unwrap().abs_diff(b.unwrap()) <= 1)
        .count())
}

/// Epsilon grid `1/10, ..., 9/10`.
pub fn epsilon_grid() -> Vec<Rational64> {
    (1..10).map(|i| Rational64::new(i, 10)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerCollapse {
    pub diameter: usize,
    pub power_diameter: usize,
    pub diameter_ok: bool,
    /// Grid values where `G` is (5, eps)-DAU but `G^4` is not (2, eps)-DAU.
    pub implication_failures: Vec<Rational64>,
}

impl PowerCollapse {
    pub fn holds(&self) -> bool {
        self.diameter_ok && self.implication_failures.is_empty()
    }
}

/// `diam(G^4) = ceil(diam(G)/4)`, and `(5, eps)`-DAU of `G` implies
/// `(2, eps)`-DAU of `G^4` for each `eps` of the grid.
pub fn check_power_collapse(
    g: &Graph,
    grid: &[Rational64],
    opts: DauOptions,
) -> Result<PowerCollapse, GraphError> {
    let diameter = g.diameter().ok_or(GraphError::Disconnected)?;
    let g4 = graph_power(g, 4)?;
    let power_diameter = g4.diameter().ok_or(GraphError::Disconnected)?;
    let base = level_sets(g)?;
    let pow = level_sets(&g4)?;
    let implication_failures = grid
        .iter()
        .copied()
        .filter(|&eps| {
            is_dau_levels(&base, 5, eps, opts).holds && !is_dau_levels(&pow, 2, eps, opts).holds
        })
        .collect();
    Ok(PowerCollapse {
        diameter,
        power_diameter,
        diameter_ok: power_diameter == diameter.div_ceil(4),
        implication_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn level_examples() {
        let c5 = level_sets(&Graph::cycle(5)).unwrap();
        assert!(c5.levels.iter().all(|l| l == &vec![1, 2, 2]));
        let star = level_sets(&Graph::star(5)).unwrap();
        assert_eq!(star.levels[0], vec![1, 4]);
        assert_eq!(star.levels[1], vec![1, 1, 3]);
        let k6 = level_sets(&Graph::complete(6)).unwrap();
        assert!(k6.levels.iter().all(|l| l == &vec![1, 5]));
        let disconnected = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(level_sets(&disconnected), Err(GraphError::Disconnected));
    }

    #[test]
    fn dau_examples() {
        let opts = DauOptions::default();
        let k7 = is_dau(&Graph::complete(7), 1, r(1, 7), opts).unwrap();
        assert!(k7.holds);
        assert_eq!(k7.r.unwrap()[0], 1);
        assert!(!is_dau(&Graph::path(5), 1, r(1, 2), opts).unwrap().holds);
        let c5 = is_dau(&Graph::cycle(5), 2, r(1, 5), opts).unwrap();
        assert!(c5.holds);
        assert_eq!(c5.r.unwrap()[0], 1);
    }

    #[test]
    fn max_level_rule_is_stricter() {
        let max = DauOptions { window: WindowRule::MaxLevel, ..Default::default() };
        assert!(!is_dau(&Graph::cycle(5), 2, r(1, 5), max).unwrap().holds);
    }

    #[test]
    fn per_source_is_weaker() {
        // K_{1,4}: centre [1,4], leaves [1,1,3]; no single level suits both
        let star = Graph::star(5);
        let shared = is_dau(&star, 1, r(2, 5), DauOptions::default()).unwrap();
        assert!(!shared.holds);
        let per = DauOptions { quantifier: Quantifier::PerSource, ..Default::default() };
        let res = is_dau(&star, 1, r(2, 5), per).unwrap();
        assert!(res.holds);
        assert_eq!(res.r.unwrap(), vec![1, 2, 2, 2, 2]);
    }

    #[test]
    fn ne_epsilon() {
        assert_eq!(ne_dau_epsilon(r(5, 1)), r(24, 25));
    }

    #[test]
    fn agreement_examples() {
        assert_eq!(agreement_set(&Graph::cycle(5), 0, 1).unwrap(), 5);
        assert_eq!(agreement_set(&Graph::path(5), 0, 4).unwrap(), 1);
        assert_eq!(agreement_set(&Graph::path(5), 2, 2).unwrap(), 5);
    }

    #[test]
    fn power_collapse_examples() {
        let grid = epsilon_grid();
        let p9 = check_power_collapse(&Graph::path(9), &grid, DauOptions::default()).unwrap();
        assert_eq!((p9.diameter, p9.power_diameter), (8, 2));
        assert!(p9.holds());
        let c8 = check_power_collapse(&Graph::cycle(8), &grid, DauOptions::default()).unwrap();
        assert_eq!(c8.power_diameter, 1);
        assert!(c8.holds());
    }
}
