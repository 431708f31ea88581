//! Randomised invariants. Each case draws a seed and builds its instance
//! with ChaCha, so failures shrink to a reproducible seed.

mod common;

use std::collections::BTreeSet;

use ncg::audit::build_reduced;
use ncg::coords::{bracket_count, build_coords, two_swap_delta_formula, BracketQuery, CoordError, TwoPath};
use ncg::deviations::{cost_delta, cost_delta_recompute, is_nash, Deviation, DeviationKind, VerifyMode};
use ncg::game::{build_comm_graph, graph_social_cost, optimum_cost, player_cost, social_cost, CostDelta, StrategyVector};
use ncg::graph::{bfs_distances, bridges_and_components, girth, graph_power, Graph};
use ncg::profile::{parse_profile, write_profile};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_connected, random_host, random_orientation, random_profile, random_two_path_case};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_alpha<R: Rng>(rng: &mut R) -> Rational64 {
    Rational64::new(rng.random_range(1..=40), rng.random_range(1..=4))
}

fn girth_brute(g: &Graph) -> Option<usize> {
    g.edges()
        .filter_map(|(u, v)| bfs_distances(&g.without_edge(u, v), u)[v].map(|d| d + 1))
        .min()
}

fn best_cost_brute(s: &StrategyVector, u: usize) -> Option<Rational64> {
    let others: Vec<usize> = (0..s.n()).filter(|&v| v != u).collect();
    (0u32..1 << others.len())
        .filter_map(|mask| {
            let set: BTreeSet<usize> =
                others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
            player_cost(&s.with_strategy(u, set).unwrap(), u).total().finite()
        })
        .min()
}

fn nash_brute(s: &StrategyVector) -> bool {
    (0..s.n()).all(|u| match player_cost(s, u).total().finite() {
        None => best_cost_brute(s, u).is_none(),
        Some(c) => best_cost_brute(s, u).is_none_or(|b| b >= c),
    })
}

/// Coordinate system of a random 2-path `X` with boundary `(u_k, u_0)`.
fn random_coords(seed: u64) -> Option<ncg::coords::CoordinateSystem> {
    let mut r = rng(seed);
    let case = random_two_path_case(&mut r)?;
    let g = build_comm_graph(&case.strategies);
    let path = &case.path;
    match build_coords(g.graph(), path, &[*path.last().unwrap(), path[0]]) {
        Ok(cs) => Some(cs),
        Err(CoordError::NotSeparating(_)) => None,
        Err(e) => panic!("unexpected coordinate error: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn girth_matches_edge_removal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=24);
        let extra = r.random_range(0..=n);
        let g = random_connected(&mut r, n, extra);
        prop_assert_eq!(girth(&g), girth_brute(&g));
    }

    #[test]
    fn bridges_disconnect(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=24);
        let extra = r.random_range(0..=n / 2);
        let g = random_connected(&mut r, n, extra);
        let dec = bridges_and_components(&g).unwrap();
        for (u, v) in g.edges() {
            prop_assert_eq!(dec.is_bridge(u, v), !g.without_edge(u, v).is_connected());
        }
    }

    #[test]
    fn hanging_weights_sum_to_n(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cycle = r.random_range(3..=10);
        let ears = r.random_range(0..=3);
        let trees = r.random_range(0..=15);
        let og = random_host(&mut r, cycle, ears, 5, trees);
        let dec = bridges_and_components(og.graph()).unwrap();
        for h in dec.nontrivial() {
            prop_assert_eq!(h.weights().map(|(_, w)| w).sum::<usize>(), og.n());
        }
    }

    #[test]
    fn power_diameter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=40);
        let extra = r.random_range(0..=n / 3);
        let g = random_connected(&mut r, n, extra);
        let d = g.diameter().unwrap();
        prop_assert_eq!(graph_power(&g, 4).unwrap().diameter().unwrap(), d.div_ceil(4));
    }

    #[test]
    fn social_cost_two_ways(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=16);
        let extra = r.random_range(0..=n);
        let alpha = small_alpha(&mut r);
        let g = random_connected(&mut r, n, extra);
        let links = random_orientation(&mut r, &g);
        let s = StrategyVector::from_links(n, alpha, links).unwrap();
        prop_assert_eq!(social_cost(&s), graph_social_cost(&g, alpha));
    }

    #[test]
    fn social_cost_at_least_optimum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=7);
        let extra = r.random_range(0..=2 * n);
        let alpha = small_alpha(&mut r);
        let g = random_connected(&mut r, n, extra);
        let opt = optimum_cost(n, alpha);
        prop_assert!(opt.certified);
        prop_assert!(graph_social_cost(&g, alpha).finite().unwrap() >= opt.cost);
    }

    #[test]
    fn incremental_delta_matches_recompute(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=10);
        let p = r.random_range(0.05..0.5);
        let alpha = small_alpha(&mut r);
        let s = random_profile(&mut r, n, p, alpha);
        let u = r.random_range(0..n);
        let new: BTreeSet<usize> = (0..n).filter(|&v| v != u && r.random_bool(0.3)).collect();
        let d = Deviation::new(&s, u, new).unwrap();
        prop_assert_eq!(cost_delta(&s, &d), cost_delta_recompute(&s, &d));
    }

    #[test]
    fn exact_nash_matches_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=5);
        let p = r.random_range(0.1..0.6);
        let alpha = small_alpha(&mut r);
        let s = random_profile(&mut r, n, p, alpha);
        let v = is_nash(&s, VerifyMode::Exact, 8).unwrap();
        prop_assert_eq!(v.is_equilibrium(), Some(nash_brute(&s)));
        if let Some(w) = v.witness {
            prop_assert!(w.delta.is_improving());
            prop_assert_eq!(w.delta, cost_delta_recompute(&s, &w.deviation));
        }
    }

    #[test]
    fn two_swap_formula_matches_recompute(seed in any::<u64>()) {
        let mut r = rng(seed);
        if let Some(case) = random_two_path_case(&mut r) {
            let s = &case.strategies;
            let og = build_comm_graph(s);
            let path = TwoPath::new(&og, case.path.clone()).unwrap();
            let nodes = path.nodes().to_vec();
            let i = case.i;
            let formula = two_swap_delta_formula(&og, &path, i).unwrap();
            let mut strategy = s.strategy(nodes[i]).clone();
            strategy.remove(&nodes[i + 1]);
            strategy.insert(nodes[i + 2]);
            let d = Deviation::tagged(s, nodes[i], strategy, DeviationKind::TwoSwap).unwrap();
            prop_assert_eq!(CostDelta::Finite(formula), cost_delta_recompute(s, &d));
        }
    }

    #[test]
    fn bracket_monotone_in_offsets(seed in any::<u64>(), a in -6i64..6, b in -6i64..6) {
        if let Some(cs) = random_coords(seed) {
            let count = |a0: i64, a1: i64| bracket_count(&cs, &BracketQuery::first_underlined(&[a0, a1])).unwrap();
            prop_assert!(count(a, b + 1) >= count(a, b));
            prop_assert!(count(a + 1, b) <= count(a, b));
        }
    }

    #[test]
    fn angle_difference_is_square(seed in any::<u64>(), a in -6i64..6) {
        if let Some(cs) = random_coords(seed) {
            let angle = |a0: i64| bracket_count(&cs, &BracketQuery::first_underlined(&[a0, 0])).unwrap();
            // x1 + a = x2  <=>  x1 - x2 = 0 - a
            let square = bracket_count(&cs, &BracketQuery::Square { offsets: [0, a] }).unwrap();
            prop_assert_eq!(angle(a) - angle(a + 1), square);
        }
    }

    #[test]
    fn reduced_digraph_counts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cycle = r.random_range(3..=12);
        let ears = r.random_range(1..=4);
        let trees = r.random_range(0..=5);
        let og = random_host(&mut r, cycle, ears, 6, trees);
        let dec = bridges_and_components(og.graph()).unwrap();
        for h in dec.nontrivial() {
            if let Ok(red) = build_reduced(&og, h) {
                prop_assert_eq!(h.len(), red.m() + red.weight_sum());
                prop_assert_eq!(h.edges().len(), red.edges.iter().map(|e| e.weight() + 1).sum::<usize>());
            }
        }
    }

    #[test]
    fn profile_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=12);
        let alpha = small_alpha(&mut r);
        let s = random_profile(&mut r, n, 0.2, alpha);
        let text = write_profile(&s);
        prop_assert_eq!(parse_profile(&text).unwrap(), s);
    }
}

#[test]
fn two_swap_formula_500_cases() {
    let mut r = rng(0x2_5a7);
    let mut done = 0;
    while done < 500 {
        let Some(case) = random_two_path_case(&mut r) else { continue };
        let og = build_comm_graph(&case.strategies);
        let path = TwoPath::new(&og, case.path.clone()).unwrap();
        let nodes = path.nodes().to_vec();
        let formula = two_swap_delta_formula(&og, &path, case.i).unwrap();
        let mut strategy = case.strategies.strategy(nodes[case.i]).clone();
        strategy.remove(&nodes[case.i + 1]);
        strategy.insert(nodes[case.i + 2]);
        let d = Deviation::tagged(&case.strategies, nodes[case.i], strategy, DeviationKind::TwoSwap).unwrap();
        assert_eq!(CostDelta::Finite(formula), cost_delta_recompute(&case.strategies, &d), "{nodes:?} i={}", case.i);
        done += 1;
    }
}


#[test]
fn coordinate_cases_are_not_vacuous() {
    let built = (0..200u64).filter(|&s| random_coords(s).is_some()).count();
    assert!(built >= 40, "only {built} of 200 seeds gave a separating 2-path");
}
