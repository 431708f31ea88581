//! Acceptance suite: one PASS/FAIL line per criterion, then a single assert.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ncg::audit::{run_audit, AuditConfig, Verdict};
use ncg::coords::{two_swap_delta_formula, TwoPath};
use ncg::dau::{check_power_collapse, epsilon_grid, DauOptions};
use ncg::deviations::{cost_delta_recompute, Deviation, DeviationKind};
use ncg::game::{build_comm_graph, optimum_cost, social_cost, CostDelta, StrategyVector};
use ncg::search::{enumerate_ne, AlphaExpr, Enumeration, SearchSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{q, random_connected, random_two_path_case, rotational_cycle};

const GRID: [&str; 8] = ["1/2", "1", "2", "n", "4n+1", "9n+1", "17n+1", "20n"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Every equilibrium of the grid, tagged with its `n`.
fn grid_equilibria() -> Vec<(usize, Enumeration)> {
    let exprs: Vec<AlphaExpr> = GRID.iter().map(|g| g.parse().unwrap()).collect();
    let mut all = Vec::new();
    for n in 3..=6 {
        let spec = SearchSpec::new(n, exprs.iter().map(|e| e.eval(n)).collect());
        for e in enumerate_ne(&spec).unwrap() {
            all.push((n, e));
        }
    }
    all
}

fn is_tree(s: &StrategyVector) -> bool {
    build_comm_graph(s).graph().is_tree()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut mismatches = Vec::new();
    let mut cases = 0;
    let mut check = |s: &StrategyVector, nodes: &[usize], i: usize| {
        let og = build_comm_graph(s);
        let path = TwoPath::new(&og, nodes.to_vec()).unwrap();
        let nodes = path.nodes().to_vec();
        let formula = two_swap_delta_formula(&og, &path, i).unwrap();
        let mut strategy: BTreeSet<usize> = s.strategy(nodes[i]).clone();
        strategy.remove(&nodes[i + 1]);
        strategy.insert(nodes[i + 2]);
        let d = Deviation::tagged(s, nodes[i], strategy, DeviationKind::TwoSwap).unwrap();
        let brute = cost_delta_recompute(s, &d);
        if brute != CostDelta::Finite(formula) {
            mismatches.push(format!("{nodes:?} i={i}: formula {formula}, brute {brute}"));
        }
        formula
    };
    let c8 = check(&rotational_cycle(8, q(1)), &[0, 1, 2], 0);
    while cases < 500 {
        if let Some(case) = random_two_path_case(&mut rng) {
            check(&case.strategies, &case.path, case.i);
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && c8 == q(-2) && elapsed < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "{cases} random 2-paths, {} mismatches, C8 delta {c8}, {:.2}s{}",
            mismatches.len(),
            elapsed.as_secs_f64(),
            mismatches.first().map(|m| format!("; first: {m}")).unwrap_or_default()
        ),
    )
}

fn criterion_2(eqs: &[(usize, Enumeration)]) -> Outcome {
    let cfg = AuditConfig::default();
    let (mut profiles, mut applicable) = (0, 0);
    let mut failures = Vec::new();
    for (n, e) in eqs {
        for s in &e.equilibria {
            profiles += 1;
            let report = run_audit(s, None, &cfg).unwrap();
            applicable += report.records.iter().filter(|r| r.verdict != Verdict::NotApplicable).count();
            for r in report.failures() {
                failures.push(format!("n={n} alpha={} {}: {:?}", e.alpha, r.check, s.strategies()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{profiles} equilibria over n=3..6 and 8 alphas, full space, {applicable} applicable check runs, {} failures{}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn criterion_3(eqs: &[(usize, Enumeration)]) -> Outcome {
    let (mut cells, mut non_tree_high, mut telemetry) = (0, 0, Vec::new());
    for (n, e) in eqs {
        let nq = q(*n as i64);
        let trees = e.equilibria.iter().all(is_tree);
        if e.alpha > q(17) * nq {
            cells += 1;
            if !trees {
                non_tree_high += 1;
            }
        }
        if e.alpha > nq && !trees {
            telemetry.push(format!("n={n} alpha={}", e.alpha));
        }
    }
    outcome(
        non_tree_high == 0 && cells > 0,
        format!(
            "{cells} cells above 17n, {non_tree_high} with a non-tree equilibrium; \
             non-tree equilibria above alpha = n: {}",
            if telemetry.is_empty() { "none".to_string() } else { telemetry.join(", ") }
        ),
    )
}

fn criterion_4(eqs: &[(usize, Enumeration)]) -> Outcome {
    let (mut trees, mut worst, mut bad) = (0, q(0), 0);
    for (n, e) in eqs {
        let opt = optimum_cost(*n, e.alpha);
        assert!(opt.certified);
        for s in e.equilibria.iter().filter(|s| is_tree(s)) {
            trees += 1;
            let ratio = social_cost(s).finite().unwrap() / opt.cost;
            worst = worst.max(ratio);
            if ratio >= q(5) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0 && trees > 0, format!("{trees} tree equilibria, worst ratio {worst}, {bad} at or above 5"))
}

fn criterion_5(eqs: &[(usize, Enumeration)]) -> Outcome {
    let cfg = AuditConfig::default();
    let checks = vec!["diameter-relation".to_string(), "poa-diameter-bound".to_string()];
    let (mut diam_runs, mut poa_runs, mut failures) = (0, 0, 0);
    for (_, e) in eqs {
        for s in &e.equilibria {
            let report = run_audit(s, Some(&checks), &cfg).unwrap();
            for r in &report.records {
                if r.verdict == Verdict::NotApplicable {
                    continue;
                }
                if r.check == "diameter-relation" {
                    diam_runs += 1;
                } else {
                    poa_runs += 1;
                }
                if r.verdict == Verdict::Fail {
                    failures += 1;
                }
            }
        }
    }
    outcome(
        failures == 0 && poa_runs > 0,
        format!(
            "diameter relation applicable on {diam_runs}, diam+1 ratio bound on {poa_runs}, {failures} failures; \
             the asymptotic constant is replaced by the per-equilibrium diam+1 bound"
        ),
    )
}

fn criterion_6(eqs: &[(usize, Enumeration)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let grid = epsilon_grid();
    let mut collapse_fail = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=40);
        let extra = rng.random_range(0..=n);
        let g = random_connected(&mut rng, n, extra);
        if !check_power_collapse(&g, &grid, DauOptions::default()).unwrap().holds() {
            collapse_fail += 1;
        }
    }
    let mut parts = vec![format!("power collapse on 200 random graphs: {collapse_fail} failures")];
    let mut ok = collapse_fail == 0;
    for c in [5, 8] {
        let cfg = AuditConfig { dau_c: q(c), ..AuditConfig::default() };
        let checks = vec!["ne-dau".to_string()];
        let (mut runs, mut fails) = (0, 0);
        for (_, e) in eqs {
            for s in &e.equilibria {
                let r = &run_audit(s, Some(&checks), &cfg).unwrap().records[0];
                match r.verdict {
                    Verdict::Pass => runs += 1,
                    Verdict::Fail => {
                        runs += 1;
                        fails += 1;
                    }
                    Verdict::NotApplicable => {}
                }
            }
        }
        if runs == 0 {
            parts.push(format!("C={c}: alpha range empty on the grid (not counted)"));
        } else {
            parts.push(format!("C={c}: {runs} equilibria in range, {fails} failures"));
        }
        ok &= fails == 0;
    }
    outcome(ok, parts.join("; "))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = ncg::cli::run(args.iter().copied(), &mut out, &mut err);
    (code, out)
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let c16 = dir.path().join("c16.txt");
    let c16_text = ncg::profile::write_profile(&rotational_cycle(16, q(80)));
    std::fs::write(&c16, c16_text).unwrap();
    let path6 = dir.path().join("p6.txt");
    std::fs::write(&path6, "ncg 6 2/1\n0: 1\n1: 2\n2: 3\n3: 4\n4: 5\n5:\n").unwrap();
    let c16 = c16.to_str().unwrap();
    let path6 = path6.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["ncg", "search", "--n", "3-5", "--alpha", "1/2,1,2,n,4n+1", "--table", "--format", "csv"],
        vec!["ncg", "search", "--n", "4", "--alpha", "1,2", "--format", "csv"],
        vec!["ncg", "audit", c16, "--format", "jsonl"],
        vec!["ncg", "audit", path6, "--format", "jsonl"],
    ];
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut differing = Vec::new();
    for cmd in &commands {
        let a = run_cli(cmd);
        let b = run_cli(cmd);
        let c = single.install(|| run_cli(cmd));
        if a != b || a != c || a.1.is_empty() {
            differing.push(cmd[1..3].join(" "));
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} commands, each run twice and once on a single thread; {} differ",
            commands.len(),
            differing.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let c16 = rotational_cycle(16, q(80));
    let checks = vec!["two-paths".to_string(), "degree-lower".to_string()];
    let report = run_audit(&c16, Some(&checks), &AuditConfig::default()).unwrap();
    let both_fail = report.records.iter().all(|r| r.verdict == Verdict::Fail);
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("tri.txt");
    std::fs::write(&tri, "ncg 3 3/1\n0: 1\n1: 2\n2: 0\n").unwrap();
    let (code, out) = run_cli(&["ncg", "verify", tri.to_str().unwrap()]);
    let text = String::from_utf8(out).unwrap();
    let refuted = code == 2 && text.contains("witness: player 0 drop {1}: delta -2");
    outcome(
        both_fail && refuted,
        format!(
            "C16 at alpha=5n: two-paths {}, degree-lower {}; triangle at alpha=3: exit {code}, {}",
            report.records[0].verdict,
            report.records[1].verdict,
            text.lines().find(|l| l.starts_with("witness")).unwrap_or("no witness")
        ),
    )
}

#[test]
fn acceptance() {
    let eqs = grid_equilibria();
    let results = [
        criterion_1(),
        criterion_2(&eqs),
        criterion_3(&eqs),
        criterion_4(&eqs),
        criterion_5(&eqs),
        criterion_6(&eqs),
        criterion_7(),
        criterion_8(),
    ];
    for (i, r) in results.iter().enumerate() {
        println!("[criterion {}] {} {}", i + 1, if r.pass { "PASS" } else { "FAIL" }, r.detail);
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, r)| !r.pass).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
