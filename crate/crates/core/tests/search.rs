//! Enumeration routes cross-checked against each other and against exact
//! verification.

mod common;

use std::collections::BTreeSet;

use ncg::audit::CHECK_NAMES;
use ncg::deviations::{is_nash, VerifyMode};
use ncg::search::{best_response_dynamics, enumerate_ne, profile_key, DynamicsStatus, SearchSpec};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{q, random_profile};

fn alphas() -> Vec<Rational64> {
    vec![Rational64::new(1, 2), q(1), Rational64::new(3, 2), q(2), q(3), q(5), q(17)]
}

fn keys(spec: &SearchSpec) -> Vec<BTreeSet<u64>> {
    enumerate_ne(spec)
        .unwrap()
        .iter()
        .map(|e| e.equilibria.iter().map(profile_key).collect())
        .collect()
}

#[test]
fn symmetric_matches_naive() {
    for n in 2..=4 {
        let sym = SearchSpec::new(n, alphas());
        let naive = SearchSpec { symmetry: false, ..sym.clone() };
        assert_eq!(keys(&sym), keys(&naive), "n={n}");
    }
}

#[test]
fn pruning_is_sound() {
    for n in 3..=5 {
        let plain = SearchSpec::new(n, alphas());
        let pruned = SearchSpec { prune: CHECK_NAMES.iter().map(|c| c.to_string()).collect(), ..plain.clone() };
        assert_eq!(keys(&plain), keys(&pruned), "n={n}");
    }
}

#[test]
fn random_profiles_agree_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ea4c4);
    let alphas = alphas();
    let sets = keys(&SearchSpec::new(4, alphas.clone()));
    let mut hits = 0;
    for _ in 0..100 {
        let i = rng.random_range(0..alphas.len());
        let p = rng.random_range(0.15..0.6);
        let s = random_profile(&mut rng, 4, p, alphas[i]);
        let ne = is_nash(&s, VerifyMode::Exact, 8).unwrap().is_equilibrium().unwrap();
        hits += ne as usize;
        assert_eq!(sets[i].contains(&profile_key(&s)), ne, "{:?} alpha={}", s.strategies(), alphas[i]);
    }
    assert!(hits > 0);
}

#[test]
fn dynamics_end_in_equilibria() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1a);
    let mut converged = 0;
    for _ in 0..40 {
        let n = rng.random_range(3..=6);
        let alpha = alphas()[rng.random_range(0..alphas().len())];
        let s = random_profile(&mut rng, n, 0.3, alpha);
        let t = best_response_dynamics(&s, 50, 8).unwrap();
        if t.status == DynamicsStatus::Converged {
            converged += 1;
            assert_eq!(is_nash(&t.last, VerifyMode::Exact, 8).unwrap().is_equilibrium(), Some(true));
        }
    }
    assert!(converged > 0);
}
