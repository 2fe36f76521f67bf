use std::collections::BTreeMap;

use golflab::dynamics::{run_golf, run_golf_logged, run_golf_multiball, run_parking, simulate_golf};
use golflab::exact::{block_law_full, cycle_law, multiball_law, parking_law, rational_to_f64, MultiballConvention};
use golflab::forest::sample_block_sizes_via_forest;
use golflab::model::sample_initial_cycle;
use golflab::parallel::run_trials;
use golflab::stats::{chi_square_gof, chi_square_two_sample, GofResult};
use golflab::{Clocks, ExactDistribution, MultiballConfig, Seed, Strategy};
use rand::seq::SliceRandom;

/// Pearson test of sampled keys against an exact law; keys outside the
/// support land in a zero-probability cell.
fn test_against(draws: &[Vec<usize>], law: &ExactDistribution) -> GofResult {
    let keys: Vec<&Vec<usize>> = law.iter().map(|(k, _)| k).collect();
    let mut probs: Vec<f64> = law.iter().map(|(_, p)| rational_to_f64(p)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    probs.push(0.0);
    let mut counts = vec![0u64; probs.len()];
    for d in draws {
        let i = keys.iter().position(|k| *k == d).unwrap_or(keys.len());
        counts[i] += 1;
    }
    chi_square_gof(&counts, &probs).unwrap()
}

#[test]
fn initial_configurations_are_uniform() {
    // 5!/(1! 2! 2!) = 30 configurations.
    let draws = run_trials(Seed(31), 60_000, |_, rng| sample_initial_cycle(5, 1, 2, rng).unwrap().to_string());
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for d in draws {
        *counts.entry(d).or_default() += 1;
    }
    assert_eq!(counts.len(), 30);
    let c: Vec<u64> = counts.values().copied().collect();
    assert!(!chi_square_gof(&c, &[1.0 / 30.0; 30]).unwrap().reject_at_1pct);
    // Sparse placement path.
    let draws = run_trials(Seed(32), 40_000, |_, rng| sample_initial_cycle(40, 1, 1, rng).unwrap().to_string());
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for d in draws {
        *counts.entry(d).or_default() += 1;
    }
    assert_eq!(counts.len(), 40 * 39);
}

#[test]
fn golf_hole_sets_follow_the_formula() {
    let strategies = [
        Strategy::pwalk(1, 2),
        Strategy::pwalk(1, 5),
        Strategy::pwalk(1, 1),
        Strategy::NearestHole,
        Strategy::fixed_direction(1, 3),
        Strategy::ParityRule,
    ];
    for (j, s) in strategies.iter().enumerate() {
        for (n, nb, nt) in [(7, 2, 4), (9, 3, 4)] {
            let law = cycle_law(n, nb, nt).unwrap();
            let draws = run_trials(Seed(40).child(j as u64), 50_000, |_, rng| {
                let c = sample_initial_cycle(n, nb, nt, rng).unwrap();
                simulate_golf(&c, s, rng).unwrap().remaining_holes
            });
            let r = test_against(&draws, &law);
            assert!(!r.reject_at_1pct, "{s} n={n} nb={nb} nt={nt} {r:?}");
        }
    }
}

#[test]
fn fixed_activation_orders_give_the_same_law() {
    let (n, nb, nt) = (8, 3, 4);
    let law = cycle_law(n, nb, nt).unwrap();
    for (j, order) in [vec![0, 1, 2], vec![2, 1, 0], vec![1, 2, 0]].into_iter().enumerate() {
        let clocks = Clocks::from_order(order).unwrap();
        let draws = run_trials(Seed(41).child(j as u64), 50_000, |_, rng| {
            let c = sample_initial_cycle(n, nb, nt, rng).unwrap();
            run_golf(&c, &Strategy::pwalk(1, 3), &clocks, rng).unwrap().remaining_holes
        });
        assert!(!test_against(&draws, &law).reject_at_1pct);
    }
}

#[test]
fn logged_engine_agrees_with_fast_engine() {
    let (n, nb, nt) = (10, 3, 5);
    let law = cycle_law(n, nb, nt).unwrap();
    let s = Strategy::pwalk(2, 5);
    let draws = run_trials(Seed(42), 40_000, |_, rng| {
        let c = sample_initial_cycle(n, nb, nt, rng).unwrap();
        let clocks = Clocks::sample(nb, false, rng);
        let out = run_golf_logged(&c, &s, &clocks, rng).unwrap();
        let log = out.trajectory.as_ref().unwrap();
        // Walks never touch a hole that stays free.
        for e in log {
            for &h in &out.remaining_holes {
                assert!(!e.visited(h, n));
            }
        }
        out.remaining_holes
    });
    assert!(!test_against(&draws, &law).reject_at_1pct);
}

#[test]
fn golf_blocks_match_forest_blocks_and_exact_law() {
    let (n, nl) = (12, 4);
    let nb = (n - nl) / 2;
    let law = block_law_full(n, nb).unwrap();
    let keys: Vec<Vec<usize>> = law.iter().map(|(k, _)| k.clone()).collect();
    let index = |d: &Vec<usize>| keys.iter().position(|k| k == d).unwrap();
    let golf = run_trials(Seed(43), 100_000, |_, rng| {
        let c = sample_initial_cycle(n, nb, nb + nl, rng).unwrap();
        simulate_golf(&c, &Strategy::pwalk(1, 2), rng).unwrap().block_sizes().unwrap().deltas
    });
    let forest = run_trials(Seed(44), 100_000, |_, rng| sample_block_sizes_via_forest(n, nl, rng).unwrap().deltas);
    let mut a = vec![0u64; keys.len()];
    let mut b = vec![0u64; keys.len()];
    golf.iter().for_each(|d| a[index(d)] += 1);
    forest.iter().for_each(|d| b[index(d)] += 1);
    assert!(!chi_square_two_sample(&a, &b).unwrap().reject_at_1pct);
    assert!(!test_against(&golf, &law).reject_at_1pct);
    assert!(!test_against(&forest, &law).reject_at_1pct);
}

#[test]
fn parking_follows_the_formula() {
    for (n, m) in [(6, 4), (8, 5)] {
        let law = parking_law(n, m).unwrap();
        for (j, s) in [Strategy::pwalk(1, 1), Strategy::pwalk(1, 2), Strategy::ParityRule].iter().enumerate() {
            let draws = run_trials(Seed(45).child(j as u64), 50_000, |_, rng| {
                run_parking(n, m, s, rng).unwrap().remaining_holes
            });
            let r = test_against(&draws, &law);
            assert!(!r.reject_at_1pct, "{s} n={n} m={m} {r:?}");
        }
    }
}

#[test]
fn multiball_follows_the_formula() {
    let census = BTreeMap::from([(-1, 4), (0, 1), (1, 1), (2, 1)]);
    let n = 7;
    let law = multiball_law(n, &census, MultiballConvention::ClosingHoleCounted).unwrap();
    let mut base: Vec<i32> = Vec::new();
    for (&j, &c) in &census {
        base.extend(std::iter::repeat_n(j, c));
    }
    let draws = run_trials(Seed(46), 50_000, |_, rng| {
        let mut m = base.clone();
        m.shuffle(rng);
        let config = MultiballConfig::new(m).unwrap();
        run_golf_multiball(&config, &Strategy::pwalk(1, 2), rng).unwrap().remaining_holes
    });
    let r = test_against(&draws, &law);
    assert!(!r.reject_at_1pct, "{r:?}");
}
