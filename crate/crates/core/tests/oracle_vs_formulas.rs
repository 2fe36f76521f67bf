use std::collections::BTreeMap;

use golflab::exact::{
    block_law_full, cycle_law, multiball_law, parking_law, prob_remaining_holes_cycle, MultiballConvention,
};
use golflab::model::block_sizes;
use golflab::oracle::{
    all_configs, census_averaged_law, conditional_block_check, exact_final_distribution,
    exact_final_distribution_multiball, exact_parking_distribution,
};
use golflab::{BigRational, CycleConfig, ExactDistribution, MultiballConfig, Strategy};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn strategies() -> Vec<Strategy> {
    vec![Strategy::pwalk(1, 2), Strategy::pwalk(1, 3), Strategy::NearestHole, Strategy::fixed_direction(0, 1)]
}

#[test]
fn uniform_configuration_law_matches_formula_up_to_n5() {
    for n in 1..=5 {
        for nt in 0..=n {
            for nb in 0..=nt.min(n - nt) {
                let formula = cycle_law(n, nb, nt).unwrap();
                for s in strategies() {
                    let oracle = census_averaged_law(n, nb, nt, &s).unwrap();
                    assert_eq!(oracle, formula, "n={n} nb={nb} nt={nt} {s}");
                }
            }
        }
    }
}

#[test]
fn four_sites_one_ball_three_holes() {
    let formula = cycle_law(4, 1, 3).unwrap();
    assert_eq!(formula.mass(&[2, 3]), q(1, 4));
    let c: CycleConfig = "BHHH".parse().unwrap();
    for s in strategies() {
        let law = exact_final_distribution(&c, &s).unwrap();
        assert!(law.is_normalized());
        // Only neighbours of the ball can be filled.
        for (x, _) in law.iter() {
            assert!(x.contains(&2));
        }
    }
}

#[test]
fn oracle_is_rotation_equivariant() {
    for c in all_configs(6, 2, 3).unwrap() {
        let base = exact_final_distribution(&c, &Strategy::pwalk(2, 3)).unwrap();
        for r in 1..6 {
            let rotated = exact_final_distribution(&c.rotated(r), &Strategy::pwalk(2, 3)).unwrap();
            let shifted = base.map_keys(|x| {
                let mut y: Vec<usize> = x.iter().map(|v| (v + r) % 6).collect();
                y.sort_unstable();
                y
            });
            assert_eq!(rotated, shifted);
        }
    }
}

#[test]
fn uniform_law_is_constant_in_p() {
    let reference = census_averaged_law(6, 2, 4, &Strategy::pwalk(1, 2)).unwrap();
    for (a, b) in [(1, 4), (1, 3), (2, 3)] {
        assert_eq!(census_averaged_law(6, 2, 4, &Strategy::pwalk(a, b)).unwrap(), reference);
    }
}

#[test]
fn interval_survival_is_a_product() {
    for (n, nb, nt) in [(5, 1, 3), (6, 2, 4), (6, 1, 2), (7, 2, 3)] {
        for s in [Strategy::pwalk(1, 2), Strategy::pwalk(1, 4), Strategy::NearestHole] {
            let r = conditional_block_check(n, nb, nt, &s).unwrap();
            assert!(r.groups > 0);
            assert_eq!(r.mismatch, None, "n={n} nb={nb} nt={nt} {s}");
        }
    }
}

#[test]
fn mini_golf_single_hole_is_uniform() {
    for n in 1..=8 {
        for nb in 0..n {
            let nt = nb + 1;
            if nb + nt > n {
                break;
            }
            for x in 0..n {
                assert_eq!(prob_remaining_holes_cycle(n, nb, nt, &[x]).unwrap(), q(1, n as i64));
            }
        }
    }
}

#[test]
fn full_cycle_block_law_matches_hole_set_law() {
    for (n, nb) in [(4, 1), (6, 2), (8, 3), (9, 3), (10, 4)] {
        let nt = n - nb;
        let via_sets = cycle_law(n, nb, nt).unwrap().map_keys(|x| block_sizes(x, n).unwrap().deltas);
        assert_eq!(via_sets, block_law_full(n, nb).unwrap(), "n={n} nb={nb}");
    }
}

#[test]
fn parking_formula_matches_oracle() {
    for n in 1..=5 {
        for m in 0..n.min(5) {
            let formula = parking_law(n, m).unwrap();
            for s in [Strategy::pwalk(1, 1), Strategy::pwalk(1, 2), Strategy::NearestHole] {
                assert_eq!(exact_parking_distribution(n, m, &s).unwrap(), formula, "n={n} m={m} {s}");
            }
        }
    }
}

fn multiball_oracle_law(n: usize, census: &BTreeMap<i32, usize>, s: &Strategy) -> ExactDistribution {
    // Average over all arrangements of the census.
    let mut kinds: Vec<i32> = Vec::new();
    for (&j, &c) in census {
        kinds.extend(std::iter::repeat_n(j, c));
    }
    kinds.sort_unstable();
    let mut arrangements = Vec::new();
    loop {
        arrangements.push(kinds.clone());
        // next lexicographic permutation
        let Some(i) = (0..kinds.len().saturating_sub(1)).rev().find(|&i| kinds[i] < kinds[i + 1]) else {
            break;
        };
        let j = (i + 1..kinds.len()).rev().find(|&j| kinds[j] > kinds[i]).unwrap();
        kinds.swap(i, j);
        kinds[i + 1..].reverse();
    }
    assert_eq!(arrangements.len(), arrangements.iter().collect::<std::collections::BTreeSet<_>>().len());
    let w = BigRational::new(1.into(), arrangements.len().into());
    let mut law = ExactDistribution::new();
    for a in arrangements {
        assert_eq!(a.len(), n);
        let m = MultiballConfig::new(a).unwrap();
        law.merge(&exact_final_distribution_multiball(&m, s).unwrap(), &w);
    }
    law
}

#[test]
fn multiball_formula_matches_oracle_with_closing_hole_counted() {
    let cases: Vec<(usize, Vec<(i32, usize)>)> = vec![
        (4, vec![(-1, 3), (1, 1)]),
        (4, vec![(-1, 3), (2, 0), (0, 1)]),
        (5, vec![(-1, 3), (2, 1), (0, 1)]),
        (5, vec![(-1, 4), (2, 1)]),
        (6, vec![(-1, 4), (2, 1), (0, 1)]),
        (6, vec![(-1, 4), (1, 1), (2, 1)]),
        (6, vec![(-1, 5), (3, 1)]),
        (6, vec![(-1, 4), (1, 2)]),
    ];
    for (n, pairs) in cases {
        let census: BTreeMap<i32, usize> = pairs.into_iter().filter(|&(_, c)| c > 0).collect();
        let formula = multiball_law(n, &census, MultiballConvention::ClosingHoleCounted).unwrap();
        let oracle = multiball_oracle_law(n, &census, &Strategy::pwalk(1, 2));
        assert_eq!(oracle, formula, "n={n} census={census:?}");
        let literal = multiball_law(n, &census, MultiballConvention::Literal);
        assert!(literal.map(|l| l != oracle).unwrap_or(true));
    }
}
