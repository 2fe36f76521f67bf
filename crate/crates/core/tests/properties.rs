use golflab::dynamics::{run_golf, run_golf_logged};
use golflab::exact::{format_rational, parse_rational, prob_remaining_holes_cycle, BigRational};
use golflab::forest::{excursion_lengths, forest_to_path, path_to_forest, rot_discrete, sample_first_passage_path};
use golflab::model::{block_sizes, walk_prob_right, SiteState};
use golflab::oracle::hitting_prob_interval;
use golflab::{Clocks, CycleConfig, ExactDistribution, Seed, Strategy};
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use proptest::strategy::Strategy as PropStrategy;

fn config_strategy() -> impl PropStrategy<Value = CycleConfig> {
    proptest::collection::vec(prop_oneof![Just('B'), Just('H'), Just('.')], 1..40).prop_filter_map(
        "at most as many balls as holes",
        |cs| {
            let s: String = cs.into_iter().collect();
            let c: CycleConfig = s.parse().ok()?;
            (c.ball_count() <= c.hole_count()).then_some(c)
        },
    )
}

fn golf_strategy() -> impl PropStrategy<Value = Strategy> {
    prop_oneof![
        (0i64..=8).prop_map(|a| Strategy::pwalk(a, 8)),
        (0i64..=4).prop_map(|a| Strategy::fixed_direction(a, 4)),
        Just(Strategy::NearestHole),
        Just(Strategy::ParityRule),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_remaining_interval_is_balanced(c in config_strategy(), s in golf_strategy(), seed in any::<u64>()) {
        let mut rng = Seed(seed).rng();
        let clocks = Clocks::sample(c.ball_count(), s.needs_clock(), &mut rng);
        let out = run_golf(&c, &s, &clocks, &mut rng).unwrap();
        let x = &out.remaining_holes;
        prop_assert_eq!(x.len(), c.hole_count() - c.ball_count());
        let holes = c.holes();
        prop_assert!(x.iter().all(|v| holes.contains(v)));
        // Between consecutive remaining holes, balls and holes balance.
        let n = c.n();
        for (j, &a) in x.iter().enumerate() {
            let b = x[(j + 1) % x.len()];
            let len = (b + n - a - 1) % n;
            let sum: i64 = (1..=len).map(|d| c.states()[(a + d) % n].increment()).sum();
            prop_assert_eq!(sum, 0);
        }
        if !x.is_empty() {
            let blocks = block_sizes(x, n).unwrap();
            prop_assert_eq!(blocks.total(), n - x.len());
        }
    }

    #[test]
    fn logged_walks_avoid_the_final_holes(c in config_strategy(), s in golf_strategy(), seed in any::<u64>()) {
        let mut rng = Seed(seed).rng();
        let clocks = Clocks::sample(c.ball_count(), s.needs_clock(), &mut rng);
        let out = run_golf_logged(&c, &s, &clocks, &mut rng).unwrap();
        let log = out.trajectory.as_ref().unwrap();
        prop_assert_eq!(log.len(), c.ball_count());
        for e in log {
            prop_assert_eq!(c.states()[e.filled], SiteState::Hole);
            for &h in &out.remaining_holes {
                prop_assert!(!e.visited(h, c.n()));
            }
        }
    }

    #[test]
    fn text_round_trips(c in config_strategy(), s in golf_strategy()) {
        prop_assert_eq!(c.to_string().parse::<CycleConfig>().unwrap(), c.clone());
        prop_assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s.clone());
        let json = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<Strategy>(&json).unwrap(), s);
    }

    #[test]
    fn rationals_round_trip(p in -1000i64..1000, q in 1i64..1000) {
        let r = BigRational::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn exit_probabilities_agree(len in 2usize..40, k in 1usize..39, a in 1i64..20) {
        prop_assume!(k < len);
        let p = BigRational::new(a.into(), 20.into());
        let right = hitting_prob_interval(len, k, &p).unwrap();
        let left = hitting_prob_interval(len, len - k, &(BigRational::one() - &p)).unwrap();
        prop_assert!((&right + &left).is_one());
        let f = walk_prob_right(a as f64 / 20.0, len, k);
        prop_assert!((right.to_f64().unwrap() - f).abs() < 1e-9);
    }

    #[test]
    fn paths_and_forests(k in 1usize..6, half in 0usize..60, r in 0usize..200, seed in any::<u64>()) {
        let n = k + 2 * half;
        let mut rng = Seed(seed).rng();
        let w = sample_first_passage_path(n, k, &mut rng).unwrap();
        let f = path_to_forest(&w).unwrap();
        prop_assert_eq!(forest_to_path(&f), w.clone());
        let lengths = excursion_lengths(&w).unwrap().lengths();
        prop_assert_eq!(lengths.len(), k);
        prop_assert_eq!(lengths.iter().sum::<usize>(), n - k);
        let r = r % (n + 1);
        prop_assert_eq!(rot_discrete(&rot_discrete(&w, r).unwrap(), n - r).unwrap(), w);
    }

    #[test]
    fn distributions_serialize_losslessly(n in 3usize..8, nb in 0usize..3) {
        prop_assume!(2 * nb < n);
        let nt = n - nb;
        let law = golflab::exact::cycle_law(n, nb, nt).unwrap();
        prop_assert!(law.is_normalized());
        let json = serde_json::to_string(&law).unwrap();
        let back: ExactDistribution = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &law);
        for (x, p) in law.iter() {
            prop_assert_eq!(prob_remaining_holes_cycle(n, nb, nt, x).unwrap(), p.clone());
        }
    }
}
