//! Formula-free exact laws on small cycles.
//!
//! Balls are activated one at a time in a uniformly random order; each
//! activation is resolved with the exact probability of reaching the right
//! or the left nearest free hole. Walk paths are never enumerated. The state
//! after each activation is the pair (free holes, balls still waiting), so
//! orders leading to the same state are merged.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Pow, Zero};

use crate::error::{domain, invalid, Error, Result};
use crate::exact::cycle::for_each_subset;
use crate::exact::{BigRational, ExactDistribution};
use crate::model::{CycleConfig, MultiballConfig, SiteState, Strategy};

/// Largest number of balls the oracle accepts.
pub const MAX_ORACLE_BALLS: usize = 8;
/// Largest cycle the oracle accepts.
pub const MAX_ORACLE_N: usize = 24;
/// Largest cycle the parking oracle accepts.
pub const MAX_PARKING_N: usize = 16;

/// Probability that a walk stepping right with probability `p`, started
/// `k` sites right of the left end of an interval of length `len`, exits
/// on the right.
pub fn hitting_prob_interval(len: usize, k: usize, p: &BigRational) -> Result<BigRational> {
    if !(0 < k && k < len) {
        return Err(domain(format!("need 0 < k < len (k={k}, len={len})")));
    }
    if *p <= BigRational::zero() || *p >= BigRational::one() {
        return Err(domain(format!("p={p} outside (0,1)")));
    }
    let half = BigRational::new(1.into(), 2.into());
    if *p == half {
        return Ok(BigRational::new(k.into(), len.into()));
    }
    let r = (BigRational::one() - p) / p;
    let rk: BigRational = Pow::pow(&r, k as u32);
    let rl: BigRational = Pow::pow(&r, len as u32);
    Ok((BigRational::one() - rk) / (BigRational::one() - rl))
}

fn nearest_free(free: u32, v: usize, n: usize) -> (usize, usize, usize, usize) {
    let mut dr = 1;
    while free & (1 << ((v + dr) % n)) == 0 {
        dr += 1;
    }
    let mut dl = 1;
    while free & (1 << ((v + n - dl) % n)) == 0 {
        dl += 1;
    }
    ((v + n - dl) % n, dl, (v + dr) % n, dr)
}

fn holes_of(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&v| mask & (1 << v) != 0).collect()
}

/// Law of the final free-hole set for holes `holes` and balls at `balls`
/// (repeats allowed), all activation orders equally likely.
fn law_from_sites(n: usize, holes: &[usize], balls: &[usize], strategy: &Strategy) -> Result<ExactDistribution> {
    strategy.validate()?;
    if n > MAX_ORACLE_N {
        return Err(Error::TooLarge(format!("oracle supports n <= {MAX_ORACLE_N} (got {n})")));
    }
    if balls.len() > MAX_ORACLE_BALLS {
        return Err(Error::TooLarge(format!(
            "oracle supports at most {MAX_ORACLE_BALLS} balls (got {})",
            balls.len()
        )));
    }
    if balls.len() > holes.len() {
        return Err(invalid("more balls than holes"));
    }
    let start_free = holes.iter().fold(0u32, |m, &h| m | (1 << h));
    let all_balls: u16 = ((1u32 << balls.len()) - 1) as u16;
    let mut layer: HashMap<(u32, u16), BigRational> = HashMap::new();
    layer.insert((start_free, all_balls), BigRational::one());
    let mut choice_cache: HashMap<(usize, usize), BigRational> = HashMap::new();
    for remaining in (1..=balls.len()).rev() {
        let pick = BigRational::new(1.into(), remaining.into());
        let mut next: HashMap<(u32, u16), BigRational> = HashMap::new();
        for ((free, waiting), w) in layer {
            let w = w * &pick;
            for (i, &v) in balls.iter().enumerate() {
                if waiting & (1 << i) == 0 {
                    continue;
                }
                let rest = waiting & !(1 << i);
                let (left, dl, right, dr) = nearest_free(free, v, n);
                let mut push = |target: usize, mass: BigRational| {
                    if !mass.is_zero() {
                        *next.entry((free & !(1 << target), rest)).or_insert_with(BigRational::zero) += mass;
                    }
                };
                if left == right {
                    push(left, w.clone());
                    continue;
                }
                let pr = match choice_cache.get(&(dl, dr)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = strategy.prob_right_exact(dl, dr)?;
                        choice_cache.insert((dl, dr), p.clone());
                        p
                    }
                };
                push(right, &w * &pr);
                push(left, &w * (BigRational::one() - pr));
            }
        }
        layer = next;
    }
    let mut law = ExactDistribution::new();
    for ((free, _), w) in layer {
        law.add(holes_of(free, n), w);
    }
    Ok(law)
}

/// Exact law of the remaining hole set for a fixed initial configuration.
pub fn exact_final_distribution(config: &CycleConfig, strategy: &Strategy) -> Result<ExactDistribution> {
    law_from_sites(config.n(), &config.holes(), &config.balls(), strategy)
}

/// Same for a configuration with several balls per site.
pub fn exact_final_distribution_multiball(
    config: &MultiballConfig,
    strategy: &Strategy,
) -> Result<ExactDistribution> {
    let mut holes = Vec::new();
    let mut balls = Vec::new();
    for (v, &m) in config.multiplicity().iter().enumerate() {
        if m < 0 {
            holes.push(v);
        } else {
            balls.extend(std::iter::repeat_n(v, m as usize));
        }
    }
    law_from_sites(config.n(), &holes, &balls, strategy)
}

/// Every configuration of `Z/nZ` with `nb` balls and `nt` holes.
pub fn all_configs(n: usize, nb: usize, nt: usize) -> Result<Vec<CycleConfig>> {
    if nb + nt > n {
        return Err(invalid("balls + holes exceeds n"));
    }
    let mut out = Vec::new();
    for_each_subset(n, nb + nt, |occupied| {
        for_each_subset(nb + nt, nb, |ball_idx| {
            let mut states = vec![SiteState::Neutral; n];
            for &v in occupied {
                states[v] = SiteState::Hole;
            }
            for &i in ball_idx {
                states[occupied[i]] = SiteState::Ball;
            }
            out.push(CycleConfig::new(states).expect("n > 0"));
        });
    });
    Ok(out)
}

/// Law of the remaining hole set when the initial configuration is uniform
/// among those with `nb` balls and `nt` holes.
pub fn census_averaged_law(n: usize, nb: usize, nt: usize, strategy: &Strategy) -> Result<ExactDistribution> {
    if nb > nt {
        return Err(invalid("more balls than holes"));
    }
    let configs = all_configs(n, nb, nt)?;
    let weight = BigRational::new(1.into(), configs.len().into());
    let mut law = ExactDistribution::new();
    for c in &configs {
        law.merge(&exact_final_distribution(c, strategy)?, &weight);
    }
    Ok(law)
}

/// Whether two strategies give the same law of the remaining hole set for
/// a uniform configuration with the census of `config`.
///
/// The law for one fixed configuration does depend on the strategy (a lone
/// ball between two holes fills the right one with probability `p`); the
/// invariance holds once the configuration is uniform.
pub fn verify_p_independence(config: &CycleConfig, first: &Strategy, second: &Strategy) -> Result<bool> {
    let (n, nb, nt) = (config.n(), config.ball_count(), config.hole_count());
    Ok(census_averaged_law(n, nb, nt, first)? == census_averaged_law(n, nb, nt, second)?)
}

/// Exact law of the free-slot set after `m` cars park on `Z/nZ`, each car
/// arriving at a uniform slot and walking with `strategy` to a free one.
pub fn exact_parking_distribution(n: usize, m: usize, strategy: &Strategy) -> Result<ExactDistribution> {
    strategy.validate()?;
    if m >= n {
        return Err(invalid(format!("need cars < n (n={n}, cars={m})")));
    }
    if n > MAX_PARKING_N {
        return Err(Error::TooLarge(format!("parking oracle supports n <= {MAX_PARKING_N} (got {n})")));
    }
    let arrive = BigRational::new(1.into(), n.into());
    let mut layer: HashMap<u32, BigRational> = HashMap::new();
    layer.insert(((1u64 << n) - 1) as u32, BigRational::one());
    for _ in 0..m {
        let mut next: HashMap<u32, BigRational> = HashMap::new();
        for (free, w) in layer {
            let w = w * &arrive;
            for v in 0..n {
                let mut push = |target: usize, mass: BigRational| {
                    if !mass.is_zero() {
                        *next.entry(free & !(1 << target)).or_insert_with(BigRational::zero) += mass;
                    }
                };
                if free & (1 << v) != 0 {
                    push(v, w.clone());
                    continue;
                }
                let (left, dl, right, dr) = nearest_free(free, v, n);
                if left == right {
                    push(left, w.clone());
                    continue;
                }
                let pr = strategy.prob_right_exact(dl, dr)?;
                push(right, &w * &pr);
                push(left, &w * (BigRational::one() - pr));
            }
        }
        layer = next;
    }
    let mut law = ExactDistribution::new();
    for (free, w) in layer {
        law.add(holes_of(free, n), w);
    }
    Ok(law)
}

/// Outcome of [`conditional_block_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCheck {
    /// Number of (hole set, per-interval ball counts) groups compared.
    pub groups: usize,
    pub mismatch: Option<String>,
}

/// Checks that, given the remaining candidate set `X` and the numbers
/// `b_i` of balls (and holes) in each interval between consecutive points
/// of `X`, the oracle leaves exactly `X` free with probability
/// `prod 1/(b_i + 1)`, and never leaves `X` free when some interval holds
/// unequal numbers of balls and holes.
pub fn conditional_block_check(n: usize, nb: usize, nt: usize, strategy: &Strategy) -> Result<BlockCheck> {
    if nb >= nt {
        return Err(invalid("need balls < holes"));
    }
    let nl = nt - nb;
    let mut groups: BTreeMap<(Vec<usize>, Vec<usize>), (BigRational, usize)> = BTreeMap::new();
    for config in all_configs(n, nb, nt)? {
        let law = exact_final_distribution(&config, strategy)?;
        let holes = config.holes();
        let states = config.states();
        let mut mismatch = None;
        for_each_subset(holes.len(), nl, |idx| {
            if mismatch.is_some() {
                return;
            }
            let x: Vec<usize> = idx.iter().map(|&i| holes[i]).collect();
            // Intervals run from each point of x to the next one clockwise.
            let mut counts = Vec::with_capacity(nl);
            let mut balanced = true;
            for (j, &start) in x.iter().enumerate() {
                let end = x[(j + 1) % nl];
                let len = (end + n - start - 1) % n;
                let (mut b, mut h) = (0, 0);
                for d in 1..=len {
                    match states[(start + d) % n] {
                        SiteState::Ball => b += 1,
                        SiteState::Hole => h += 1,
                        SiteState::Neutral => {}
                    }
                }
                balanced &= b == h;
                counts.push(b);
            }
            let mass = law.mass(&x);
            if !balanced {
                if !mass.is_zero() {
                    mismatch = Some(format!("{config}: unbalanced set {x:?} has mass {mass}"));
                }
                return;
            }
            let entry = groups.entry((x, counts)).or_insert_with(|| (BigRational::zero(), 0));
            entry.0 += mass;
            entry.1 += 1;
        });
        if let Some(m) = mismatch {
            return Ok(BlockCheck { groups: groups.len(), mismatch: Some(m) });
        }
    }
    for ((x, counts), (total, size)) in &groups {
        let avg = total / BigRational::from_integer((*size).into());
        let expect = counts
            .iter()
            .fold(BigRational::one(), |acc, &b| acc / BigRational::from_integer((b + 1).into()));
        if avg != expect {
            return Ok(BlockCheck {
                groups: groups.len(),
                mismatch: Some(format!("set {x:?} with counts {counts:?}: got {avg}, expected {expect}")),
            });
        }
    }
    Ok(BlockCheck { groups: groups.len(), mismatch: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn hitting_values() {
        assert_eq!(hitting_prob_interval(2, 1, &q(1, 2)).unwrap(), q(1, 2));
        assert_eq!(hitting_prob_interval(3, 1, &q(1, 2)).unwrap(), q(1, 3));
        assert_eq!(hitting_prob_interval(3, 1, &q(2, 3)).unwrap(), q(4, 7));
        assert!(hitting_prob_interval(3, 0, &q(1, 2)).is_err());
        assert!(hitting_prob_interval(3, 1, &q(1, 1)).is_err());
    }

    #[test]
    fn single_ball_law() {
        let c: CycleConfig = "BHH".parse().unwrap();
        let law = exact_final_distribution(&c, &Strategy::pwalk(1, 2)).unwrap();
        assert_eq!(law.mass(&[1]), q(1, 2));
        assert_eq!(law.mass(&[2]), q(1, 2));
        let law = exact_final_distribution(&c, &Strategy::pwalk(1, 3)).unwrap();
        assert_eq!(law.mass(&[2]), q(1, 3));
        let law = exact_final_distribution(&c, &Strategy::pwalk(1, 1)).unwrap();
        assert_eq!(law, ExactDistribution::point(vec![2]));
        let empty: CycleConfig = "H.H".parse().unwrap();
        let law = exact_final_distribution(&empty, &Strategy::NearestHole).unwrap();
        assert_eq!(law, ExactDistribution::point(vec![0, 2]));
    }

    #[test]
    fn parity_rule_is_rejected() {
        let c: CycleConfig = "BHH".parse().unwrap();
        assert!(matches!(
            exact_final_distribution(&c, &Strategy::ParityRule),
            Err(Error::UnsupportedStrategy(_))
        ));
    }

    #[test]
    fn guards() {
        let c = CycleConfig::from_sets(20, &(0..9).collect::<Vec<_>>(), &(9..19).collect::<Vec<_>>()).unwrap();
        assert!(matches!(exact_final_distribution(&c, &Strategy::NearestHole), Err(Error::TooLarge(_))));
        assert!(matches!(exact_parking_distribution(17, 2, &Strategy::NearestHole), Err(Error::TooLarge(_))));
    }

    #[test]
    fn parking_small_cases() {
        let law = exact_parking_distribution(2, 1, &Strategy::pwalk(1, 2)).unwrap();
        assert_eq!(law.mass(&[0]), q(1, 2));
        assert_eq!(law.mass(&[1]), q(1, 2));
        assert_eq!(exact_parking_distribution(3, 0, &Strategy::pwalk(1, 2)).unwrap(), ExactDistribution::point(vec![0, 1, 2]));
    }

    #[test]
    fn per_configuration_law_depends_on_p_but_average_does_not() {
        let c: CycleConfig = "BHH.".parse().unwrap();
        let a = exact_final_distribution(&c, &Strategy::pwalk(1, 2)).unwrap();
        let b = exact_final_distribution(&c, &Strategy::pwalk(1, 3)).unwrap();
        assert_ne!(a, b);
        assert!(verify_p_independence(&c, &Strategy::pwalk(1, 2), &Strategy::pwalk(1, 3)).unwrap());
        assert!(verify_p_independence(&c, &Strategy::pwalk(1, 2), &Strategy::NearestHole).unwrap());
    }

    #[test]
    fn multiball_oracle_small() {
        let m: MultiballConfig = "-1,1".parse().unwrap();
        assert_eq!(exact_final_distribution_multiball(&m, &Strategy::pwalk(1, 2)).unwrap(), ExactDistribution::point(vec![]));
        let m: MultiballConfig = "-1,-1,2".parse().unwrap();
        assert_eq!(exact_final_distribution_multiball(&m, &Strategy::pwalk(1, 3)).unwrap(), ExactDistribution::point(vec![]));
    }
}
