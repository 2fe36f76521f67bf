//! Golf and parking dynamics on `Z/nZ`.
//!
//! The fast engine finds the nearest free hole on each side with
//! union-find "next free site" pointers and samples the filled one from the
//! exact two-sided absorption law, so a ball costs O(alpha(n)) instead of
//! the length of its walk. The logged engine walks step by step and records
//! each trajectory.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::model::{
    open_unit, Clocks, CycleConfig, FinalState, MultiballConfig, SiteState, Strategy,
    TrajectoryEntry,
};

/// Step bound for a single logged walk.
pub const MAX_WALK_STEPS: u64 = 1_000_000_000;

/// Nearest free site in each direction on a cycle, including the start.
pub(crate) struct FreeSites {
    right: Vec<u32>,
    left: Vec<u32>,
}

impl FreeSites {
    pub(crate) fn new(n: usize, free: impl Fn(usize) -> bool) -> Self {
        let mut right = Vec::with_capacity(n);
        let mut left = Vec::with_capacity(n);
        for v in 0..n {
            if free(v) {
                right.push(v as u32);
                left.push(v as u32);
            } else {
                right.push(((v + 1) % n) as u32);
                left.push(((v + n - 1) % n) as u32);
            }
        }
        Self { right, left }
    }

    fn find(ptr: &mut [u32], v: usize) -> usize {
        let mut root = v;
        while ptr[root] as usize != root {
            root = ptr[root] as usize;
        }
        let mut cur = v;
        while ptr[cur] as usize != root {
            let next = ptr[cur] as usize;
            ptr[cur] = root as u32;
            cur = next;
        }
        root
    }

    pub(crate) fn right_of(&mut self, v: usize) -> usize {
        Self::find(&mut self.right, v)
    }

    pub(crate) fn left_of(&mut self, v: usize) -> usize {
        Self::find(&mut self.left, v)
    }

    pub(crate) fn fill(&mut self, h: usize) {
        let n = self.right.len();
        self.right[h] = ((h + 1) % n) as u32;
        self.left[h] = ((h + n - 1) % n) as u32;
    }
}

/// Hole filled by a ball at `v` (or `v` itself when it is free).
fn resolve<R: Rng + ?Sized>(
    sites: &mut FreeSites,
    n: usize,
    v: usize,
    strategy: &Strategy,
    clock: Option<f64>,
    rng: &mut R,
) -> usize {
    let r = sites.right_of(v);
    if r == v {
        return v;
    }
    let l = sites.left_of(v);
    if l == r {
        return r;
    }
    let dr = (r + n - v) % n;
    let dl = (v + n - l) % n;
    let pr = strategy.prob_right(dl, dr, clock);
    if pr >= 1.0 || (pr > 0.0 && rng.random::<f64>() < pr) {
        r
    } else {
        l
    }
}

fn check_clocks(strategy: &Strategy, clocks: &Clocks, balls: usize) -> Result<()> {
    strategy.validate()?;
    if clocks.len() != balls {
        return Err(Error::SizeMismatch { expected: balls, got: clocks.len() });
    }
    if strategy.needs_clock() && balls > 0 && clocks.time(0).is_none() {
        return Err(invalid(format!("strategy {strategy} needs clock values")));
    }
    Ok(())
}

fn final_state(n: usize, free: impl Fn(usize) -> bool, trajectory: Option<Vec<TrajectoryEntry>>) -> FinalState {
    let mut remaining_holes = Vec::new();
    let mut per_vertex = vec![SiteState::Neutral; n];
    for (v, s) in per_vertex.iter_mut().enumerate() {
        if free(v) {
            remaining_holes.push(v);
            *s = SiteState::Hole;
        }
    }
    FinalState { remaining_holes, frozen: false, per_vertex, trajectory }
}

/// Remaining holes after all balls of `config` have moved (fast engine).
pub(crate) fn remaining_holes<R: Rng + ?Sized>(
    config: &CycleConfig,
    strategy: &Strategy,
    clocks: &Clocks,
    rng: &mut R,
) -> Vec<usize> {
    let n = config.n();
    let states = config.states();
    let balls = config.balls();
    let mut sites = FreeSites::new(n, |v| states[v] == SiteState::Hole);
    let mut filled = vec![false; n];
    for &b in clocks.order() {
        let v = balls[b as usize];
        let h = resolve(&mut sites, n, v, strategy, clocks.time(b as usize), rng);
        sites.fill(h);
        filled[h] = true;
    }
    (0..n).filter(|&v| states[v] == SiteState::Hole && !filled[v]).collect()
}

/// Runs the golf dynamics with the fast engine.
pub fn run_golf<R: Rng + ?Sized>(
    config: &CycleConfig,
    strategy: &Strategy,
    clocks: &Clocks,
    rng: &mut R,
) -> Result<FinalState> {
    let (nb, nt) = (config.ball_count(), config.hole_count());
    if nb > nt {
        return Err(invalid(format!("more balls ({nb}) than holes ({nt})")));
    }
    check_clocks(strategy, clocks, nb)?;
    let remaining = remaining_holes(config, strategy, clocks, rng);
    let mut free = vec![false; config.n()];
    for &h in &remaining {
        free[h] = true;
    }
    Ok(final_state(config.n(), |v| free[v], None))
}

/// Samples clocks (with values only when the strategy reads them) and runs
/// the fast engine.
pub fn simulate_golf<R: Rng + ?Sized>(config: &CycleConfig, strategy: &Strategy, rng: &mut R) -> Result<FinalState> {
    let clocks = Clocks::sample(config.ball_count(), strategy.needs_clock(), rng);
    run_golf(config, strategy, &clocks, rng)
}

/// How a ball moves once its neighbourhood is known.
enum Walk {
    /// Nearest-neighbour walk with right-step probability `p`.
    Random(f64),
    Straight { right: bool },
}

fn walk_kind<R: Rng + ?Sized>(strategy: &Strategy, dl: usize, dr: usize, clock: Option<f64>, rng: &mut R) -> Walk {
    match strategy {
        Strategy::PWalk(p) => {
            let p = crate::model::ratio_f64(p);
            if p >= 1.0 || p <= 0.0 {
                Walk::Straight { right: p >= 1.0 }
            } else {
                Walk::Random(p)
            }
        }
        Strategy::FixedDirection(_) | Strategy::NearestHole => {
            let pr = strategy.prob_right(dl, dr, clock);
            Walk::Straight { right: pr >= 1.0 || (pr > 0.0 && rng.random::<f64>() < pr) }
        }
        Strategy::ParityRule => {
            if dr.is_multiple_of(2) {
                Walk::Straight { right: false }
            } else {
                Walk::Random(clock.expect("checked by caller"))
            }
        }
    }
}

/// Runs the golf dynamics step by step and records every walk.
pub fn run_golf_logged<R: Rng + ?Sized>(
    config: &CycleConfig,
    strategy: &Strategy,
    clocks: &Clocks,
    rng: &mut R,
) -> Result<FinalState> {
    let n = config.n();
    let (nb, nt) = (config.ball_count(), config.hole_count());
    if nb > nt {
        return Err(invalid(format!("more balls ({nb}) than holes ({nt})")));
    }
    check_clocks(strategy, clocks, nb)?;
    let balls = config.balls();
    let mut free: Vec<bool> = config.states().iter().map(|&s| s == SiteState::Hole).collect();
    let mut sites = FreeSites::new(n, |v| free[v]);
    let mut log = Vec::with_capacity(nb);
    for (rank, &b) in clocks.order().iter().enumerate() {
        let origin = balls[b as usize];
        let clock = clocks.time(b as usize);
        let dr = (sites.right_of(origin) + n - origin) % n;
        let dl = (origin + n - sites.left_of(origin)) % n;
        let kind = walk_kind(strategy, dl, dr, clock, rng);
        let mut pos = origin;
        let (mut disp, mut reach_left, mut reach_right, mut steps) = (0i64, 0usize, 0usize, 0u64);
        while !free[pos] {
            let right = match kind {
                Walk::Straight { right } => right,
                Walk::Random(p) => rng.random::<f64>() < p,
            };
            if right {
                pos = (pos + 1) % n;
                disp += 1;
                reach_right = reach_right.max(disp.max(0) as usize);
            } else {
                pos = (pos + n - 1) % n;
                disp -= 1;
                reach_left = reach_left.max((-disp).max(0) as usize);
            }
            steps += 1;
            if steps >= MAX_WALK_STEPS {
                return Err(Error::WalkBound(MAX_WALK_STEPS));
            }
        }
        free[pos] = false;
        sites.fill(pos);
        log.push(TrajectoryEntry { origin, filled: pos, rank, reach_left, reach_right, steps });
    }
    Ok(final_state(n, |v| free[v], Some(log)))
}

/// Parks `m` cars on `Z/nZ`: car `i` arrives at a uniform slot and, if it
/// is taken, moves with `strategy` to a free one.
pub fn run_parking<R: Rng + ?Sized>(n: usize, m: usize, strategy: &Strategy, rng: &mut R) -> Result<FinalState> {
    strategy.validate()?;
    if m >= n {
        return Err(invalid(format!("need cars < n (n={n}, cars={m})")));
    }
    let mut sites = FreeSites::new(n, |_| true);
    let mut free = vec![true; n];
    let clocks: Option<Vec<f64>> = strategy.needs_clock().then(|| {
        let mut t: Vec<f64> = (0..m).map(|_| open_unit(rng)).collect();
        t.sort_by(f64::total_cmp);
        t
    });
    for i in 0..m {
        let v = rng.random_range(0..n);
        let clock = clocks.as_ref().map(|t| t[i]);
        let h = resolve(&mut sites, n, v, strategy, clock, rng);
        sites.fill(h);
        free[h] = false;
    }
    Ok(final_state(n, |v| free[v], None))
}

/// Golf with several balls per site; activation order uniform over balls.
pub fn run_golf_multiball<R: Rng + ?Sized>(
    config: &MultiballConfig,
    strategy: &Strategy,
    rng: &mut R,
) -> Result<FinalState> {
    strategy.validate()?;
    if config.surplus() < 0 {
        return Err(invalid(format!("hole surplus {} is negative", config.surplus())));
    }
    let n = config.n();
    let mult = config.multiplicity();
    let mut balls = Vec::with_capacity(config.ball_count());
    for (v, &m) in mult.iter().enumerate() {
        if m > 0 {
            balls.extend(std::iter::repeat_n(v, m as usize));
        }
    }
    let clocks = Clocks::sample(balls.len(), strategy.needs_clock(), rng);
    let mut free: Vec<bool> = mult.iter().map(|&m| m == -1).collect();
    let mut sites = FreeSites::new(n, |v| free[v]);
    for &b in clocks.order() {
        let h = resolve(&mut sites, n, balls[b as usize], strategy, clocks.time(b as usize), rng);
        sites.fill(h);
        free[h] = false;
    }
    Ok(final_state(n, |v| free[v], None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Seed;

    #[test]
    fn forced_and_deterministic_runs() {
        let mut rng = Seed(5).rng();
        let c: CycleConfig = "BH".parse().unwrap();
        let s = simulate_golf(&c, &Strategy::pwalk(1, 2), &mut rng).unwrap();
        assert!(s.remaining_holes.is_empty() && !s.frozen);
        let c: CycleConfig = "BHH".parse().unwrap();
        for _ in 0..20 {
            let s = simulate_golf(&c, &Strategy::pwalk(1, 1), &mut rng).unwrap();
            assert_eq!(s.remaining_holes, vec![2]);
            let s = simulate_golf(&c, &Strategy::fixed_direction(1, 1), &mut rng).unwrap();
            assert_eq!(s.remaining_holes, vec![1]);
        }
        let c: CycleConfig = "HBB".parse().unwrap();
        assert!(simulate_golf(&c, &Strategy::NearestHole, &mut rng).is_err());
    }

    #[test]
    fn logged_runs_respect_block_decomposition() {
        let mut rng = Seed(9).rng();
        for trial in 0..200 {
            let c = crate::model::sample_initial_cycle(15, 4, 7, &mut rng).unwrap();
            let strategy = [Strategy::pwalk(1, 2), Strategy::pwalk(2, 3), Strategy::NearestHole, Strategy::ParityRule]
                [trial % 4]
                .clone();
            let clocks = Clocks::sample(4, true, &mut rng);
            let s = run_golf_logged(&c, &strategy, &clocks, &mut rng).unwrap();
            assert_eq!(s.remaining_holes.len(), 3);
            let log = s.trajectory.unwrap();
            for e in &log {
                for &x in &s.remaining_holes {
                    assert!(!e.visited(x, 15), "walk {e:?} visited remaining hole {x}");
                }
            }
        }
    }

    #[test]
    fn parking_fills_distinct_slots() {
        let mut rng = Seed(2).rng();
        let s = run_parking(1, 0, &Strategy::pwalk(1, 2), &mut rng).unwrap();
        assert_eq!(s.remaining_holes, vec![0]);
        let s = run_parking(100, 90, &Strategy::pwalk(1, 1), &mut rng).unwrap();
        assert_eq!(s.remaining_holes.len(), 10);
        assert!(run_parking(3, 3, &Strategy::NearestHole, &mut rng).is_err());
    }

    #[test]
    fn multiball_runs() {
        let mut rng = Seed(4).rng();
        let m: MultiballConfig = "-1,-1,2".parse().unwrap();
        assert!(run_golf_multiball(&m, &Strategy::pwalk(1, 2), &mut rng).unwrap().remaining_holes.is_empty());
        let m: MultiballConfig = "-1,-1,-1,1".parse().unwrap();
        assert_eq!(run_golf_multiball(&m, &Strategy::pwalk(1, 2), &mut rng).unwrap().remaining_holes.len(), 2);
        let m: MultiballConfig = "-1,3".parse().unwrap();
        assert!(run_golf_multiball(&m, &Strategy::pwalk(1, 2), &mut rng).is_err());
    }
}
