//! Configurations, ball strategies, clocks and block decompositions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::BigRational;

/// State of one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SiteState {
    Ball,
    Hole,
    Neutral,
}

impl SiteState {
    pub fn symbol(self) -> char {
        match self {
            SiteState::Ball => 'B',
            SiteState::Hole => 'H',
            SiteState::Neutral => '.',
        }
    }

    pub fn from_symbol(c: char) -> Result<Self> {
        match c {
            'B' | 'b' => Ok(SiteState::Ball),
            'H' | 'h' => Ok(SiteState::Hole),
            '.' => Ok(SiteState::Neutral),
            other => Err(Error::Parse(format!("unknown site symbol {other:?}"))),
        }
    }

    /// Height increment: +1 for a ball, -1 for a hole, 0 otherwise.
    pub fn increment(self) -> i64 {
        match self {
            SiteState::Ball => 1,
            SiteState::Hole => -1,
            SiteState::Neutral => 0,
        }
    }
}

/// Configuration of the cycle `Z/nZ`, vertex 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleConfig {
    states: Vec<SiteState>,
}

impl CycleConfig {
    pub fn new(states: Vec<SiteState>) -> Result<Self> {
        if states.is_empty() {
            return Err(invalid("cycle length must be positive"));
        }
        Ok(Self { states })
    }

    /// Configuration with balls and holes at the given vertices.
    pub fn from_sets(n: usize, balls: &[usize], holes: &[usize]) -> Result<Self> {
        let mut states = vec![SiteState::Neutral; n];
        for &b in balls {
            if b >= n || states[b] != SiteState::Neutral {
                return Err(invalid(format!("ball position {b} invalid")));
            }
            states[b] = SiteState::Ball;
        }
        for &h in holes {
            if h >= n || states[h] != SiteState::Neutral {
                return Err(invalid(format!("hole position {h} invalid")));
            }
            states[h] = SiteState::Hole;
        }
        Self::new(states)
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[SiteState] {
        &self.states
    }

    pub fn balls(&self) -> Vec<usize> {
        self.positions(SiteState::Ball)
    }

    pub fn holes(&self) -> Vec<usize> {
        self.positions(SiteState::Hole)
    }

    pub fn ball_count(&self) -> usize {
        self.states.iter().filter(|&&s| s == SiteState::Ball).count()
    }

    pub fn hole_count(&self) -> usize {
        self.states.iter().filter(|&&s| s == SiteState::Hole).count()
    }

    fn positions(&self, which: SiteState) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == which)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rotation by `r`: vertex `v` moves to `v + r mod n`.
    pub fn rotated(&self, r: usize) -> Self {
        let n = self.n();
        let mut states = vec![SiteState::Neutral; n];
        for (v, &s) in self.states.iter().enumerate() {
            states[(v + r) % n] = s;
        }
        Self { states }
    }
}

impl fmt::Display for CycleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.states {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for CycleConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let states = s.trim().chars().map(SiteState::from_symbol).collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }
}

/// Draws a configuration uniformly among those with `balls` balls and
/// `holes` holes on `Z/nZ`.
pub fn sample_initial_cycle<R: Rng + ?Sized>(
    n: usize,
    balls: usize,
    holes: usize,
    rng: &mut R,
) -> Result<CycleConfig> {
    if n == 0 || balls > holes || balls + holes > n {
        return Err(invalid(format!(
            "need 0 <= balls <= holes and balls + holes <= n (n={n}, balls={balls}, holes={holes})"
        )));
    }
    let occupied = balls + holes;
    let mut states = vec![SiteState::Neutral; n];
    if occupied * 8 < n {
        let picked = rand::seq::index::sample(rng, n, occupied);
        for (j, v) in picked.into_iter().enumerate() {
            states[v] = if j < balls { SiteState::Ball } else { SiteState::Hole };
        }
    } else {
        for s in states.iter_mut().take(balls) {
            *s = SiteState::Ball;
        }
        for s in states.iter_mut().skip(balls).take(holes) {
            *s = SiteState::Hole;
        }
        states.shuffle(rng);
    }
    Ok(CycleConfig { states })
}

/// Cycle configuration where each vertex carries a hole (`-1`) or
/// `j >= 0` balls.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiballConfig {
    multiplicity: Vec<i32>,
}

impl MultiballConfig {
    pub fn new(multiplicity: Vec<i32>) -> Result<Self> {
        if multiplicity.is_empty() {
            return Err(invalid("cycle length must be positive"));
        }
        if let Some(bad) = multiplicity.iter().find(|&&m| m < -1) {
            return Err(invalid(format!("multiplicity {bad} below -1")));
        }
        Ok(Self { multiplicity })
    }

    pub fn n(&self) -> usize {
        self.multiplicity.len()
    }

    pub fn multiplicity(&self) -> &[i32] {
        &self.multiplicity
    }

    pub fn hole_count(&self) -> usize {
        self.multiplicity.iter().filter(|&&m| m == -1).count()
    }

    pub fn ball_count(&self) -> usize {
        self.multiplicity.iter().filter(|&&m| m > 0).map(|&m| m as usize).sum()
    }

    /// `N_{-1} - sum_j j N_j`, the number of holes left free at the end.
    pub fn surplus(&self) -> i64 {
        self.hole_count() as i64 - self.ball_count() as i64
    }

    /// Census `j -> N_j`.
    pub fn census(&self) -> BTreeMap<i32, usize> {
        let mut census = BTreeMap::new();
        for &m in &self.multiplicity {
            *census.entry(m).or_insert(0) += 1;
        }
        census
    }
}

impl FromStr for MultiballConfig {
    type Err = Error;

    /// Comma-separated multiplicities, e.g. `-1,-1,2`.
    fn from_str(s: &str) -> Result<Self> {
        let multiplicity = s
            .split(',')
            .map(|t| t.trim().parse::<i32>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(multiplicity)
    }
}

impl fmt::Display for MultiballConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.multiplicity.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Shift-invariant, local rule deciding which neighbouring free hole a ball
/// ends up in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Strategy {
    /// Nearest-neighbour walk stepping right with probability `p`.
    PWalk(Rational64),
    /// Picks left with probability `q` once, then moves straight to the
    /// first free hole in that direction.
    FixedDirection(Rational64),
    /// Goes to the closer free hole, fair coin on ties.
    NearestHole,
    /// Goes left when the nearest free hole on the right is at even
    /// distance, otherwise walks with right-step probability equal to its
    /// own clock.
    ParityRule,
}

impl Strategy {
    pub fn pwalk(num: i64, den: i64) -> Self {
        Strategy::PWalk(Rational64::new(num, den))
    }

    pub fn fixed_direction(num: i64, den: i64) -> Self {
        Strategy::FixedDirection(Rational64::new(num, den))
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |r: &Rational64| *r >= Rational64::zero() && *r <= Rational64::one();
        match self {
            Strategy::PWalk(p) if !unit(p) => Err(invalid(format!("pwalk parameter {p} outside [0,1]"))),
            Strategy::FixedDirection(q) if !unit(q) => {
                Err(invalid(format!("direction parameter {q} outside [0,1]")))
            }
            _ => Ok(()),
        }
    }

    /// Whether the rule reads the ball's clock value.
    pub fn needs_clock(&self) -> bool {
        matches!(self, Strategy::ParityRule)
    }

    /// Probability of filling the right-hand hole, for a ball with the
    /// nearest free holes at distance `dl` on the left and `dr` on the right
    /// (both positive, distinct holes).
    pub fn prob_right(&self, dl: usize, dr: usize, clock: Option<f64>) -> f64 {
        match self {
            Strategy::PWalk(p) => walk_prob_right(ratio_f64(p), dl + dr, dl),
            Strategy::FixedDirection(q) => 1.0 - ratio_f64(q),
            Strategy::NearestHole => match dl.cmp(&dr) {
                std::cmp::Ordering::Less => 0.0,
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Equal => 0.5,
            },
            Strategy::ParityRule => {
                if dr.is_multiple_of(2) {
                    0.0
                } else {
                    let c = clock.expect("parity rule needs the ball clock");
                    walk_prob_right(c, dl + dr, dl)
                }
            }
        }
    }

    /// Exact version of [`Strategy::prob_right`]; the parity rule integrates
    /// a walk parameter over a continuous clock and has no rational law.
    pub fn prob_right_exact(&self, dl: usize, dr: usize) -> Result<BigRational> {
        let half = BigRational::new(1.into(), 2.into());
        match self {
            Strategy::PWalk(p) => {
                let p = to_big(p);
                if p.is_one() {
                    Ok(BigRational::one())
                } else if p.is_zero() {
                    Ok(BigRational::zero())
                } else {
                    crate::oracle::hitting_prob_interval(dl + dr, dl, &p)
                }
            }
            Strategy::FixedDirection(q) => Ok(BigRational::one() - to_big(q)),
            Strategy::NearestHole => Ok(match dl.cmp(&dr) {
                std::cmp::Ordering::Less => BigRational::zero(),
                std::cmp::Ordering::Greater => BigRational::one(),
                std::cmp::Ordering::Equal => half,
            }),
            Strategy::ParityRule => Err(Error::UnsupportedStrategy(self.to_string())),
        }
    }
}

pub(crate) fn ratio_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub(crate) fn to_big(r: &Rational64) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

/// Probability that a walk with right-step probability `p`, started `k`
/// steps right of the left absorber of an interval of length `len`, is
/// absorbed on the right.
pub fn walk_prob_right(p: f64, len: usize, k: usize) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if (p - 0.5).abs() < 1e-15 {
        return k as f64 / len as f64;
    }
    let r = (1.0 - p) / p;
    if r < 1.0 {
        (1.0 - r.powi(k as i32)) / (1.0 - r.powi(len as i32))
    } else {
        let s = 1.0 / r;
        s.powi((len - k) as i32) * (1.0 - s.powi(k as i32)) / (1.0 - s.powi(len as i32))
    }
}

fn parse_rational(text: &str) -> Result<Rational64> {
    let t = text.trim();
    let err = || Error::Parse(format!("not a rational: {t:?}"));
    if let Some((a, b)) = t.split_once('/') {
        let num: i64 = a.trim().parse().map_err(|_| err())?;
        let den: i64 = b.trim().parse().map_err(|_| err())?;
        if den == 0 {
            return Err(err());
        }
        return Ok(Rational64::new(num, den));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let den = 10i64.pow(frac.len() as u32);
        let int_part: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| err())? };
        let frac_part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| err())? };
        return Ok(Rational64::new(int_part * den + frac_part, den));
    }
    t.parse::<i64>().map(Rational64::from_integer).map_err(|_| err())
}

impl FromStr for Strategy {
    type Err = Error;

    /// `pwalk:<rational>`, `dir:<rational>`, `nearest` or `parity`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let strategy = match s.split_once(':') {
            Some(("pwalk", p)) => Strategy::PWalk(parse_rational(p)?),
            Some(("dir", q)) => Strategy::FixedDirection(parse_rational(q)?),
            None if s == "nearest" => Strategy::NearestHole,
            None if s == "parity" => Strategy::ParityRule,
            _ => return Err(Error::Parse(format!("unknown strategy {s:?}"))),
        };
        strategy.validate()?;
        Ok(strategy)
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Strategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::PWalk(p) => write!(f, "pwalk:{p}"),
            Strategy::FixedDirection(q) => write!(f, "dir:{q}"),
            Strategy::NearestHole => write!(f, "nearest"),
            Strategy::ParityRule => write!(f, "parity"),
        }
    }
}

/// Activation clocks of the balls, indexed like the ball list of a
/// configuration (ascending vertex order).
///
/// Only the activation order matters for the law of the final hole set, so
/// clocks are usually just a uniform permutation; clock values are kept when
/// a strategy reads them.
#[derive(Debug, Clone, PartialEq)]
pub struct Clocks {
    order: Vec<u32>,
    times: Option<Vec<f64>>,
}

impl Clocks {
    pub fn sample<R: Rng + ?Sized>(balls: usize, with_times: bool, rng: &mut R) -> Self {
        let mut order: Vec<u32> = (0..balls as u32).collect();
        order.shuffle(rng);
        let times = with_times.then(|| {
            let mut sorted: Vec<f64> = (0..balls).map(|_| open_unit(rng)).collect();
            sorted.sort_by(f64::total_cmp);
            let mut times = vec![0.0; balls];
            for (rank, &ball) in order.iter().enumerate() {
                times[ball as usize] = sorted[rank];
            }
            times
        });
        Self { order, times }
    }

    /// Clocks from explicit values in `(0, 1)`, which must be pairwise distinct.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(invalid("clock values must lie in (0,1)"));
        }
        let mut order: Vec<u32> = (0..times.len() as u32).collect();
        order.sort_by(|&a, &b| times[a as usize].total_cmp(&times[b as usize]));
        if order.windows(2).any(|w| times[w[0] as usize] == times[w[1] as usize]) {
            return Err(invalid("clock values must be distinct"));
        }
        Ok(Self { order, times: Some(times) })
    }

    /// Clocks given only by an activation order (a permutation of ball indices).
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &b in &order {
            if b >= order.len() || seen[b] {
                return Err(invalid("activation order is not a permutation"));
            }
            seen[b] = true;
        }
        Ok(Self { order: order.into_iter().map(|b| b as u32).collect(), times: None })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Ball indices in activation order.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn time(&self, ball: usize) -> Option<f64> {
        self.times.as_ref().map(|t| t[ball])
    }
}

pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// One ball's walk in a logged run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryEntry {
    pub origin: usize,
    pub filled: usize,
    pub rank: usize,
    /// Furthest displacement reached to the left / right of the origin.
    pub reach_left: usize,
    pub reach_right: usize,
    pub steps: u64,
}

impl TrajectoryEntry {
    /// Whether the walk passed through vertex `v` of `Z/nZ`.
    pub fn visited(&self, v: usize, n: usize) -> bool {
        if self.reach_left + self.reach_right + 1 >= n {
            return true;
        }
        let right = (v + n - self.origin) % n;
        let left = (self.origin + n - v) % n;
        right <= self.reach_right || left <= self.reach_left
    }
}

/// Terminal configuration of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalState {
    /// Sorted set of holes still free at time 1.
    pub remaining_holes: Vec<usize>,
    pub frozen: bool,
    pub per_vertex: Vec<SiteState>,
    pub trajectory: Option<Vec<TrajectoryEntry>>,
}

impl FinalState {
    pub fn block_sizes(&self) -> Result<BlockSizes> {
        block_sizes(&self.remaining_holes, self.per_vertex.len())
    }
}

/// Sizes of the gaps between cyclically consecutive marked vertices; block
/// 0 is the one whose vertex interval contains 0 (or ends at vertex 0 when
/// 0 itself is marked).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockSizes {
    pub deltas: Vec<usize>,
}

impl BlockSizes {
    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn total(&self) -> usize {
        self.deltas.iter().sum()
    }

    pub fn largest(&self) -> usize {
        self.deltas.iter().copied().max().unwrap_or(0)
    }

    /// Decreasing rearrangement.
    pub fn sorted_desc(&self) -> Vec<usize> {
        let mut d = self.deltas.clone();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }
}

/// Block sizes of a vertex set `X` of `Z/nZ`.
///
/// Elements are ordered with vertex 0 counted as `n`, so `x_0` is the last
/// of them and block 0 runs from `x_0` (exclusive) across vertex 0 to `x_1`.
pub fn block_sizes(set: &[usize], n: usize) -> Result<BlockSizes> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut keys: Vec<usize> = Vec::with_capacity(set.len());
    for &x in set {
        if x >= n {
            return Err(invalid(format!("vertex {x} outside Z/{n}Z")));
        }
        keys.push(if x == 0 { n } else { x });
    }
    keys.sort_unstable();
    if keys.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("vertex set has repeated elements"));
    }
    let k = keys.len();
    let mut deltas = Vec::with_capacity(k);
    deltas.push(if k == 1 { n - 1 } else { keys[0] + n - keys[k - 1] - 1 });
    for w in keys.windows(2) {
        deltas.push(w[1] - w[0] - 1);
    }
    Ok(BlockSizes { deltas })
}
