//! Golf on `Z`: i.i.d. windows, separators and enclosed intervals, and the
//! large-cycle surrogate for block laws around the origin.
//!
//! A hole `v` is a separator when every interval ending just left of `v`
//! and every interval starting just right of `v` holds at least as many
//! holes as balls. Such holes are never filled, whatever the strategy.
//! Inside a finite window only the in-window half of that condition can be
//! checked, so certified positions include every true separator of the
//! window plus positions whose condition fails further out.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::remaining_holes;
use crate::error::{domain, invalid, Error, Result};
use crate::model::{open_unit, sample_initial_cycle, Clocks, CycleConfig, FinalState, SiteState, Strategy};

/// Sites `left..left + len` of `Z` with their states and ball clocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineWindowConfig {
    pub left: i64,
    pub states: Vec<SiteState>,
    /// Clock of the ball at each site (`None` on non-ball sites).
    pub clocks: Vec<Option<f64>>,
    pub d_b: f64,
    pub d_t: f64,
}

impl LineWindowConfig {
    pub fn right(&self) -> i64 {
        self.left + self.states.len() as i64 - 1
    }

    pub fn ball_count(&self) -> usize {
        self.states.iter().filter(|&&s| s == SiteState::Ball).count()
    }

    /// Window as text over `{B, H, .}` preceded by `@<left>:`.
    pub fn to_text(&self) -> String {
        let body: String = self.states.iter().map(|s| s.symbol()).collect();
        format!("@{}:{}", self.left, body)
    }

    /// Window from explicit states, ball clocks spread evenly over `(0,1)`
    /// in site order.
    pub fn from_states(left: i64, states: Vec<SiteState>) -> Self {
        let balls = states.iter().filter(|&&s| s == SiteState::Ball).count();
        let mut j = 0;
        let clocks = states
            .iter()
            .map(|&s| {
                (s == SiteState::Ball).then(|| {
                    j += 1;
                    j as f64 / (balls + 1) as f64
                })
            })
            .collect();
        Self { left, states, clocks, d_b: f64::NAN, d_t: f64::NAN }
    }
}

fn check_densities(d_b: f64, d_t: f64) -> Result<()> {
    if !(d_b >= 0.0 && d_t >= 0.0 && d_b + d_t <= 1.0 + 1e-12) {
        return Err(domain(format!("need d_b, d_t >= 0 and d_b + d_t <= 1 (got {d_b}, {d_t})")));
    }
    Ok(())
}

/// Window `-w..=w` with i.i.d. sites: ball with probability `d_b`, hole
/// with probability `d_t`, neutral otherwise.
pub fn sample_line_window<R: Rng + ?Sized>(d_b: f64, d_t: f64, w: usize, rng: &mut R) -> Result<LineWindowConfig> {
    check_densities(d_b, d_t)?;
    let len = 2 * w + 1;
    let mut states = Vec::with_capacity(len);
    let mut clocks = Vec::with_capacity(len);
    for _ in 0..len {
        let u: f64 = rng.random();
        if u < d_b {
            states.push(SiteState::Ball);
            clocks.push(Some(open_unit(rng)));
        } else if u < d_b + d_t {
            states.push(SiteState::Hole);
            clocks.push(None);
        } else {
            states.push(SiteState::Neutral);
            clocks.push(None);
        }
    }
    Ok(LineWindowConfig { left: -(w as i64), states, clocks, d_b, d_t })
}

/// Heights `S` at the window edges: `S[0] = 0` at the left edge and
/// `S[i+1] = S[i] + state_i` (ball +1, hole -1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightPath {
    pub left: i64,
    pub heights: Vec<i64>,
}

pub fn height_path(config: &LineWindowConfig) -> HeightPath {
    let mut heights = Vec::with_capacity(config.states.len() + 1);
    let mut cur = 0;
    heights.push(0);
    for s in &config.states {
        cur += s.increment();
        heights.push(cur);
    }
    HeightPath { left: config.left, heights }
}

/// Positions passing the separator test inside the window, with the
/// slack left at the window boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorReport {
    pub certified: Vec<i64>,
    /// `min(S[left edge] - S[v], S[v+1] - S[right edge])` for each certified `v`.
    pub margin: Vec<i64>,
}

pub fn find_window_separators(config: &LineWindowConfig) -> SeparatorReport {
    let h = height_path(config).heights;
    let len = config.states.len();
    // suffix_max[i] = max of h[i..=len]
    let mut suffix_max = vec![i64::MIN; len + 2];
    for i in (0..=len).rev() {
        suffix_max[i] = suffix_max[i + 1].max(h[i]);
    }
    let mut certified = Vec::new();
    let mut margin = Vec::new();
    let mut prefix_min = i64::MAX;
    for v in 0..len {
        prefix_min = prefix_min.min(h[v]);
        if config.states[v] != SiteState::Hole {
            continue;
        }
        if h[v] <= prefix_min && suffix_max[v + 1] <= h[v + 1] {
            certified.push(config.left + v as i64);
            margin.push((h[0] - h[v]).min(h[v + 1] - h[len]));
        }
    }
    SeparatorReport { certified, margin }
}

/// Balls with clock at least `t` have not moved yet and count as neutral.
pub fn time_truncated_config(config: &LineWindowConfig, t: f64) -> Result<LineWindowConfig> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(domain(format!("t must lie in (0,1] (got {t})")));
    }
    let mut out = config.clone();
    for (s, c) in out.states.iter_mut().zip(out.clocks.iter_mut()) {
        if let Some(time) = *c {
            if time >= t {
                *s = SiteState::Neutral;
                *c = None;
            }
        }
    }
    Ok(out)
}

/// Result of running golf on the enclosed intervals of a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineOutcome {
    /// Final states, indexed from the window's left end. Sites outside the
    /// outermost certified pair keep their initial state.
    pub final_state: FinalState,
    pub separators: Vec<i64>,
    /// Window positions of the outermost certified pair.
    pub resolved: (i64, i64),
    /// Certified separators filled during the run (expected to stay empty).
    pub filled_separators: Vec<i64>,
    /// Balls outside the outermost pair, left unsimulated.
    pub uncertified_balls: usize,
}

/// Runs golf independently on each interval between consecutive certified
/// separators of the window.
pub fn run_golf_line<R: Rng + ?Sized>(config: &LineWindowConfig, strategy: &Strategy, rng: &mut R) -> Result<LineOutcome> {
    strategy.validate()?;
    let report = find_window_separators(config);
    if report.certified.len() < 2 {
        return Err(Error::NoSeparators);
    }
    let idx: Vec<usize> = report.certified.iter().map(|&v| (v - config.left) as usize).collect();
    let (first, last) = (idx[0], idx[idx.len() - 1]);
    let mut after = config.states.clone();
    let mut filled_separators = Vec::new();
    for pair in idx.windows(2) {
        let (s, e) = (pair[0], pair[1]);
        let segment = CycleConfig::new(config.states[s..=e].to_vec())?;
        let times: Vec<f64> = config.clocks[s..=e].iter().flatten().copied().collect();
        let clocks = if times.is_empty() { Clocks::from_order(Vec::new())? } else { Clocks::from_times(times)? };
        let remaining = remaining_holes(&segment, strategy, &clocks, rng);
        let mut free = vec![false; e - s + 1];
        for &h in &remaining {
            free[h] = true;
        }
        for (off, f) in free.iter().enumerate() {
            after[s + off] = if *f { SiteState::Hole } else { SiteState::Neutral };
        }
        if !free[0] {
            filled_separators.push(config.left + s as i64);
        }
        if !free[e - s] {
            filled_separators.push(config.left + e as i64);
        }
    }
    filled_separators.dedup();
    let uncertified_balls = config.states[..first]
        .iter()
        .chain(&config.states[last + 1..])
        .filter(|&&s| s == SiteState::Ball)
        .count();
    let remaining_holes = (first..=last).filter(|&v| after[v] == SiteState::Hole).collect();
    Ok(LineOutcome {
        final_state: FinalState { remaining_holes, frozen: false, per_vertex: after, trajectory: None },
        separators: report.certified.clone(),
        resolved: (config.left + first as i64, config.left + last as i64),
        filled_separators,
        uncertified_balls,
    })
}

/// Blocks `Delta_{-r}, ..., Delta_r` around vertex 0 after golf on a cycle
/// with `nb` balls and `nt` holes placed uniformly.
pub fn surrogate_blocks<R: Rng + ?Sized>(
    n: usize,
    nb: usize,
    nt: usize,
    r: usize,
    strategy: &Strategy,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if nt < nb + 2 * r + 1 {
        return Err(invalid(format!("need at least {} remaining holes (got {})", 2 * r + 1, nt.saturating_sub(nb))));
    }
    let config = sample_initial_cycle(n, nb, nt, rng)?;
    let clocks = Clocks::sample(nb, strategy.needs_clock(), rng);
    let holes = remaining_holes(&config, strategy, &clocks, rng);
    let deltas = crate::model::block_sizes(&holes, n)?.deltas;
    let k = deltas.len() as i64;
    Ok((-(r as i64)..=r as i64).map(|i| deltas[i.rem_euclid(k) as usize]).collect())
}

/// Large-cycle surrogate for the block process on `Z` with densities
/// `(d_b, d_t)`: golf on `Z/nZ` with `floor(d_b n)` balls and
/// `floor(d_t n)` holes, returning `Delta_{-r}, ..., Delta_r`.
pub fn sample_z_blocks_surrogate<R: Rng + ?Sized>(
    d_b: f64,
    d_t: f64,
    n: usize,
    r: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_densities(d_b, d_t)?;
    if d_b >= d_t {
        return Err(domain("need d_b < d_t"));
    }
    let nb = (d_b * n as f64).floor() as usize;
    let nt = (d_t * n as f64).floor() as usize;
    if nt < nb + 2 * r + 3 {
        return Err(invalid(format!("n={n} too small for {} blocks", 2 * r + 1)));
    }
    surrogate_blocks(n, nb, nt, r, &Strategy::pwalk(1, 2), rng)
}
