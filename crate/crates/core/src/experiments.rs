//! Phase-transition scans and finite-`n` checks of the limit laws.
//!
//! Every routine takes a master seed; grid point `j` runs on
//! `seed.child(j)` and trial `i` on that child's stream `i`, so tables are
//! reproducible bit for bit whatever the number of worker threads.

use serde::{Deserialize, Serialize};

use crate::dynamics::{remaining_holes, run_parking};
use crate::error::{invalid, Result};
use crate::exact::{critical_block0_cdf, pittel_prediction, sparse_moments};
use crate::forest::sample_block_sizes_via_forest;
use crate::model::{block_sizes, sample_initial_cycle, Clocks, Strategy};
use crate::parallel::try_run_trials;
use crate::seed::Seed;
use crate::stats::{chi_square_gof, mean_vector_test, quantile, summarize, GofResult};

/// How the number `n_l = n_t - n_b` of remaining holes scales with `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum Regime {
    /// `n_l ~ a n`.
    Linear(f64),
    /// `n_l ~ lambda sqrt(n)`.
    Critical(f64),
    /// `n_l ~ n^(3/4)`.
    Super,
    /// `n_l ~ n^(1/4)`.
    Sub,
}

impl Regime {
    /// Target `n_l` for a cycle of `n` sites with no neutral site: the
    /// integer closest to the scaling law among those with the parity of
    /// `n` (ties go up).
    pub fn n_l(&self, n: usize) -> Result<usize> {
        let x = n as f64;
        let raw = match *self {
            Regime::Linear(a) => {
                if !(a > 0.0 && a <= 1.0) {
                    return Err(invalid(format!("linear regime needs 0 < a <= 1 (got {a})")));
                }
                a * x
            }
            Regime::Critical(lambda) => {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(invalid(format!("critical regime needs lambda > 0 (got {lambda})")));
                }
                lambda * x.sqrt()
            }
            Regime::Super => x.powf(0.75),
            Regime::Sub => x.powf(0.25),
        };
        let base = raw.floor() as usize;
        (base.saturating_sub(1)..=base + 2)
            .filter(|&k| k >= 1 && k <= n && (n - k).is_multiple_of(2))
            .min_by(|&a, &b| (a as f64 - raw).abs().total_cmp(&(b as f64 - raw).abs()).then(b.cmp(&a)))
            .ok_or_else(|| invalid(format!("n={n} too small for this regime")))
    }

    /// `(balls, holes)` on a full cycle of `n` sites.
    pub fn census(&self, n: usize) -> Result<(usize, usize)> {
        let k = self.n_l(n)?;
        let nb = (n - k) / 2;
        Ok((nb, nb + k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub regime: Regime,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: Seed,
    pub strategy: Strategy,
}

impl ScanSpec {
    pub fn new(regime: Regime, ns: Vec<usize>, trials: usize, seed: Seed, strategy: Strategy) -> Result<Self> {
        if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n grid must be non-empty and strictly increasing"));
        }
        if trials < 100 {
            return Err(invalid(format!("need at least 100 trials (got {trials})")));
        }
        strategy.validate()?;
        for &n in &ns {
            regime.n_l(n)?;
        }
        Ok(Self { regime, ns, trials, seed, strategy })
    }
}

/// Summary of the largest block at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub n_l: usize,
    pub balls: usize,
    pub holes: usize,
    pub trials: usize,
    pub mean_max: f64,
    pub se_max: f64,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
    pub mean_max_over_n: f64,
    pub mean_max_over_log_n: f64,
}

fn golf_blocks<R: rand::Rng + ?Sized>(
    n: usize,
    nb: usize,
    nt: usize,
    strategy: &Strategy,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let config = sample_initial_cycle(n, nb, nt, rng)?;
    let clocks = Clocks::sample(nb, strategy.needs_clock(), rng);
    let holes = remaining_holes(&config, strategy, &clocks, rng);
    Ok(block_sizes(&holes, n)?.deltas)
}

/// Largest block after golf on full cycles along the grid of `spec`.
pub fn max_block_scan(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::with_capacity(spec.ns.len());
    for (j, &n) in spec.ns.iter().enumerate() {
        let (nb, nt) = spec.regime.census(n)?;
        let maxima = try_run_trials(spec.seed.child(j as u64), spec.trials, |_, rng| {
            let d = golf_blocks(n, nb, nt, &spec.strategy, rng)?;
            Ok(d.into_iter().max().unwrap_or(0) as f64)
        })?;
        let s = summarize(&maxima);
        let mut sorted = maxima;
        sorted.sort_by(f64::total_cmp);
        rows.push(ScanRow {
            n,
            n_l: nt - nb,
            balls: nb,
            holes: nt,
            trials: spec.trials,
            mean_max: s.mean,
            se_max: s.se,
            q10: quantile(&sorted, 0.1),
            q50: quantile(&sorted, 0.5),
            q90: quantile(&sorted, 0.9),
            mean_max_over_n: s.mean / n as f64,
            mean_max_over_log_n: s.mean / (n as f64).ln(),
        });
    }
    Ok(rows)
}

/// Normalized blocks in the critical window, sampled through uniform
/// marked forests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalProfile {
    pub lambda: f64,
    pub n: usize,
    pub n_l: usize,
    /// `Delta_i / n` per trial, sorted in decreasing order.
    pub sorted_blocks: Vec<Vec<f64>>,
    /// `Delta_0 / n` per trial.
    pub block0: Vec<f64>,
    /// Upper bin edges of the equal-probability bins under the limit law.
    pub bin_edges: Vec<f64>,
    pub histogram: Vec<u64>,
    pub gof: GofResult,
}

/// Number of equal-probability bins used by [`critical_window_profile`].
pub const PROFILE_BINS: usize = 20;

/// Inner edges of `bins` cells of equal mass under the limit law of `Delta_0 / n`.
pub fn critical_bin_edges(lambda: f64, bins: usize) -> Result<Vec<f64>> {
    let mut edges = Vec::with_capacity(bins.saturating_sub(1));
    for j in 1..bins {
        let target = j as f64 / bins as f64;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if critical_block0_cdf(lambda, mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        edges.push(0.5 * (lo + hi));
    }
    Ok(edges)
}

/// Samples the block vector with `n_l = round(lambda sqrt(n))` (parity
/// adjusted) remaining holes and compares `Delta_0 / n` with its limit law
/// on [`PROFILE_BINS`] equal-probability bins.
pub fn critical_window_profile(lambda: f64, n: usize, trials: usize, seed: Seed) -> Result<CriticalProfile> {
    let n_l = Regime::Critical(lambda).n_l(n)?;
    let nf = n as f64;
    let sorted_blocks = try_run_trials(seed, trials, |_, rng| {
        let b = sample_block_sizes_via_forest(n, n_l, rng)?;
        Ok(b.deltas.iter().map(|&d| d as f64 / nf).collect::<Vec<f64>>())
    })?;
    let block0: Vec<f64> = sorted_blocks.iter().map(|b| b[0]).collect();
    let sorted_blocks = sorted_blocks
        .into_iter()
        .map(|mut b| {
            b.sort_by(|x, y| y.total_cmp(x));
            b
        })
        .collect();
    let edges = critical_bin_edges(lambda, PROFILE_BINS)?;
    let mut histogram = vec![0u64; PROFILE_BINS];
    for &x in &block0 {
        histogram[edges.partition_point(|&e| e <= x)] += 1;
    }
    let gof = chi_square_gof(&histogram, &[1.0 / PROFILE_BINS as f64; PROFILE_BINS])?;
    Ok(CriticalProfile { lambda, n, n_l, sorted_blocks, block0, bin_edges: edges, histogram, gof })
}

/// Monte Carlo moments of the normalized blocks for fixed `(nb, nt)` on a
/// sparse cycle, against the exact moments of the limit density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseCheck {
    pub n: usize,
    pub balls: usize,
    pub holes: usize,
    pub trials: usize,
    /// Empirical `E[x_i]` with `x_i = Delta_i / (n - n_l)`.
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
    pub expected_mean: Vec<f64>,
    /// Joint test of `x_i` and `x_i x_j` for `i <= j < n_l - 1`.
    pub gof: GofResult,
}

/// Runs golf with `nb` balls and `nt` holes on `Z/nZ` and compares block
/// moments with the limit density. Blocks are normalized by `n - n_l`, the
/// number of non-remaining sites, so they sum to one.
pub fn sparse_case_check(
    nb: usize,
    nt: usize,
    n: usize,
    trials: usize,
    strategy: &Strategy,
    seed: Seed,
) -> Result<SparseCheck> {
    if nb >= nt || nb + nt > n {
        return Err(invalid(format!("need balls < holes <= n - balls (n={n}, balls={nb}, holes={nt})")));
    }
    strategy.validate()?;
    let nl = nt - nb;
    let scale = (n - nl) as f64;
    let xs = try_run_trials(seed, trials, |_, rng| {
        let d = golf_blocks(n, nb, nt, strategy, rng)?;
        Ok(d.iter().map(|&v| v as f64 / scale).collect::<Vec<f64>>())
    })?;
    let moments = sparse_moments(nb, nt)?;
    let free = nl - 1;
    let mut expected = moments.mean[..free].to_vec();
    for i in 0..free {
        for j in i..free {
            expected.push(moments.second[i][j]);
        }
    }
    let features: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            let mut f = x[..free].to_vec();
            for i in 0..free {
                for j in i..free {
                    f.push(x[i] * x[j]);
                }
            }
            f
        })
        .collect();
    let gof = mean_vector_test(&features, &expected)?;
    let (mut mean, mut se) = (Vec::with_capacity(nl), Vec::with_capacity(nl));
    for i in 0..nl {
        let col: Vec<f64> = xs.iter().map(|x| x[i]).collect();
        let s = summarize(&col);
        mean.push(s.mean);
        se.push(s.se);
    }
    Ok(SparseCheck { n, balls: nb, holes: nt, trials, mean, se, expected_mean: moments.mean, gof })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParkingRow {
    pub n: usize,
    pub cars: usize,
    pub trials: usize,
    pub mean_max: f64,
    pub se_max: f64,
    pub prediction: f64,
    pub difference: f64,
}

/// Parking scan with its offset band: the band is `|difference|` at the
/// smallest `n`, and each row should stay within band plus three standard
/// errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParkingScan {
    pub a: f64,
    pub rows: Vec<ParkingRow>,
    pub band: f64,
    pub within_band: bool,
}

/// Largest block of occupied slots after parking `round(a n)` cars, against
/// the predicted centering.
pub fn parking_asymptotics_check(
    a: f64,
    ns: &[usize],
    trials: usize,
    strategy: &Strategy,
    seed: Seed,
) -> Result<ParkingScan> {
    if !(a > 0.2 && a < 0.8) {
        return Err(invalid(format!("need 0.2 < a < 0.8 (got {a})")));
    }
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n grid must be non-empty and strictly increasing"));
    }
    strategy.validate()?;
    let mut rows = Vec::with_capacity(ns.len());
    for (j, &n) in ns.iter().enumerate() {
        let cars = (a * n as f64).round() as usize;
        let maxima = try_run_trials(seed.child(j as u64), trials, |_, rng| {
            let fs = run_parking(n, cars, strategy, rng)?;
            Ok(fs.block_sizes()?.largest() as f64)
        })?;
        let s = summarize(&maxima);
        let prediction = pittel_prediction(a, n as u64)?;
        rows.push(ParkingRow {
            n,
            cars,
            trials,
            mean_max: s.mean,
            se_max: s.se,
            prediction,
            difference: s.mean - prediction,
        });
    }
    let band = rows[0].difference.abs();
    let within_band = rows.iter().all(|r| r.difference.abs() <= band + 3.0 * r.se_max);
    Ok(ParkingScan { a, rows, band, within_band })
}
