//! Goodness-of-fit tests, distances and intervals.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Minimum expected count per cell after pooling.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    /// Upper 1% point of the reference chi-square law.
    pub critical_1pct: f64,
    pub reject_at_1pct: bool,
}

impl GofResult {
    pub fn from_statistic(statistic: f64, dof: usize) -> Self {
        let critical_1pct = chi2_quantile(0.99, dof);
        Self { statistic, dof, critical_1pct, reject_at_1pct: statistic > critical_1pct }
    }
}

/// Quantile of the chi-square law with `dof` degrees of freedom (0 for `dof = 0`).
pub fn chi2_quantile(level: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 0.0;
    }
    ChiSquared::new(dof as f64).expect("positive dof").inverse_cdf(level)
}

fn degenerate(msg: &str) -> Error {
    Error::Degenerate(msg.to_string())
}

/// Groups consecutive cells until each group's weight reaches `min`; a
/// light final group is merged into the previous one.
fn pool(weights: &[f64], min: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if acc >= min {
            groups.push(start..i + 1);
            start = i + 1;
            acc = 0.0;
        }
    }
    if start < weights.len() {
        match groups.last_mut() {
            Some(last) => last.end = weights.len(),
            None => groups.push(start..weights.len()),
        }
    }
    groups
}

/// Pearson chi-square test of `counts` against cell probabilities `probs`,
/// pooling consecutive cells until each expected count is at least 5.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<GofResult> {
    if counts.is_empty() || counts.len() != probs.len() {
        return Err(degenerate("counts and probabilities must be nonempty and of equal length"));
    }
    if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
        return Err(degenerate("probabilities must be nonnegative"));
    }
    let total_p: f64 = probs.iter().sum();
    if (total_p - 1.0).abs() > 1e-12 {
        return Err(degenerate("probabilities must sum to 1"));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(degenerate("no observations"));
    }
    let n = total as f64;
    if counts.iter().zip(probs).any(|(&c, &p)| c > 0 && p == 0.0) {
        return Ok(GofResult::from_statistic(f64::INFINITY, 1));
    }
    let expected: Vec<f64> = probs.iter().map(|p| p * n).collect();
    let groups = pool(&expected, MIN_EXPECTED);
    let mut stat = 0.0;
    for g in &groups {
        let e: f64 = expected[g.clone()].iter().sum();
        let o: f64 = counts[g.clone()].iter().map(|&c| c as f64).sum();
        stat += (o - e) * (o - e) / e;
    }
    Ok(GofResult::from_statistic(stat, groups.len() - 1))
}

/// Chi-square test that two count vectors over the same cells come from
/// one law, pooling consecutive cells until every expected count is at least 5.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<GofResult> {
    if a.is_empty() || a.len() != b.len() {
        return Err(degenerate("count vectors must be nonempty and of equal length"));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(degenerate("no observations"));
    }
    let min_share = na.min(nb) / (na + nb);
    let pooled: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| (x + y) as f64 * min_share).collect();
    let groups = pool(&pooled, MIN_EXPECTED);
    let mut stat = 0.0;
    for g in &groups {
        let oa: f64 = a[g.clone()].iter().map(|&c| c as f64).sum();
        let ob: f64 = b[g.clone()].iter().map(|&c| c as f64).sum();
        let col = oa + ob;
        let ea = col * na / (na + nb);
        let eb = col * nb / (na + nb);
        if ea > 0.0 {
            stat += (oa - ea).powi(2) / ea;
        }
        if eb > 0.0 {
            stat += (ob - eb).powi(2) / eb;
        }
    }
    Ok(GofResult::from_statistic(stat, groups.len() - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_1pct: f64,
    pub reject_at_1pct: bool,
}

/// Two-sample Kolmogorov–Smirnov test at the 1% level (asymptotic
/// critical value `1.628 sqrt((n+m)/(nm))`).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(degenerate("empty sample"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let critical = 1.628 * (((n + m) as f64) / ((n * m) as f64)).sqrt();
    Ok(KsResult { statistic: d, critical_1pct: critical, reject_at_1pct: d > critical })
}

/// Total variation distance between two laws on the same cells.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(degenerate("laws must have the same number of cells"));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, level: f64) -> Result<(f64, f64)> {
    if n == 0 || k > n || !(level > 0.0 && level < 1.0) {
        return Err(degenerate("need 0 <= k <= n, n > 0 and level in (0,1)"));
    }
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let (nf, p) = (n as f64, k as f64 / n as f64);
    let z2 = z * z;
    let center = (p + z2 / (2.0 * nf)) / (1.0 + z2 / nf);
    let half = z / (1.0 + z2 / nf) * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Mean, standard deviation and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    if n == 0 {
        return Summary { count: 0, mean: f64::NAN, sd: f64::NAN, se: f64::NAN };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = if n > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    Summary { count: n, mean, sd: var.sqrt(), se: (var / n as f64).sqrt() }
}

/// Empirical quantile (nearest rank on sorted data).
pub fn quantile(sorted: &[f64], level: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let idx = ((level * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// Hotelling-type test that the mean of i.i.d. feature vectors equals
/// `expected`: `T = n (m - mu)' S^-1 (m - mu)`, compared to chi-square with
/// as many degrees of freedom as features.
pub fn mean_vector_test(samples: &[Vec<f64>], expected: &[f64]) -> Result<GofResult> {
    let d = expected.len();
    let n = samples.len();
    if d == 0 || n <= d || samples.iter().any(|s| s.len() != d) {
        return Err(degenerate("need more samples than features, all of equal dimension"));
    }
    let mut mean = DVector::<f64>::zeros(d);
    for s in samples {
        mean += DVector::from_column_slice(s);
    }
    mean /= n as f64;
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for s in samples {
        let c = DVector::from_column_slice(s) - &mean;
        cov += &c * c.transpose();
    }
    cov /= (n - 1) as f64;
    let diff = mean - DVector::from_column_slice(expected);
    let chol = cov.cholesky().ok_or_else(|| degenerate("singular sample covariance"))?;
    let solved = chol.solve(&diff);
    Ok(GofResult::from_statistic(n as f64 * diff.dot(&solved), d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Seed;
    use rand::Rng;

    #[test]
    fn proportional_counts_give_zero() {
        let r = chi_square_gof(&[25, 50, 25], &[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 2);
        assert!(!r.reject_at_1pct);
        assert!(chi_square_gof(&[1, 2], &[0.5, 0.6]).is_err());
        assert!(chi_square_gof(&[0, 0], &[0.5, 0.5]).is_err());
        assert!(chi_square_gof(&[3, 1], &[1.0, 0.0]).unwrap().reject_at_1pct);
    }

    #[test]
    fn pooling_merges_sparse_tails() {
        let g = pool(&[10.0, 3.0, 1.0, 1.0, 0.5], 5.0);
        assert_eq!(g, vec![0..1, 1..5]);
        let g = pool(&[1.0, 1.0], 5.0);
        assert_eq!(g, vec![0..2]);
    }

    #[test]
    fn wilson_example() {
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!(lo < 0.5 && hi > 0.5);
        assert!(((hi - lo) - 0.19).abs() < 0.005);
        assert!(wilson_interval(5, 4, 0.95).is_err());
    }

    #[test]
    fn tv_and_ks() {
        assert_eq!(tv_distance(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        let b: Vec<f64> = (0..100).map(|i| i as f64 + 50.0).collect();
        assert!(ks_two_sample(&a, &b).unwrap().reject_at_1pct);
    }

    #[test]
    fn null_calibration_of_the_gof_test() {
        let probs = [0.1, 0.2, 0.3, 0.25, 0.1, 0.05];
        let mut rng = Seed(11).rng();
        let mut rejections = 0;
        for _ in 0..400 {
            let mut counts = [0u64; 6];
            for _ in 0..2000 {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut cell = probs.len() - 1;
                for (i, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        cell = i;
                        break;
                    }
                }
                counts[cell] += 1;
            }
            rejections += chi_square_gof(&counts, &probs).unwrap().reject_at_1pct as u32;
        }
        assert!(rejections <= 8, "{rejections} rejections out of 400");
    }

    #[test]
    fn mean_vector_test_accepts_true_mean() {
        let mut rng = Seed(12).rng();
        let samples: Vec<Vec<f64>> = (0..5000)
            .map(|_| {
                let u: f64 = rng.random();
                vec![u, u * u]
            })
            .collect();
        let r = mean_vector_test(&samples, &[0.5, 1.0 / 3.0]).unwrap();
        assert!(!r.reject_at_1pct, "{r:?}");
        assert!(mean_vector_test(&samples, &[0.52, 1.0 / 3.0]).unwrap().reject_at_1pct);
    }
}
