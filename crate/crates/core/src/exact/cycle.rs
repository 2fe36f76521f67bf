use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};

use super::{binomial, catalan, multinomial, ratio, BigRational, ExactDistribution};
use crate::error::{domain, invalid, Error, Result};
use crate::model::block_sizes;

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Calls `f` on every vector of `parts` nonnegative integers summing to `total`.
pub(crate) fn for_each_composition<F: FnMut(&[usize])>(total: usize, parts: usize, mut f: F) {
    fn rec<F: FnMut(&[usize])>(buf: &mut Vec<usize>, left: usize, parts: usize, f: &mut F) {
        if buf.len() + 1 == parts {
            buf.push(left);
            f(buf);
            buf.pop();
            return;
        }
        for v in 0..=left {
            buf.push(v);
            rec(buf, left - v, parts, f);
            buf.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    rec(&mut Vec::with_capacity(parts), total, parts, &mut f);
}

fn check_cycle_params(n: usize, nb: usize, nt: usize) -> Result<()> {
    if n == 0 || nb > nt || nb + nt > n {
        return Err(invalid(format!(
            "need 0 <= balls <= holes and balls + holes <= n (n={n}, balls={nb}, holes={nt})"
        )));
    }
    Ok(())
}

/// Number of ways to place `b` balls and `b` holes in an interval of `len`
/// sites (rest neutral), weighted by the chance `1/(b+1)` that the hole
/// closing the interval survives: `binom(len, 2b) * C_b`.
fn interval_weights(len: usize, max_b: usize, weight: IntervalWeight) -> Vec<BigUint> {
    (0..=max_b.min(len / 2))
        .map(|b| {
            binomial(len, 2 * b)
                * match weight {
                    IntervalWeight::Catalan => catalan(b),
                    IntervalWeight::CentralBinomial => binomial(2 * b, b),
                }
        })
        .collect()
}

/// Per-interval weight in the hole-set law. `CentralBinomial` drops the
/// survival factor `1/(b+1)` and exists only as a corrupted formula for
/// negative-control runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum IntervalWeight {
    Catalan,
    CentralBinomial,
}

/// Coefficient of `x^target` in the product of the interval polynomials.
fn assignation_weight(lengths: &[usize], target: usize, weight: IntervalWeight) -> BigUint {
    let mut poly = vec![BigUint::one()];
    for &len in lengths {
        let w = interval_weights(len, target, weight);
        let mut next = vec![BigUint::zero(); (poly.len() + w.len() - 1).min(target + 1)];
        for (i, a) in poly.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, c) in w.iter().enumerate() {
                if i + j > target {
                    break;
                }
                next[i + j] += a * c;
            }
        }
        poly = next;
    }
    poly.into_iter().nth(target).unwrap_or_default()
}

/// Probability that the remaining hole set is exactly `x`, starting from a
/// uniform configuration with `nb` balls and `nt` holes on `Z/nZ`.
pub fn prob_remaining_holes_cycle(n: usize, nb: usize, nt: usize, x: &[usize]) -> Result<BigRational> {
    check_cycle_params(n, nb, nt)?;
    let nl = nt - nb;
    if nl == 0 {
        return Err(domain("no hole remains when balls = holes"));
    }
    if x.len() != nl {
        return Err(Error::SizeMismatch { expected: nl, got: x.len() });
    }
    let blocks = block_sizes(x, n)?;
    let num = assignation_weight(&blocks.deltas, nb, IntervalWeight::Catalan);
    let den = multinomial(n, &[nb, nt, n - nb - nt])?;
    Ok(ratio(num, den))
}

/// Full law of the remaining hole set (nonzero masses only).
pub fn cycle_law(n: usize, nb: usize, nt: usize) -> Result<ExactDistribution> {
    cycle_law_weighted(n, nb, nt, IntervalWeight::Catalan)
}

pub(crate) fn cycle_law_weighted(n: usize, nb: usize, nt: usize, weight: IntervalWeight) -> Result<ExactDistribution> {
    check_cycle_params(n, nb, nt)?;
    let nl = nt - nb;
    if nl == 0 {
        return Ok(ExactDistribution::point(Vec::new()));
    }
    let den = multinomial(n, &[nb, nt, n - nb - nt])?;
    let mut cache: HashMap<Vec<usize>, BigUint> = HashMap::new();
    let mut law = ExactDistribution::new();
    let mut failure = None;
    for_each_subset(n, nl, |x| match block_sizes(x, n) {
        Ok(blocks) => {
            let mut key = blocks.deltas;
            key.sort_unstable();
            let w = cache.entry(key).or_insert_with_key(|k| assignation_weight(k, nb, weight)).clone();
            law.add(x.to_vec(), ratio(w, den.clone()));
        }
        Err(e) => failure = Some(e),
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(law),
    }
}

/// Probability of the half block sizes `b` (block `i` has `2 b_i` sites)
/// when balls and holes fill the whole cycle.
pub fn prob_block_sizes_cycle_full(n: usize, nb: usize, b: &[usize]) -> Result<BigRational> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let sum: usize = b.iter().sum();
    if sum != nb {
        return Err(Error::SizeMismatch { expected: nb, got: sum });
    }
    if n != 2 * nb + b.len() {
        return Err(Error::Parity(format!(
            "n={n} must equal 2*balls + blocks = {}",
            2 * nb + b.len()
        )));
    }
    let num = b[1..].iter().fold(catalan(b[0]) * (2 * b[0] as u64 + 1), |acc, &bi| acc * catalan(bi));
    Ok(ratio(num, binomial(n, nb)))
}

/// Probability that block 0 has `2 b0` sites when balls and holes fill
/// the whole cycle: the other blocks form a forest of `n_l - 1` complete
/// binary trees.
pub fn prob_block0_full(n: usize, nb: usize, b0: usize) -> Result<BigRational> {
    if 2 * nb >= n {
        return Err(invalid(format!("need 2*balls < n (n={n}, balls={nb})")));
    }
    if b0 > nb {
        return Ok(BigRational::zero());
    }
    let rest = n - 2 * nb - 1;
    let forests = if rest == 0 {
        if b0 == nb { BigUint::one() } else { BigUint::zero() }
    } else {
        super::count_forests(2 * (nb - b0) + rest, rest)?
    };
    Ok(ratio(catalan(b0) * (2 * b0 as u64 + 1) * forests, binomial(n, nb)))
}

/// Law of the block-size vector `(2 b_0, ..., 2 b_{k-1})` when balls and
/// holes fill the whole cycle.
pub fn block_law_full(n: usize, nb: usize) -> Result<ExactDistribution> {
    if 2 * nb >= n {
        return Err(invalid(format!("need 2*balls < n (n={n}, balls={nb})")));
    }
    let nl = n - 2 * nb;
    let mut law = ExactDistribution::new();
    let mut failure = None;
    for_each_composition(nb, nl, |b| match prob_block_sizes_cycle_full(n, nb, b) {
        Ok(p) => law.add(b.iter().map(|&v| 2 * v).collect(), p),
        Err(e) => failure = Some(e),
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(law),
    }
}

/// Probability that the free slots after `m` cars park on `Z/nZ` are
/// exactly `x`.
pub fn prob_remaining_holes_parking(n: usize, m: usize, x: &[usize]) -> Result<BigRational> {
    if m >= n {
        return Err(invalid(format!("need cars < n (n={n}, cars={m})")));
    }
    if x.len() != n - m {
        return Err(Error::SizeMismatch { expected: n - m, got: x.len() });
    }
    let blocks = block_sizes(x, n)?;
    let mut num = multinomial(m, &blocks.deltas)?;
    for &l in &blocks.deltas {
        if l > 0 {
            num *= Pow::pow(BigUint::from(l + 1), (l - 1) as u32);
        }
    }
    let den = Pow::pow(BigUint::from(n), m as u32);
    Ok(ratio(num, den))
}

/// Full law of the free-slot set in parking.
pub fn parking_law(n: usize, m: usize) -> Result<ExactDistribution> {
    if m >= n {
        return Err(invalid(format!("need cars < n (n={n}, cars={m})")));
    }
    let mut law = ExactDistribution::new();
    let mut failure = None;
    for_each_subset(n, n - m, |x| match prob_remaining_holes_parking(n, m, x) {
        Ok(p) => law.add(x.to_vec(), p),
        Err(e) => failure = Some(e),
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(law),
    }
}
