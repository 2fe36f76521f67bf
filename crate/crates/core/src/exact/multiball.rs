use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cycle::for_each_subset;
use super::{multinomial, BigRational, ExactDistribution};
use crate::error::{invalid, Error, Result};
use crate::model::block_sizes;

/// How the survival factor of an interval is counted when several balls may
/// share a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MultiballConvention {
    /// `1/(h+1)` for an interval with `h` interior holes: the hole closing
    /// the interval is one of `h+1` equally likely survivors. Agrees with
    /// the exact oracle.
    ClosingHoleCounted,
    /// `1/h`, which is undefined for intervals without interior holes.
    Literal,
}

struct Census {
    /// Ball count per site type; type 0 is a hole.
    kinds: Vec<i32>,
    counts: Vec<usize>,
    surplus: usize,
}

fn census(n: usize, raw: &BTreeMap<i32, usize>) -> Result<Census> {
    if raw.keys().any(|&j| j < -1) {
        return Err(invalid("multiplicities must be >= -1"));
    }
    let total: usize = raw.values().sum();
    if total != n {
        return Err(Error::SizeMismatch { expected: n, got: total });
    }
    let holes = raw.get(&-1).copied().unwrap_or(0);
    let balls: usize = raw.iter().filter(|(&j, _)| j > 0).map(|(&j, &c)| j as usize * c).sum();
    if balls >= holes {
        return Err(invalid(format!("need more holes than balls (holes={holes}, balls={balls})")));
    }
    let mut kinds = vec![-1];
    let mut counts = vec![holes];
    for (&j, &c) in raw.range(0..) {
        kinds.push(j);
        counts.push(c);
    }
    Ok(Census { kinds, counts, surplus: holes - balls })
}

/// All ways to fill an interval of `len` sites with site types whose
/// counts stay within `cap`, with as many balls as holes; each paired with
/// its weight `multinomial * survival factor`.
fn interval_fillings(
    len: usize,
    c: &Census,
    cap: &[usize],
    convention: MultiballConvention,
) -> Result<Vec<(Vec<usize>, BigRational)>> {
    fn rec(
        t: usize,
        left: usize,
        balls: usize,
        c: &Census,
        cap: &[usize],
        buf: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if t == c.kinds.len() {
            // buf[0] is the hole count, chosen last so it can match the balls.
            if left == 0 && buf[0] == balls {
                out.push(buf.clone());
            }
            return;
        }
        let kind = c.kinds[t];
        for v in 0..=left.min(cap[t]) {
            buf[t] = v;
            rec(t + 1, left - v, balls + v * kind as usize, c, cap, buf, out);
        }
        buf[t] = 0;
    }
    let mut shapes = Vec::new();
    for holes in 0..=len.min(cap[0]) {
        let mut buf = vec![0; c.kinds.len()];
        buf[0] = holes;
        rec(1, len - holes, 0, c, cap, &mut buf, &mut shapes);
    }
    shapes
        .into_iter()
        .map(|b| {
            let m = BigInt::from(multinomial(len, &b)?);
            let h = b[0];
            let factor = match convention {
                MultiballConvention::ClosingHoleCounted => BigRational::new(1.into(), (h + 1).into()),
                MultiballConvention::Literal if h == 0 => {
                    return Err(Error::Degenerate("interval without interior holes".into()))
                }
                MultiballConvention::Literal => BigRational::new(1.into(), h.into()),
            };
            Ok((b, BigRational::from_integer(m) * factor))
        })
        .collect()
}

fn weight_for_lengths(
    lengths: &[usize],
    c: &Census,
    convention: MultiballConvention,
) -> Result<BigRational> {
    let mut target = c.counts.clone();
    target[0] -= c.surplus;
    let mut states: HashMap<Vec<usize>, BigRational> = HashMap::new();
    states.insert(vec![0; target.len()], BigRational::one());
    for &len in lengths {
        let mut next: HashMap<Vec<usize>, BigRational> = HashMap::new();
        for (used, w) in &states {
            let cap: Vec<usize> = target.iter().zip(used).map(|(t, u)| t - u).collect();
            for (b, bw) in interval_fillings(len, c, &cap, convention)? {
                let key: Vec<usize> = used.iter().zip(&b).map(|(u, v)| u + v).collect();
                *next.entry(key).or_insert_with(BigRational::zero) += w * &bw;
            }
        }
        states = next;
    }
    Ok(states.remove(&target).unwrap_or_else(BigRational::zero))
}

/// Probability that the remaining holes are exactly `x` for a uniform
/// configuration with `census[j]` sites holding `j` balls (`j = -1` for a
/// hole).
pub fn prob_remaining_holes_multiball(
    n: usize,
    census_map: &BTreeMap<i32, usize>,
    x: &[usize],
    convention: MultiballConvention,
) -> Result<BigRational> {
    let c = census(n, census_map)?;
    if x.len() != c.surplus {
        return Err(Error::SizeMismatch { expected: c.surplus, got: x.len() });
    }
    let blocks = block_sizes(x, n)?;
    let w = weight_for_lengths(&blocks.deltas, &c, convention)?;
    let den = BigInt::from(multinomial(n, &c.counts)?);
    Ok(w / BigRational::from_integer(den))
}

/// Full law of the remaining hole set for a multiball census.
pub fn multiball_law(
    n: usize,
    census_map: &BTreeMap<i32, usize>,
    convention: MultiballConvention,
) -> Result<ExactDistribution> {
    let c = census(n, census_map)?;
    let den = BigRational::from_integer(BigInt::from(multinomial(n, &c.counts)?));
    let mut cache: HashMap<Vec<usize>, BigRational> = HashMap::new();
    let mut law = ExactDistribution::new();
    let mut failure = None;
    for_each_subset(n, c.surplus, |x| {
        if failure.is_some() {
            return;
        }
        let result = block_sizes(x, n).and_then(|b| {
            let mut key = b.deltas;
            key.sort_unstable();
            if let Some(w) = cache.get(&key) {
                return Ok(w.clone());
            }
            let w = weight_for_lengths(&key, &c, convention)?;
            cache.insert(key, w.clone());
            Ok(w)
        });
        match result {
            Ok(w) => law.add(x.to_vec(), w / &den),
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(law),
    }
}
