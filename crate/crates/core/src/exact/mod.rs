//! Exact combinatorics and closed-form laws.
//!
//! Finite cycle laws are evaluated with exact rationals; laws on `Z` and
//! limit densities are evaluated in floating point.

pub(crate) mod cycle;
mod density;
mod multiball;
mod zlaw;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use cycle::{
    block_law_full, cycle_law, parking_law, prob_block0_full, prob_block_sizes_cycle_full, prob_remaining_holes_cycle,
    prob_remaining_holes_parking,
};
pub use density::{
    critical_block0_cdf, critical_block0_density, pittel_prediction, sparse_density, sparse_moments,
    SparseMoments,
};
pub use multiball::{multiball_law, prob_remaining_holes_multiball, MultiballConvention};
pub use zlaw::{catalan_gf_g, catalan_gf_h, z_block0_law_general, z_critical_block_law, ZLawParams};

pub type BigRational = num_rational::BigRational;

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k as u64 {
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc
}

/// `n! / prod parts_i!`.
pub fn multinomial(n: usize, parts: &[usize]) -> Result<BigUint> {
    let total: usize = parts.iter().sum();
    if total != n {
        return Err(Error::SizeMismatch { expected: n, got: total });
    }
    let mut acc = BigUint::one();
    let mut placed = 0;
    for &p in parts {
        placed += p;
        acc *= binomial(placed, p);
    }
    Ok(acc)
}

pub fn catalan(k: usize) -> BigUint {
    binomial(2 * k, k) / (k as u64 + 1)
}

fn check_forest_params(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(crate::error::invalid(format!("need 1 <= k <= n (n={n}, k={k})")));
    }
    if !(n - k).is_multiple_of(2) {
        return Err(Error::Parity(format!("n={n} and k={k} differ in parity")));
    }
    Ok(())
}

/// Number of forests of `k` complete binary trees with `n` nodes in total.
pub fn count_forests(n: usize, k: usize) -> Result<BigUint> {
    check_forest_params(n, k)?;
    Ok(binomial(n, (n - k) / 2) * k / n)
}

/// Same forests with one node of the first tree marked.
pub fn count_marked_forests(n: usize, k: usize) -> Result<BigUint> {
    check_forest_params(n, k)?;
    Ok(binomial(n, (n - k) / 2))
}

pub(crate) fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact law over integer-vector keys: hole sets (sorted) or block-size
/// vectors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactDistribution {
    masses: BTreeMap<Vec<usize>, BigRational>,
}

impl ExactDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point(key: Vec<usize>) -> Self {
        let mut d = Self::new();
        d.add(key, BigRational::one());
        d
    }

    /// Adds `mass` to `key`; keys with zero total mass are dropped.
    pub fn add(&mut self, key: Vec<usize>, mass: BigRational) {
        if mass.is_zero() {
            return;
        }
        let entry = self.masses.entry(key).or_insert_with(BigRational::zero);
        *entry += mass;
        if entry.is_zero() {
            self.masses.retain(|_, m| !m.is_zero());
        }
    }

    pub fn mass(&self, key: &[usize]) -> BigRational {
        self.masses.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &BigRational)> {
        self.masses.iter()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.masses.values().fold(BigRational::zero(), |acc, m| acc + m)
    }

    pub fn is_normalized(&self) -> bool {
        self.total().is_one() && self.masses.values().all(|m| !m.is_negative())
    }

    pub fn scaled(&self, factor: &BigRational) -> Self {
        let mut out = Self::new();
        for (k, m) in &self.masses {
            out.add(k.clone(), m * factor);
        }
        out
    }

    pub fn merge(&mut self, other: &Self, weight: &BigRational) {
        for (k, m) in &other.masses {
            self.add(k.clone(), m * weight);
        }
    }

    /// Pushes the law forward through `f`.
    pub fn map_keys<F: FnMut(&[usize]) -> Vec<usize>>(&self, mut f: F) -> Self {
        let mut out = Self::new();
        for (k, m) in &self.masses {
            out.add(f(k), m.clone());
        }
        out
    }

    /// First key at which the two laws differ, with both masses.
    pub fn first_difference(&self, other: &Self) -> Option<(Vec<usize>, BigRational, BigRational)> {
        let keys: std::collections::BTreeSet<&Vec<usize>> =
            self.masses.keys().chain(other.masses.keys()).collect();
        keys.into_iter().find_map(|k| {
            let (a, b) = (self.mass(k), other.mass(k));
            (a != b).then(|| (k.clone(), a, b))
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    support: Vec<Vec<usize>>,
    mass: Vec<String>,
}

impl Serialize for ExactDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionJson {
            support: self.masses.keys().cloned().collect(),
            mass: self.masses.values().map(format_rational).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = DistributionJson::deserialize(deserializer)?;
        if raw.support.len() != raw.mass.len() {
            return Err(D::Error::custom("support and mass lengths differ"));
        }
        let mut out = Self::new();
        for (k, m) in raw.support.into_iter().zip(raw.mass) {
            out.add(k, parse_rational(&m).map_err(D::Error::custom)?);
        }
        Ok(out)
    }
}

/// Always `p/q`, including integers (`1/1`).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}
