//! Oracle-versus-formula suite.
//!
//! Each check compares a closed-form law with the enumeration oracle (or
//! with an exact identity) and stops at its first counterexample.

use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exact::cycle::{cycle_law_weighted, IntervalWeight};
use crate::exact::{block_law_full, format_rational, parking_law, BigRational, ExactDistribution};
use crate::model::Strategy;
use crate::oracle::{all_configs, census_averaged_law, conditional_block_check, exact_final_distribution, exact_parking_distribution};

/// Deliberate corruption of a closed form, used to show the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Hole-set law without the `1/(b+1)` survival factor per interval.
    DropSurvivalFactor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Largest cycle for the golf oracle checks.
    pub max_n: usize,
    /// Largest cycle for the single-remaining-hole check.
    pub mini_golf_max_n: usize,
    /// Largest cycle for the normalization of the hole-set law.
    pub norm_max_n: usize,
    /// Largest cycle for the normalization of the full-cycle block law.
    pub block_max_n: usize,
    /// Largest cycle for the parking oracle check.
    pub parking_max_n: usize,
    /// Largest cycle for the single-free-slot parking identity.
    pub mini_parking_max_n: usize,
    pub strategies: Vec<Strategy>,
    pub mutation: Option<Mutation>,
}

impl VerifyOptions {
    /// Defaults: walks with `p = 1/2` and `1/3`, nearest hole, always left.
    pub fn new(max_n: usize) -> Self {
        Self {
            max_n,
            mini_golf_max_n: 8,
            norm_max_n: 12,
            block_max_n: 20,
            parking_max_n: 5,
            mini_parking_max_n: 8,
            strategies: vec![
                Strategy::pwalk(1, 2),
                Strategy::pwalk(1, 3),
                Strategy::NearestHole,
                Strategy::fixed_direction(0, 1),
            ],
            mutation: None,
        }
    }

    /// Replaces the two walk strategies by `pwalk:p` and `pwalk:q`.
    pub fn with_p_pair(mut self, p: Strategy, q: Strategy) -> Result<Self> {
        for s in [&p, &q] {
            if !matches!(s, Strategy::PWalk(_)) {
                return Err(invalid(format!("expected a pwalk strategy, got {s}")));
            }
        }
        self.strategies.retain(|s| !matches!(s, Strategy::PWalk(_)));
        self.strategies.insert(0, q);
        self.strategies.insert(0, p);
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    /// Number of instances compared before stopping.
    pub cases: usize,
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn first_counterexample(&self) -> Option<(&str, &str)> {
        self.checks.iter().find_map(|c| c.counterexample.as_deref().map(|m| (c.name.as_str(), m)))
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    counterexample: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, counterexample: None }
    }

    /// Records one case; returns `false` once a counterexample is known.
    fn record(&mut self, failure: Option<String>) -> bool {
        self.cases += 1;
        if self.counterexample.is_none() {
            self.counterexample = failure;
        }
        self.counterexample.is_none()
    }

    fn done(self) -> CheckOutcome {
        CheckOutcome { name: self.name.to_string(), cases: self.cases, counterexample: self.counterexample }
    }
}

fn q(a: usize, b: usize) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn describe(label: &str, diff: Option<(Vec<usize>, BigRational, BigRational)>) -> Option<String> {
    diff.map(|(x, a, b)| format!("{label} X={x:?}: oracle {}, formula {}", format_rational(&a), format_rational(&b)))
}

fn hole_set_law(n: usize, nb: usize, nt: usize, mutation: Option<Mutation>) -> Result<ExactDistribution> {
    let weight = match mutation {
        Some(Mutation::DropSurvivalFactor) => IntervalWeight::CentralBinomial,
        None => IntervalWeight::Catalan,
    };
    cycle_law_weighted(n, nb, nt, weight)
}

/// Censuses `(nb, nt)` with `nb <= nt` and `nb + nt <= n`.
fn censuses(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n).flat_map(move |nt| (0..=nt.min(n - nt)).map(move |nb| (nb, nt)))
}

fn uniform_law_check(opts: &VerifyOptions) -> Result<CheckOutcome> {
    let mut t = Tally::new("uniform-configuration law equals the hole-set formula");
    'outer: for n in 1..=opts.max_n {
        for (nb, nt) in censuses(n) {
            let formula = hole_set_law(n, nb, nt, opts.mutation)?;
            for s in &opts.strategies {
                let oracle = census_averaged_law(n, nb, nt, s)?;
                let label = format!("n={n} balls={nb} holes={nt} strategy={s}");
                if !t.record(describe(&label, oracle.first_difference(&formula))) {
                    break 'outer;
                }
            }
        }
    }
    Ok(t.done())
}

fn mini_golf_check(opts: &VerifyOptions) -> Result<CheckOutcome> {
    let mut t = Tally::new("single remaining hole is uniform");
    'outer: for n in 1..=opts.mini_golf_max_n {
        for nb in 0..n {
            let nt = nb + 1;
            if nb + nt > n {
                break;
            }
            let formula = hole_set_law(n, nb, nt, opts.mutation)?;
            for x in 0..n {
                let p = formula.mass(&[x]);
                let failure = (p != q(1, n)).then(|| {
                    format!("n={n} balls={nb} X=[{x}]: formula {}, expected 1/{n}", format_rational(&p))
                });
                if !t.record(failure) {
                    break 'outer;
                }
            }
            let configs = all_configs(n, nb, nt)?;
            for s in &opts.strategies {
                let laws = configs.iter().map(|c| exact_final_distribution(c, s)).collect::<Result<Vec<_>>>()?;
                for x in 0..n {
                    let (mut sum, mut count) = (BigRational::zero(), 0usize);
                    for (c, law) in configs.iter().zip(&laws) {
                        if c.holes().contains(&x) {
                            sum += law.mass(&[x]);
                            count += 1;
                        }
                    }
                    let cond = sum / q(count, 1);
                    let failure = (cond != q(1, nb + 1)).then(|| {
                        format!(
                            "n={n} balls={nb} strategy={s} X=[{x}]: oracle conditional {}, expected 1/{}",
                            format_rational(&cond),
                            nb + 1
                        )
                    });
                    if !t.record(failure) {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(t.done())
}

fn normalization_check(opts: &VerifyOptions) -> Result<CheckOutcome> {
    let mut t = Tally::new("closed forms sum to one");
    for n in 1..=opts.norm_max_n {
        for (nb, nt) in censuses(n) {
            let total = hole_set_law(n, nb, nt, opts.mutation)?.total();
            let failure = (!total.is_one())
                .then(|| format!("hole-set law n={n} balls={nb} holes={nt}: total {}", format_rational(&total)));
            if !t.record(failure) {
                return Ok(t.done());
            }
        }
    }
    for n in 1..=opts.block_max_n {
        for nb in 0..=(n - 1) / 2 {
            let total = block_law_full(n, nb)?.total();
            let failure =
                (!total.is_one()).then(|| format!("block law n={n} balls={nb}: total {}", format_rational(&total)));
            if !t.record(failure) {
                return Ok(t.done());
            }
        }
    }
    Ok(t.done())
}

fn interval_product_check(opts: &VerifyOptions) -> Result<CheckOutcome> {
    let mut t = Tally::new("interval survival is a product");
    'outer: for n in 1..=opts.max_n {
        for (nb, nt) in censuses(n).filter(|&(nb, nt)| nb < nt) {
            for s in &opts.strategies {
                let r = conditional_block_check(n, nb, nt, s)?;
                let failure = r.mismatch.map(|m| format!("n={n} balls={nb} holes={nt} strategy={s}: {m}"));
                if !t.record(failure) {
                    break 'outer;
                }
            }
        }
    }
    Ok(t.done())
}

fn parking_check(opts: &VerifyOptions) -> Result<CheckOutcome> {
    let mut t = Tally::new("parking law equals the formula");
    let mut strategies = vec![Strategy::pwalk(1, 1)];
    strategies.extend(opts.strategies.iter().filter(|s| !s.needs_clock()).cloned());
    'outer: for n in 1..=opts.parking_max_n {
        for m in 0..n {
            let formula = parking_law(n, m)?;
            for s in &strategies {
                let oracle = exact_parking_distribution(n, m, s)?;
                let label = format!("n={n} cars={m} strategy={s}");
                if !t.record(describe(&label, oracle.first_difference(&formula))) {
                    break 'outer;
                }
            }
        }
    }
    Ok(t.done())
}

fn mini_parking_check(opts: &VerifyOptions) -> Result<CheckOutcome> {
    let mut t = Tally::new("single free slot given no arrival there");
    for n in 2..=opts.mini_parking_max_n {
        // A car arriving at x parks there, so {TL = {x}} lies inside
        // {no arrival at x}, which has probability ((n-1)/n)^(n-1).
        let no_arrival: BigRational = q(n - 1, n).pow(n - 1);
        let expected: BigRational = q(n, 1).pow(n - 2) / q(n - 1, 1).pow(n - 1);
        let formula = parking_law(n, n - 1)?;
        let oracle = exact_parking_distribution(n, n - 1, &Strategy::pwalk(1, 2))?;
        for x in 0..n {
            for (label, law) in [("formula", &formula), ("oracle", &oracle)] {
                let cond = law.mass(&[x]) / &no_arrival;
                let failure = (cond != expected).then(|| {
                    format!(
                        "n={n} X=[{x}]: {label} conditional {}, expected {}",
                        format_rational(&cond),
                        format_rational(&expected)
                    )
                });
                if !t.record(failure) {
                    return Ok(t.done());
                }
            }
        }
    }
    Ok(t.done())
}

/// Runs every check. Errors are reserved for invalid options or guard
/// violations; mismatches are reported in the returned outcomes.
pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.strategies.is_empty() {
        return Err(invalid("no strategy to verify"));
    }
    if let Some(s) = opts.strategies.iter().find(|s| s.needs_clock()) {
        return Err(invalid(format!("strategy {s} has no exact oracle")));
    }
    let checks = vec![
        uniform_law_check(opts)?,
        mini_golf_check(opts)?,
        normalization_check(opts)?,
        interval_product_check(opts)?,
        parking_check(opts)?,
        mini_parking_check(opts)?,
    ];
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(max_n: usize) -> VerifyOptions {
        VerifyOptions { mini_golf_max_n: 5, norm_max_n: 6, block_max_n: 8, parking_max_n: 4, mini_parking_max_n: 5, ..VerifyOptions::new(max_n) }
    }

    #[test]
    fn suite_passes_on_small_cycles() {
        let r = run_verify(&small(4)).unwrap();
        assert!(r.passed(), "{:?}", r.first_counterexample());
        assert!(r.checks.iter().all(|c| c.cases > 0));
    }

    #[test]
    fn mutation_is_caught() {
        let opts = VerifyOptions { mutation: Some(Mutation::DropSurvivalFactor), ..small(4) };
        let r = run_verify(&opts).unwrap();
        assert!(!r.passed());
        let (name, msg) = r.first_counterexample().unwrap();
        assert!(name.starts_with("uniform"));
        assert!(msg.contains("X="), "{msg}");
    }

    #[test]
    fn p_pair_replaces_walks() {
        let o = VerifyOptions::new(3).with_p_pair(Strategy::pwalk(1, 4), Strategy::pwalk(3, 4)).unwrap();
        assert_eq!(o.strategies.len(), 4);
        assert_eq!(o.strategies[0], Strategy::pwalk(1, 4));
        assert!(VerifyOptions::new(3).with_p_pair(Strategy::NearestHole, Strategy::pwalk(1, 2)).is_err());
    }
}
