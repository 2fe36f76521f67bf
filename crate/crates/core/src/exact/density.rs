use num_traits::{One, Zero};

use super::cycle::for_each_composition;
use super::{prob_block_sizes_cycle_full, rational_to_f64, BigRational};
use crate::error::{domain, invalid, Error, Result};

/// Limit density of the normalized block sizes `(Delta_i / n)` for fixed
/// `nb < nt`, at a point `x` of the simplex with `nt - nb` coordinates.
pub fn sparse_density(nb: usize, nt: usize, x: &[f64]) -> Result<f64> {
    if nb >= nt {
        return Err(invalid(format!("need balls < holes (balls={nb}, holes={nt})")));
    }
    let nl = nt - nb;
    if x.len() != nl {
        return Err(Error::SizeMismatch { expected: nl, got: x.len() });
    }
    let sum: f64 = x.iter().sum();
    if x.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Ok(0.0);
    }
    // Coefficient of t^nb in prod_k sum_b x_k^(2b) / (b! (b+1)!) t^b.
    let mut poly = vec![0.0; nb + 1];
    poly[0] = 1.0;
    for &xk in x {
        let mut series = vec![0.0; nb + 1];
        let mut term = 1.0;
        for (b, s) in series.iter_mut().enumerate() {
            *s = term;
            term *= xk * xk / ((b + 1) as f64 * (b + 2) as f64);
        }
        let mut next = vec![0.0; nb + 1];
        for (i, a) in poly.iter().enumerate() {
            for (j, c) in series.iter().enumerate().take(nb + 1 - i) {
                next[i + j] += a * c;
            }
        }
        poly = next;
    }
    let fact = |k: usize| (1..=k).fold(1.0, |acc, v| acc * v as f64);
    Ok(x[0] * fact(nb) * fact(nt) * poly[nb])
}

/// First and second moments of a random vector with the sparse-case density.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMoments {
    /// `E[x_i]`.
    pub mean: Vec<f64>,
    /// `E[x_i x_j]`.
    pub second: Vec<Vec<f64>>,
}

/// Exact moments of the sparse-case density.
///
/// The density is a mixture of Dirichlet laws with parameters
/// `(2b_0 + 2, 2b_1 + 1, ...)`, one per composition `b` of `nb`, weighted
/// by the full-cycle block law.
pub fn sparse_moments(nb: usize, nt: usize) -> Result<SparseMoments> {
    if nb >= nt {
        return Err(invalid(format!("need balls < holes (balls={nb}, holes={nt})")));
    }
    let nl = nt - nb;
    let n = nb + nt;
    let a = BigRational::from_integer((n + 1).into());
    let a1 = &a * (&a + BigRational::one());
    let mut mean = vec![BigRational::zero(); nl];
    let mut second = vec![vec![BigRational::zero(); nl]; nl];
    let mut failure = None;
    for_each_composition(nb, nl, |b| {
        let w = match prob_block_sizes_cycle_full(n, nb, b) {
            Ok(w) => w,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let alpha: Vec<BigRational> = b
            .iter()
            .enumerate()
            .map(|(i, &bi)| BigRational::from_integer((2 * bi + 1 + usize::from(i == 0)).into()))
            .collect();
        for i in 0..nl {
            mean[i] += &w * &alpha[i] / &a;
            for j in 0..nl {
                let mut m = &alpha[i] * &alpha[j];
                if i == j {
                    m += &alpha[i];
                }
                second[i][j] += &w * m / &a1;
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(SparseMoments {
        mean: mean.iter().map(rational_to_f64).collect(),
        second: second.iter().map(|row| row.iter().map(rational_to_f64).collect()).collect(),
    })
}

fn check_critical(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!("lambda must be positive (got {lambda})")));
    }
    Ok(())
}

/// Density on `(0,1)` of `N^2 / (lambda^2 + N^2)` for a standard Gaussian
/// `N`: the limit law of `Delta_0 / n` when about `lambda sqrt(n)` holes
/// remain.
pub fn critical_block0_density(lambda: f64, x: f64) -> Result<f64> {
    check_critical(lambda)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!("x must lie in (0,1) (got {x})")));
    }
    let one_minus = 1.0 - x;
    Ok(lambda / ((2.0 * std::f64::consts::PI).sqrt() * x.sqrt() * one_minus.powf(1.5))
        * (-lambda * lambda * x / (2.0 * one_minus)).exp())
}

/// Distribution function matching [`critical_block0_density`].
pub fn critical_block0_cdf(lambda: f64, x: f64) -> Result<f64> {
    check_critical(lambda)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    let u = lambda * lambda * x / (1.0 - x);
    Ok(statrs::function::erf::erf((u / 2.0).sqrt()))
}

/// Predicted centering `(ln n - 1.5 ln ln n) / (a - 1 - ln a)` of the
/// largest block when `a n` cars park on `n` slots.
pub fn pittel_prediction(a: f64, n: u64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain(format!("a must lie in (0,1) (got {a})")));
    }
    if n < 3 {
        return Err(domain("n must be at least 3"));
    }
    let ln_n = (n as f64).ln();
    Ok((ln_n - 1.5 * ln_n.ln()) / (a - 1.0 - a.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_density_values() {
        assert!((sparse_density(1, 3, &[0.5, 0.5]).unwrap() - 0.75).abs() < 1e-15);
        for x0 in [0.1, 0.3, 0.8] {
            let v = sparse_density(1, 3, &[x0, 1.0 - x0]).unwrap();
            let expect = 3.0 * x0 * ((1.0 - x0) * (1.0 - x0) + x0 * x0);
            assert!((v - expect).abs() < 1e-14);
            assert!((sparse_density(0, 2, &[x0, 1.0 - x0]).unwrap() - 2.0 * x0).abs() < 1e-15);
        }
        assert_eq!(sparse_density(1, 3, &[0.7, 0.7]).unwrap(), 0.0);
        assert!(sparse_density(1, 3, &[1.0]).is_err());
        assert!(sparse_density(3, 3, &[1.0]).is_err());
    }

    #[test]
    fn moments_of_the_base_case() {
        let m = sparse_moments(0, 2).unwrap();
        assert!((m.mean[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.second[0][0] - 0.5).abs() < 1e-15);
        let m = sparse_moments(2, 5).unwrap();
        assert!((m.mean.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((m.mean[1] - m.mean[2]).abs() < 1e-15);
        for i in 0..3 {
            let row: f64 = m.second[i].iter().sum();
            assert!((row - m.mean[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn critical_density_values() {
        assert!((critical_block0_density(1.0, 0.5).unwrap() - 0.967882).abs() < 1e-6);
        assert!(critical_block0_density(30.0, 0.5).unwrap() < 1e-50);
        assert!(critical_block0_density(0.0, 0.5).is_err());
        assert!(critical_block0_density(1.0, 1.0).is_err());
        assert_eq!(critical_block0_cdf(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(critical_block0_cdf(1.0, 1.0).unwrap(), 1.0);
        // Derivative of the distribution function is the density.
        let h = 1e-6;
        for x in [0.1, 0.4, 0.9] {
            let d = (critical_block0_cdf(2.0, x + h).unwrap() - critical_block0_cdf(2.0, x - h).unwrap())
                / (2.0 * h);
            assert!((d - critical_block0_density(2.0, x).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn pittel_values() {
        let n = std::f64::consts::E.powf(std::f64::consts::E);
        let a: f64 = 0.5;
        let c = a - 1.0 - a.ln();
        // n rounds down here, so compare against the formula at the rounded n.
        let nr = n.floor() as u64;
        let ln = (nr as f64).ln();
        assert!((pittel_prediction(a, nr).unwrap() - (ln - 1.5 * ln.ln()) / c).abs() < 1e-12);
        assert!((pittel_prediction(0.5, 10_000).unwrap() - 30.44).abs() < 0.01);
        assert!(pittel_prediction(0.5, 100_000).unwrap() > pittel_prediction(0.5, 10_000).unwrap());
        assert!(pittel_prediction(1.0, 100).is_err());
    }
}
