use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Ball and hole densities of the i.i.d. configuration on `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZLawParams {
    pub d_b: f64,
    pub d_t: f64,
}

impl ZLawParams {
    pub fn new(d_b: f64, d_t: f64) -> Result<Self> {
        if !(d_b > 0.0 && d_t > d_b && d_b + d_t <= 1.0 + 1e-12) {
            return Err(domain(format!("need 0 < d_b < d_t and d_b + d_t <= 1 (got {d_b}, {d_t})")));
        }
        Ok(Self { d_b, d_t })
    }

    pub fn lambda(&self) -> f64 {
        self.d_b * self.d_t
    }
}

fn check_gf_arg(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 0.25) {
        return Err(domain(format!("argument {a} outside (0, 1/4]")));
    }
    Ok(())
}

/// Catalan generating function `sum C_k a^k = (1 - sqrt(1-4a)) / (2a)`.
pub fn catalan_gf_g(a: f64) -> Result<f64> {
    check_gf_arg(a)?;
    let s = (1.0 - 4.0 * a).max(0.0).sqrt();
    Ok(2.0 / (1.0 + s))
}

/// `2a G'(a) + G(a) = sum (2k+1) C_k a^k`, infinite at `a = 1/4`.
pub fn catalan_gf_h(a: f64) -> Result<f64> {
    check_gf_arg(a)?;
    let s = (1.0 - 4.0 * a).max(0.0).sqrt();
    if s == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 / (s * (1.0 + s)))
}

/// `ln(C_b a^b)`.
fn ln_catalan_power(b: u64, ln_a: f64) -> f64 {
    let b = b as f64;
    ln_gamma(2.0 * b + 1.0) - ln_gamma(b + 1.0) - ln_gamma(b + 2.0) + b * ln_a
}

fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Marginal law of a block size `2b` on `Z` when `d_b + d_t = 1`; block 0
/// (the one containing the origin) is size-biased.
pub fn z_critical_block_law(params: ZLawParams, index: i64, b: u64) -> Result<f64> {
    if (params.d_b + params.d_t - 1.0).abs() > 1e-12 {
        return Err(domain("this law needs d_b + d_t = 1"));
    }
    let lambda = params.lambda();
    let term = if b < 200 {
        let mut t = 1.0;
        for k in 0..b {
            t *= lambda * 2.0 * (2 * k + 1) as f64 / (k + 2) as f64;
        }
        t
    } else {
        ln_catalan_power(b, lambda.ln()).exp()
    };
    Ok(if index == 0 {
        (2 * b + 1) as f64 * term / catalan_gf_h(lambda)?
    } else {
        term / catalan_gf_g(lambda)?
    })
}

/// Probability that the block containing the origin has `l0` sites, for
/// any densities with `0 < d_b < d_t` and `d_b + d_t <= 1`.
pub fn z_block0_law_general(d_b: f64, d_t: f64, l0: u64) -> Result<f64> {
    let params = ZLawParams::new(d_b, d_t)?;
    let nu = (1.0 - params.d_b - params.d_t).max(0.0);
    let ln_db = d_b.ln();
    let ln_dt = d_t.ln();
    if nu == 0.0 {
        if l0 % 2 == 1 {
            return Ok(0.0);
        }
        let k = l0 / 2;
        let ln_term = ((2 * k + 1) as f64).ln() + ln_catalan_power(k, ln_db + ln_dt) + ln_dt;
        return Ok((d_t - d_b) * ln_term.exp());
    }
    // term(b) = (l0+1)/(b+1) * l0!/(b! b! (l0-2b)!) * d_b^b d_t^(b+1) nu^(l0-2b)
    let ln_nu = nu.ln();
    let ln_ratio_base = ln_db + ln_dt - 2.0 * ln_nu;
    let mut ln_terms = Vec::with_capacity(l0 as usize / 2 + 1);
    let mut ln_t = ((l0 + 1) as f64).ln() + ln_dt + l0 as f64 * ln_nu;
    for b in 0..=l0 / 2 {
        ln_terms.push(ln_t);
        let free = (l0 - 2 * b) as f64;
        if free < 2.0 {
            break;
        }
        let bf = b as f64;
        ln_t += (free * (free - 1.0)).ln() - 2.0 * (bf + 1.0).ln() + ((bf + 1.0) / (bf + 2.0)).ln()
            + ln_ratio_base;
    }
    let max = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ln_terms.iter().map(|t| (t - max).exp()).sum();
    Ok((d_t - d_b) * (max + sum.ln()).exp())
}
