//! Real special functions used by the LPED density engines.
//!
//! All functions are pure. Arguments outside the domain return
//! [`Error::Domain`](crate::Error::Domain).

mod bessel;
mod zeta;

pub use bessel::bessel_k0;

use crate::dd::DoubleDouble;
use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest order accepted by [`gamma_taylor`].
pub const GAMMA_TAYLOR_MAX_ORDER: usize = 64;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Arguments are shifted up to at least this before the asymptotic series.
const ASYMPTOTIC_START: f64 = 8.0;
const LOG_GAMMA_ASYMPTOTIC_START: f64 = 10.0;

// B_{2k} for k = 1..=7.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { function, value: x })
    }
}

/// log Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    let mut shift = 1.0;
    let mut z = x;
    while z < LOG_GAMMA_ASYMPTOTIC_START {
        shift *= z;
        z += 1.0;
    }
    // Stirling series with the B_{2k} / (2k (2k-1) z^{2k-1}) corrections.
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k + 1) as f64;
        corr += b / (two_k * (two_k - 1.0)) * pow;
        pow *= inv2;
    }
    Ok((z - 0.5) * z.ln() - z + HALF_LN_2PI + corr - shift.ln())
}

/// Digamma ψ(x) = Γ'(x)/Γ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    let mut acc = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_START {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let mut series = 0.0;
    let mut pow = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        series += b / (2.0 * (k + 1) as f64) * pow;
        pow *= inv2;
    }
    Ok(acc + z.ln() - 0.5 / z - series)
}

/// Trigamma ψ'(x) for x > 0.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    let mut acc = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_START {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv2 * inv;
    for b in BERNOULLI {
        series += b * pow;
        pow *= inv2;
    }
    Ok(acc + inv + 0.5 * inv2 + series)
}

const INVERSE_DIGAMMA_MAX_ITER: usize = 100;

/// The x > 0 with ψ(x) = y, by safeguarded Newton iteration.
///
/// Starts from `exp(y) + 1/2` when `y >= -2.22` and from `-1/(y + γ)` otherwise.
/// Iterates never leave (0, ∞): a step that would cross zero halves the iterate
/// instead. Results above `f64::MAX` are reported as a numeric error.
pub fn inverse_digamma(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain {
            function: "inverse_digamma",
            value: y,
        });
    }
    let mut x = if y >= -2.22 {
        y.exp() + 0.5
    } else {
        -1.0 / (y + EULER_GAMMA)
    };
    if !x.is_finite() {
        return Err(Error::numeric(format!(
            "inverse_digamma({y}) exceeds the floating-point range"
        )));
    }
    let tol = 1e-10 * y.abs().max(1.0);
    for _ in 0..INVERSE_DIGAMMA_MAX_ITER {
        let residual = digamma(x)? - y;
        let step = residual / trigamma(x)?;
        let next = if x - step > 0.0 { x - step } else { 0.5 * x };
        let converged = (next - x).abs() <= 4.0 * f64::EPSILON * next;
        x = next;
        if converged {
            break;
        }
    }
    let residual = (digamma(x)? - y).abs();
    if residual <= tol {
        Ok(x)
    } else {
        Err(Error::numeric(format!(
            "inverse_digamma({y}) did not converge (residual {residual:e})"
        )))
    }
}

/// Taylor coefficients of Γ(1+z) about z = 0, `c_k = Γ^(k)(1) / k!`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTaylorCoeffs {
    coeffs: Vec<f64>,
}

impl GammaTaylorCoeffs {
    /// `c_0, ..., c_{K_max}`.
    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Σ c_k z^k over the stored orders.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }
}

/// Computes c_0..c_{max_order} by exponentiating
/// log Γ(1+z) = -γz + Σ_{k≥2} (-1)^k ζ(k) z^k / k.
///
/// With `g` the log series, `c' = g' c` gives `k c_k = Σ_{j=1}^{k} j g_j c_{k-j}`,
/// and `j g_j` is just `-γ` or `(-1)^j ζ(j)`. The recurrence runs in double-double
/// arithmetic; the coefficients are of order one (the nearest singularity is the
/// simple pole at z = -1) so every c_k is correct to f64 rounding.
pub fn gamma_taylor(max_order: usize) -> Result<GammaTaylorCoeffs> {
    Ok(GammaTaylorCoeffs {
        coeffs: gamma_taylor_dd(max_order)?
            .into_iter()
            .map(DoubleDouble::to_f64)
            .collect(),
    })
}

/// [`gamma_taylor`] without the final rounding to f64.
pub(crate) fn gamma_taylor_dd(max_order: usize) -> Result<Vec<DoubleDouble>> {
    if max_order == 0 || max_order > GAMMA_TAYLOR_MAX_ORDER {
        return Err(Error::invalid(format!(
            "gamma_taylor order must be in 1..={GAMMA_TAYLOR_MAX_ORDER}, got {max_order}"
        )));
    }
    // weights[j] = j g_j
    let mut weights = vec![DoubleDouble::ZERO; max_order + 1];
    weights[1] = -DoubleDouble::from(zeta::EULER_GAMMA_DD);
    for (j, w) in weights.iter_mut().enumerate().skip(2) {
        let zeta = DoubleDouble::ONE + DoubleDouble::from(zeta::ZETA_MINUS_ONE_DD[j - 2]);
        *w = if j % 2 == 0 { zeta } else { -zeta };
    }
    let mut c = vec![DoubleDouble::ONE];
    for k in 1..=max_order {
        let mut sum = DoubleDouble::ZERO;
        for j in 1..=k {
            sum = sum + weights[j] * c[k - j];
        }
        c.push(sum / k as f64);
    }
    Ok(c)
}
