//! Residue series for `φ_P`, summing the poles of `Γ(t)^P e^{(1-t)x}` at `t = -n`.
//!
//! Writing `t = -n + ζ`,
//!
//! `Γ(t)^P = ζ^{-P} (-1)^{nP} / (n!)^P · Γ(1+ζ)^P · Π_{j=1}^{n} (1 - ζ/j)^{-P}`,
//!
//! so the residue is a coefficient of `ζ^{P-1}` in a product of three power series:
//! `q = c^{*P}` from `Γ(1+ζ)`, `r(n)` from the product over `j`, and `e^{-ζx}`.
//! Each factor `(1 - ζ/j)^{-P}` expands as `Σ_k C(P+k-1, k) ζ^k / j^k`.
//!
//! The alternating sum cancels heavily once `e^{x/P}` is large, so everything
//! runs in double-double arithmetic and the cancellation ratio is monitored.

use crate::dd::DoubleDouble;
use crate::special::gamma_taylor_dd;
use crate::{Error, Result};

/// Largest `P` accepted by [`density_series`].
pub const MAX_SERIES_P: u32 = 10;

/// Default number of poles summed.
pub const DEFAULT_SERIES_TERMS: usize = 200;

const RELATIVE_STOP: f64 = 1e-17;
// Above this the double-double sum no longer carries f64 accuracy.
const MAX_CANCELLATION: f64 = 1e15;

/// Coefficients of the residue series for a fixed `P`.
#[derive(Debug, Clone)]
pub struct SeriesCoefficients {
    p: u32,
    q: Vec<DoubleDouble>,
}

impl SeriesCoefficients {
    pub fn new(p: u32) -> Result<Self> {
        if !(1..=MAX_SERIES_P).contains(&p) {
            return Err(Error::invalid(format!(
                "series density needs 1 <= P <= {MAX_SERIES_P}, got {p}"
            )));
        }
        let len = p as usize;
        let c = gamma_taylor_dd(len.max(2) - 1)?;
        let mut q = vec![DoubleDouble::ZERO; len];
        q[0] = DoubleDouble::ONE;
        for _ in 0..p {
            q = truncated_product(&q, &c, len);
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Taylor coefficients of `Γ(1+ζ)^P` up to `ζ^{P-1}`.
    pub fn q(&self) -> Vec<f64> {
        self.q.iter().map(|v| v.to_f64()).collect()
    }

    /// Taylor coefficients of `Π_{j=1}^{n} (1 - ζ/j)^{-P}` up to `ζ^{P-1}`.
    pub fn r(&self, n: usize) -> Vec<f64> {
        let mut r = self.r_zero();
        for j in 1..=n {
            r = self.next_r(&r, j);
        }
        r.iter().map(|v| v.to_f64()).collect()
    }

    /// Coefficient of `x^k e^{(n+1)x}` in `φ_P(x)`:
    /// `(-1)^{nP+k} (q * r(n))_{P-1-k} / ((n!)^P k!)`.
    pub fn a(&self, k: usize, n: usize) -> f64 {
        let len = self.p as usize;
        if k >= len {
            return 0.0;
        }
        let mut r = self.r_zero();
        let mut scale = DoubleDouble::ONE;
        for j in 1..=n {
            r = self.next_r(&r, j);
            for _ in 0..self.p {
                scale = scale / j as f64;
            }
        }
        for i in 1..=k {
            scale = scale / i as f64;
        }
        let qr = truncated_product(&self.q, &r, len);
        let value = (scale * qr[len - 1 - k]).to_f64();
        if (n * self.p as usize + k) % 2 == 1 {
            -value
        } else {
            value
        }
    }

    fn r_zero(&self) -> Vec<DoubleDouble> {
        let mut r = vec![DoubleDouble::ZERO; self.p as usize];
        r[0] = DoubleDouble::ONE;
        r
    }

    fn next_r(&self, prev: &[DoubleDouble], j: usize) -> Vec<DoubleDouble> {
        let len = self.p as usize;
        let mut factor = Vec::with_capacity(len);
        let mut f = DoubleDouble::ONE;
        factor.push(f);
        for k in 1..len {
            f = f * (self.p as usize + k - 1) as f64 / k as f64 / j as f64;
            factor.push(f);
        }
        truncated_product(prev, &factor, len)
    }
}

fn truncated_product(a: &[DoubleDouble], b: &[DoubleDouble], len: usize) -> Vec<DoubleDouble> {
    (0..len)
        .map(|m| {
            (0..=m)
                .filter(|&i| i < a.len() && m - i < b.len())
                .fold(DoubleDouble::ZERO, |acc, i| acc + a[i] * b[m - i])
        })
        .collect()
}

/// `φ_P(x)` by the residue series, summing at most `n_terms` poles.
///
/// Stops once the magnitude bound on a term is below `1e-17` of the running sum and
/// shrinking. Errors if that has not happened within `n_terms` poles, or if the
/// largest term exceeds the result by more than `1e13` (lost accuracy at large `x`).
pub fn density_series(p: u32, x: f64, n_terms: usize) -> Result<f64> {
    let coeffs = SeriesCoefficients::new(p)?;
    if !x.is_finite() {
        return Err(Error::invalid(format!(
            "series density needs finite x, got {x}"
        )));
    }
    if n_terms == 0 {
        return Err(Error::invalid("series density needs n_terms >= 1"));
    }
    if x > 700.0 {
        return Err(Error::numeric(format!("series density diverges at x={x}")));
    }
    let len = p as usize;

    // x^k / k! with alternating sign, as used against (q * r(n))_{P-1-k}
    let mut powers = Vec::with_capacity(len);
    let mut t = DoubleDouble::ONE;
    for k in 0..len {
        if k > 0 {
            t = t * (-x) / k as f64;
        }
        powers.push(t);
    }

    let e = DoubleDouble::exp(x);
    let mut w = e;
    let mut r = coeffs.r_zero();
    let mut sum = DoubleDouble::ZERO;
    let mut max_env = 0.0_f64;
    let mut prev_env = f64::INFINITY;
    let mut converged = false;
    for n in 0..n_terms {
        if n > 0 {
            r = coeffs.next_r(&r, n);
            w = w * e;
            for _ in 0..p {
                w = w / n as f64;
            }
        }
        let qr = truncated_product(&coeffs.q, &r, len);
        let mut poly = DoubleDouble::ZERO;
        let mut env = 0.0;
        for k in 0..len {
            let c = qr[len - 1 - k];
            poly = poly + powers[k] * c;
            env += powers[k].to_f64().abs() * c.to_f64().abs();
        }
        let term = w * poly;
        sum = if (n * len) % 2 == 1 {
            sum - term
        } else {
            sum + term
        };
        let env = env * w.to_f64();
        max_env = max_env.max(env);
        let s = sum.to_f64().abs();
        if env <= RELATIVE_STOP * s && env < prev_env || env == 0.0 {
            converged = true;
            break;
        }
        prev_env = env;
    }
    if !converged {
        return Err(Error::numeric(format!(
            "series density at P={p}, x={x} not converged after {n_terms} terms"
        )));
    }
    let value = sum.to_f64();
    if max_env > MAX_CANCELLATION * value.abs() && max_env > 0.0 {
        return Err(Error::numeric(format!(
            "series density at P={p}, x={x} lost accuracy to cancellation \
             (largest term {max_env:e}, sum {value:e})"
        )));
    }
    Ok(value)
}
