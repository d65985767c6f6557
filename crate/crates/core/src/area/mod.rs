//! Samplers for the Lévy area `A(h)` of a two-dimensional Wiener path, conditioned
//! on the increments `ΔW¹(h)`, `ΔW²(h)` over the step.
//!
//! Given the increments the law depends only on `h` and `a² = ((ΔW¹)² + (ΔW²)²)/h`.
//! Its conditional variance is `(1 + a²) h²/12`.
//!
//! | method            | representation                                      |
//! |-------------------|-----------------------------------------------------|
//! | `levy_fourier`    | Lévy's Fourier series, four Normals per order       |
//! | `rw_laplace`      | Logistic plus a Poisson mix of Laplace variables    |
//! | `logistic`        | Logistic plus Poisson sums of Logistics at scale 2⁻ⁿ |
//! | `logistic_normal` | as `logistic`, large sums replaced by one Normal    |
//! | `exp_product`     | as `logistic`, large sums drawn from LPED tables    |
//!
//! Each sampler draws its variates in a fixed order (orders `0..=N` or `1..=N`,
//! then the tail Normal), so output is a pure function of the stream position.

mod classic;
mod logistic;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::distributions::VariateSource;
use crate::lped::LpedTableSet;
use crate::{Error, Result};

pub use classic::{levy_fourier_sample, rw_laplace_sample};
pub use logistic::{
    decimal_decompose, exp_product_sample, logistic_normal_sample, logistic_sample,
    logistic_tail_emulation, DecimalDecomposition, EXP_PRODUCT_LIMIT,
};

/// Default order above which a Poisson count is treated as large.
pub const DEFAULT_THRESHOLD: u64 = 100;
/// Threshold that is never reached.
pub const THRESHOLD_INFINITE: u64 = u64::MAX;

/// Increments of both Wiener components over one step of length `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WienerIncrement {
    h: f64,
    dw1: f64,
    dw2: f64,
    a_sq: f64,
}

impl WienerIncrement {
    pub fn new(h: f64, dw1: f64, dw2: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid(format!("step h must be positive, got {h}")));
        }
        if !(dw1.is_finite() && dw2.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite increment ({dw1}, {dw2})"
            )));
        }
        Ok(Self {
            h,
            dw1,
            dw2,
            a_sq: (dw1 * dw1 + dw2 * dw2) / h,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dw1(&self) -> f64 {
        self.dw1
    }

    pub fn dw2(&self) -> f64 {
        self.dw2
    }

    pub fn a_sq(&self) -> f64 {
        self.a_sq
    }
}

/// Two independent `N(0, h)` increments.
pub fn sample_increments(h: f64, source: &mut VariateSource) -> Result<WienerIncrement> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("step h must be positive, got {h}")));
    }
    let s = h.sqrt();
    let dw1 = s * source.normal();
    let dw2 = s * source.normal();
    WienerIncrement::new(h, dw1, dw2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    LevyFourier,
    RwLaplace,
    Logistic,
    LogisticNormal,
    ExpProduct,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::LevyFourier,
        Method::RwLaplace,
        Method::Logistic,
        Method::LogisticNormal,
        Method::ExpProduct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::LevyFourier => "levy_fourier",
            Method::RwLaplace => "rw_laplace",
            Method::Logistic => "logistic",
            Method::LogisticNormal => "logistic_normal",
            Method::ExpProduct => "exp_product",
        }
    }

    /// Smallest admissible truncation order.
    pub fn min_order(self) -> u32 {
        match self {
            Method::LevyFourier | Method::RwLaplace => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}")))
    }
}

/// Sampler choice and its parameters.
#[derive(Debug, Clone)]
pub struct MethodConfig {
    pub method: Method,
    /// Truncation order `N`.
    pub order: u32,
    /// Poisson counts at or above this use the replacement branch.
    pub threshold: u64,
    pub tail: bool,
    /// Needed by `exp_product` only.
    pub tables: Option<Arc<LpedTableSet>>,
}

impl MethodConfig {
    /// `N = 8`, threshold 100, with tail, no tables.
    pub fn new(method: Method) -> Self {
        Self {
            method,
            order: 8,
            threshold: DEFAULT_THRESHOLD,
            tail: true,
            tables: None,
        }
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = order;
        self
    }

    pub fn with_threshold(mut self, threshold: u64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_tail(mut self, tail: bool) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_tables(mut self, tables: Arc<LpedTableSet>) -> Self {
        self.tables = Some(tables);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < self.method.min_order() {
            return Err(Error::invalid(format!(
                "{} needs N >= {}, got {}",
                self.method,
                self.method.min_order(),
                self.order
            )));
        }
        if self.threshold == 0 {
            return Err(Error::invalid("threshold must be at least 1"));
        }
        if self.method == Method::ExpProduct && self.tables.is_none() {
            return Err(Error::Config(
                "exp_product needs LPED tables for P = 10^2..10^5".into(),
            ));
        }
        Ok(())
    }
}

/// One area draw and the uniforms it consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyAreaSample {
    pub value: f64,
    pub uniforms_used: u64,
}

/// Dispatches on `cfg.method`.
pub fn sample_area(
    inc: &WienerIncrement,
    cfg: &MethodConfig,
    source: &mut VariateSource,
) -> Result<LevyAreaSample> {
    match cfg.method {
        Method::LevyFourier => levy_fourier_sample(inc, cfg, source),
        Method::RwLaplace => rw_laplace_sample(inc, cfg, source),
        Method::Logistic => logistic_sample(inc, cfg, source),
        Method::LogisticNormal => logistic_normal_sample(inc, cfg, source),
        Method::ExpProduct => exp_product_sample(inc, cfg, source),
    }
}

/// `E|A - A_N|² = a²/(3·2^{N+1}) · (h/2)²` for the Logistic expansion truncated
/// after order `N`.
pub fn exact_truncation_mse(order: u32, a_sq: f64, h: f64) -> f64 {
    a_sq / (3.0 * 2f64.powi(order as i32 + 1)) * (0.5 * h).powi(2)
}

/// `(8/15) 4^{-(N+1)} (h/2)²`, the bound on the mean-square error left after the
/// Normal tail correction.
pub fn tail_mse_bound(order: u32, h: f64) -> f64 {
    8.0 / 15.0 * 0.25f64.powi(order as i32 + 1) * (0.5 * h).powi(2)
}

/// `(1 + a²) h²/12`.
pub fn conditional_variance(a_sq: f64, h: f64) -> f64 {
    (1.0 + a_sq) * h * h / 12.0
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increments() {
        let mut src = VariateSource::new(1, 0);
        let n = 1_000_000;
        let (mut a, mut s1, mut s11, mut s2, mut s12) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let inc = sample_increments(1.0, &mut src).unwrap();
            a += inc.a_sq();
            s1 += inc.dw1();
            s2 += inc.dw2();
            s11 += inc.dw1() * inc.dw1();
            s12 += inc.dw1() * inc.dw2();
        }
        let nf = n as f64;
        assert!((a / nf / 2.0 - 1.0).abs() < 0.01);
        let corr = (s12 / nf - s1 * s2 / nf / nf) / (s11 / nf);
        assert!(corr.abs() < 0.005, "corr={corr}");

        let mut var = 0.0;
        for _ in 0..n {
            let inc = sample_increments(4.0, &mut src).unwrap();
            var += inc.dw1() * inc.dw1();
        }
        assert!((var / nf / 4.0 - 1.0).abs() < 0.01);
        assert!(sample_increments(0.0, &mut src).is_err());
    }

    #[test]
    fn a_sq_uses_both_components() {
        let inc = WienerIncrement::new(2.0, 1.0, 3.0).unwrap();
        assert_eq!(inc.a_sq(), 5.0);
        assert_eq!(WienerIncrement::new(1.0, 0.0, 0.0).unwrap().a_sq(), 0.0);
        assert!(WienerIncrement::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn closed_forms() {
        assert!((exact_truncation_mse(0, 2.0, 1.0) - 1.0 / 12.0).abs() < 1e-16);
        assert!((exact_truncation_mse(4, 2.0, 1.0) - 1.0 / 192.0).abs() < 1e-16);
        assert_eq!(exact_truncation_mse(3, 0.0, 7.0), 0.0);
        assert!((tail_mse_bound(0, 1.0) - 1.0 / 30.0).abs() < 1e-16);
        for n in 0..10 {
            assert!((tail_mse_bound(n + 1, 1.0) / tail_mse_bound(n, 1.0) - 0.25).abs() < 1e-15);
            assert!((tail_mse_bound(n, 2.0) / tail_mse_bound(n, 1.0) - 4.0).abs() < 1e-15);
        }
        assert_eq!(conditional_variance(2.0, 1.0), 0.25);
        assert!((conditional_variance(0.0, 1.0) - 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(conditional_variance(2.0, 2.0), 1.0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("levy".parse::<Method>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(MethodConfig::new(Method::LevyFourier)
            .with_order(0)
            .validate()
            .is_err());
        assert!(MethodConfig::new(Method::Logistic)
            .with_order(0)
            .validate()
            .is_ok());
        assert!(matches!(
            MethodConfig::new(Method::ExpProduct).validate(),
            Err(Error::Config(_))
        ));
        assert!(MethodConfig::new(Method::LogisticNormal)
            .with_threshold(0)
            .validate()
            .is_err());
    }

    #[test]
    fn every_method_uses_uniforms() {
        let tables = Arc::new(LpedTableSet::build(1001, crate::lped::EndpointMode::Paper).unwrap());
        let inc = WienerIncrement::new(1.0, 0.0, 0.0).unwrap();
        let mut src = VariateSource::new(3, 0);
        for m in Method::ALL {
            let cfg = MethodConfig::new(m)
                .with_tail(false)
                .with_tables(tables.clone());
            let s = sample_area(&inc, &cfg, &mut src).unwrap();
            assert!(s.uniforms_used > 0, "{m}");
        }
    }
}
