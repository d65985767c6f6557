use std::f64::consts::{PI, SQRT_2};

use super::{LevyAreaSample, MethodConfig, WienerIncrement};
use crate::distributions::VariateSource;
use crate::Result;

/// `π²/6 - Σ_{k≤N} 1/k²`.
fn zeta2_tail(order: u32) -> f64 {
    let head: f64 = (1..=order).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
    PI * PI / 6.0 - head
}

/// Lévy's series truncated after `N` orders:
///
/// `(h/2π) Σ_{k≤N} (1/k)(U_k(Y_k - √(2/h)ΔW²) - V_k(X_k - √(2/h)ΔW¹))`.
///
/// The tail Normal has the exact variance of the discarded orders,
/// `(h/(√2π))² (1 + a²)(π²/6 - Σ_{k≤N} 1/k²)`.
pub fn levy_fourier_sample(
    inc: &WienerIncrement,
    cfg: &MethodConfig,
    source: &mut VariateSource,
) -> Result<LevyAreaSample> {
    cfg.validate()?;
    let start = source.uniforms_drawn();
    let h = inc.h();
    let c = (2.0 / h).sqrt();
    let (b1, b2) = (c * inc.dw1(), c * inc.dw2());
    let mut sum = 0.0;
    for k in 1..=cfg.order {
        let u = source.normal();
        let y = source.normal();
        let v = source.normal();
        let x = source.normal();
        sum += (u * (y - b2) - v * (x - b1)) / k as f64;
    }
    let mut value = h / (2.0 * PI) * sum;
    if cfg.tail {
        let scale = h / (SQRT_2 * PI) * ((1.0 + inc.a_sq()) * zeta2_tail(cfg.order)).sqrt();
        value += scale * source.normal();
    }
    Ok(LevyAreaSample {
        value,
        uniforms_used: source.uniforms_drawn() - start,
    })
}

/// `(h/2π)(X + Σ_{k≤N} (1/k) Σ_{j≤P_k} Y_{jk})` with `X` Logistic, `P_k ~ Poisson(a²)`
/// and `Y_{jk}` standard Laplace.
///
/// The tail Normal has the exact variance of the discarded orders,
/// `(h/2π)² 2a² (π²/6 - Σ_{k≤N} 1/k²)`.
pub fn rw_laplace_sample(
    inc: &WienerIncrement,
    cfg: &MethodConfig,
    source: &mut VariateSource,
) -> Result<LevyAreaSample> {
    cfg.validate()?;
    let start = source.uniforms_drawn();
    let a_sq = inc.a_sq();
    let mut sum = source.logistic();
    for k in 1..=cfg.order {
        let count = source.poisson(a_sq)?;
        let inner: f64 = (0..count).map(|_| source.laplace()).sum();
        sum += inner / k as f64;
    }
    let scale = inc.h() / (2.0 * PI);
    let mut value = scale * sum;
    if cfg.tail {
        let sd = scale * (2.0 * a_sq * zeta2_tail(cfg.order)).sqrt();
        value += sd * source.normal();
    }
    Ok(LevyAreaSample {
        value,
        uniforms_used: source.uniforms_drawn() - start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::area::test_support::{moments, run_fixed, run_random};
    use crate::area::{conditional_variance, Method};

    #[test]
    fn zeta_tail() {
        assert!((zeta2_tail(0) - PI * PI / 6.0).abs() < 1e-15);
        // ≈ 1/N for large N
        assert!((zeta2_tail(1000) * 1000.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn fourier_zero_increments() {
        let cfg = MethodConfig::new(Method::LevyFourier);
        let inc = WienerIncrement::new(1.0, 0.0, 0.0).unwrap();
        let (mean, var, se) = moments(&run_fixed(&cfg, &inc, 1_000_000, 1));
        assert!((var * 12.0 - 1.0).abs() < 0.015, "var={var}");
        assert!(mean.abs() < 3.0 * (var / 1e6).sqrt(), "mean={mean}");
        assert!(se > 0.0);
    }

    #[test]
    fn fourier_random_increments() {
        let cfg = MethodConfig::new(Method::LevyFourier);
        let (_, var, _) = moments(&run_random(&cfg, 1.0, 1_000_000, 2));
        assert!((var / 0.25 - 1.0).abs() < 0.015, "var={var}");
    }

    #[test]
    fn fourier_fixed_increments_mean() {
        let cfg = MethodConfig::new(Method::LevyFourier).with_order(4);
        let inc = WienerIncrement::new(1.0, 1.3, -0.4).unwrap();
        let samples = run_fixed(&cfg, &inc, 1_000_000, 3);
        let (mean, var, _) = moments(&samples);
        assert!(mean.abs() < 3.0 * (var / 1e6).sqrt(), "mean={mean}");
        let want = conditional_variance(inc.a_sq(), 1.0);
        assert!((var / want - 1.0).abs() < 0.015, "var={var} want={want}");
    }

    #[test]
    fn fourier_uses_four_normals_per_order() {
        let inc = WienerIncrement::new(1.0, 0.5, 0.5).unwrap();
        let mut src = VariateSource::new(0, 0);
        let cfg = MethodConfig::new(Method::LevyFourier).with_order(5);
        assert_eq!(
            levy_fourier_sample(&inc, &cfg, &mut src)
                .unwrap()
                .uniforms_used,
            21
        );
        let cfg = cfg.with_tail(false);
        assert_eq!(
            levy_fourier_sample(&inc, &cfg, &mut src)
                .unwrap()
                .uniforms_used,
            20
        );
    }

    #[test]
    fn rw_zero_increments_is_scaled_logistic() {
        let cfg = MethodConfig::new(Method::RwLaplace);
        let inc = WienerIncrement::new(2.0, 0.0, 0.0).unwrap();
        let mut a = VariateSource::new(9, 0);
        let mut b = VariateSource::new(9, 0);
        for _ in 0..100 {
            let s = rw_laplace_sample(&inc, &cfg, &mut a).unwrap();
            let x = b.logistic();
            let _ = b.normal();
            assert_eq!(s.value, 2.0 / (2.0 * PI) * x);
        }
        let (_, var, _) = moments(&run_fixed(&cfg, &inc, 1_000_000, 4));
        assert!(
            (var / conditional_variance(0.0, 2.0) - 1.0).abs() < 0.015,
            "var={var}"
        );
    }

    #[test]
    fn rw_random_increments() {
        let cfg = MethodConfig::new(Method::RwLaplace).with_order(32);
        let (_, var, _) = moments(&run_random(&cfg, 1.0, 1_000_000, 5));
        assert!((var / 0.25 - 1.0).abs() < 0.015, "var={var}");
    }

    #[test]
    fn rw_poisson_draws_average_a_sq_per_order() {
        // a² = 2: each order costs Poisson (P_k + 1 uniforms) plus P_k Laplaces
        let n = 16;
        let cfg = MethodConfig::new(Method::RwLaplace)
            .with_order(n)
            .with_tail(false);
        let inc = WienerIncrement::new(1.0, 1.0, 1.0).unwrap();
        let mut src = VariateSource::new(6, 0);
        let runs = 100_000;
        let total: u64 = (0..runs)
            .map(|_| {
                rw_laplace_sample(&inc, &cfg, &mut src)
                    .unwrap()
                    .uniforms_used
            })
            .sum();
        let per_order = (total as f64 / runs as f64 - 1.0) / n as f64;
        // E{P_k} Laplaces + E{P_k} + 1 Poisson uniforms
        assert!((per_order - 5.0).abs() < 0.05, "{per_order}");
    }
}
