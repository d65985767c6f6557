use std::f64::consts::PI;

use crate::special::{inverse_digamma, log_gamma, trigamma};
use crate::{Error, Result};

/// Saddle-point density of `log(E_1 ⋯ E_P)`:
///
/// `Γ(z*)^P e^{x(1 - z*)} / sqrt(2πP ψ'(z*))` with `z* = ψ^{-1}(x/P)`,
/// evaluated in log space. The relative error is O(1/P) uniformly in `x`.
pub fn density_asymptotic(p: u32, x: f64) -> Result<f64> {
    if p < 2 {
        return Err(Error::invalid(format!(
            "saddle-point density needs P >= 2, got {p}"
        )));
    }
    let pf = p as f64;
    let z = inverse_digamma(x / pf)?;
    let log_density =
        pf * log_gamma(z)? + x * (1.0 - z) - 0.5 * (2.0 * PI * pf * trigamma(z)?).ln();
    Ok(log_density.exp())
}

/// Large-`x` form `(2π)^{(P-1)/2} / sqrt(P) · exp(-P e^{x/P} + (P+1)x/(2P))`.
///
/// Exact for `P = 1`. For large `P` it is only useful far out in the right tail.
pub fn density_large_x(p: u32, x: f64) -> f64 {
    let pf = p as f64;
    let log_density = 0.5 * (pf - 1.0) * (2.0 * PI).ln() - 0.5 * pf.ln() - pf * (x / pf).exp()
        + (pf + 1.0) * x / (2.0 * pf);
    log_density.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::EULER_GAMMA;

    fn trapezium(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let inner: f64 = (1..panels).map(|i| f(a + h * i as f64)).sum();
        h * (0.5 * f(a) + inner + 0.5 * f(b))
    }

    #[test]
    fn value_at_unit_saddle() {
        let x = -100.0 * EULER_GAMMA;
        let want = 1.0 / (2.0 * PI * 100.0 * PI * PI / 6.0).sqrt();
        let got = density_asymptotic(100, x).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!((got - 0.0311).abs() < 5e-5);
    }

    #[test]
    fn rejects_small_p() {
        assert!(matches!(
            density_asymptotic(1, 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn moments_at_p100() {
        let f = |x: f64| density_asymptotic(100, x).unwrap();
        let (a, b, n) = (-230.0, 60.0, 29_000);
        let mass = trapezium(f, a, b, n);
        assert!((mass - 1.0).abs() < 5e-3, "mass={mass}");
        let mean = trapezium(|x| x * f(x), a, b, n) / mass;
        assert!((mean + 100.0 * EULER_GAMMA).abs() < 0.5, "mean={mean}");
        let var = trapezium(|x| (x - mean).powi(2) * f(x), a, b, n) / mass;
        let want = 100.0 * PI * PI / 6.0;
        assert!((var / want - 1.0).abs() < 0.02, "var={var}");
    }

    #[test]
    fn large_x_form_is_exact_for_one_factor() {
        for i in 0..=40 {
            let x = -8.0 + 0.25 * i as f64;
            let exact = (x - x.exp()).exp();
            let got = density_large_x(1, x);
            assert!((got - exact).abs() <= 1e-14 * exact.max(1e-300), "x={x}");
        }
    }

    #[test]
    fn large_x_form_breaks_down_near_the_mode_for_large_p() {
        let x = -57.7;
        let saddle = density_asymptotic(100, x).unwrap();
        let tail = density_large_x(100, x);
        let ratio = tail / saddle;
        assert!(!(0.5..=2.0).contains(&ratio), "ratio={ratio}");
    }
}
