use std::f64::consts::{LN_2, PI};

use super::quadrature::integrate_adaptive;
use crate::{Error, Result};

const SERIES_CUTOFF: f64 = 1e-4;
const ENVELOPE_FLOOR: f64 = 1e-14;
const QUAD_TOL: f64 = 1e-15;
const NEGATIVE_SLACK: f64 = 1e-10;

/// `ln(z / sinh z)` and `z coth z - 1` for `z >= 0`.
fn kernel_parts(z: f64) -> (f64, f64) {
    if z < SERIES_CUTOFF {
        let z2 = z * z;
        let log_ratio = -z2 / 6.0 + z2 * z2 / 180.0;
        let coth_part = z2 / 3.0 - z2 * z2 / 45.0;
        (log_ratio, coth_part)
    } else {
        let e = (-2.0 * z).exp();
        let log_ratio = z.ln() + LN_2 - z - (-e).ln_1p();
        let coth_part = z * (1.0 + e) / (1.0 - e) - 1.0;
        (log_ratio, coth_part)
    }
}

/// Characteristic function of the Lévy area given `a²`:
///
/// `(½hξ / sinh(½hξ)) exp(-½a²(½hξ coth(½hξ) - 1))`.
///
/// Even in `ξ`, equal to 1 at `ξ = 0`, and evaluated in log form so large `|ξ|`
/// underflows cleanly to 0. Requires `h > 0`.
pub fn char_fn(xi: f64, a_sq: f64, h: f64) -> f64 {
    let z = (0.5 * h * xi).abs();
    let (log_ratio, coth_part) = kernel_parts(z);
    (log_ratio - 0.5 * a_sq * coth_part).exp()
}

/// Frequency beyond which `(½hξ)/sinh(½hξ) < 1e-14`, bounding `|φ̂|` for every `a²`.
pub fn inversion_cutoff(h: f64) -> f64 {
    // solve ln z + ln 2 - z = ln 1e-14 by Newton from the right of the root
    let target = ENVELOPE_FLOOR.ln();
    let mut z: f64 = 40.0;
    for _ in 0..50 {
        let g = z.ln() + LN_2 - z - target;
        let step = g / (1.0 / z - 1.0);
        z -= step;
        if step.abs() < 1e-13 {
            break;
        }
    }
    2.0 * z / h
}

fn check(a_sq: f64, h: f64, x: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("step h must be positive, got {h}")));
    }
    if !(a_sq >= 0.0 && a_sq.is_finite()) {
        return Err(Error::invalid(format!(
            "a² must be nonnegative, got {a_sq}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::invalid(format!("x must be finite, got {x}")));
    }
    Ok(())
}

/// Integrates `g` over `[0, ξ_max]` in panels of about half a period of `cos(ξx)`.
fn integrate_spectrum(g: impl Fn(f64) -> f64, x: f64, h: f64) -> Result<f64> {
    let xi_max = inversion_cutoff(h);
    let panels = 16 + (xi_max * x.abs() / PI).ceil() as usize;
    let width = xi_max / panels as f64;
    let tol = QUAD_TOL / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let a = width * i as f64;
        total += integrate_adaptive(&g, a, a + width, tol)?;
    }
    Ok(total)
}

/// `φ(x) = (1/π) ∫_0^∞ φ̂(ξ) cos(ξx) dξ` by adaptive quadrature, truncated at
/// [`inversion_cutoff`].
///
/// Rounding can leave tiny negative values far in the tails; anything above
/// `-1e-10` is clamped to 0 and anything below is a numeric error.
pub fn density_by_inversion(x: f64, a_sq: f64, h: f64) -> Result<f64> {
    check(a_sq, h, x)?;
    let value = integrate_spectrum(|xi| char_fn(xi, a_sq, h) * (xi * x).cos(), x, h)? / PI;
    if value < -NEGATIVE_SLACK {
        return Err(Error::numeric(format!(
            "inverted density is negative ({value:e}) at x={x}"
        )));
    }
    Ok(value.max(0.0))
}

/// `F(x) = ½ + (1/π) ∫_0^∞ φ̂(ξ) sin(ξx)/ξ dξ`, clamped to `[0, 1]`.
pub fn cdf_by_inversion(x: f64, a_sq: f64, h: f64) -> Result<f64> {
    check(a_sq, h, x)?;
    let integrand = |xi: f64| {
        let s = if xi == 0.0 { x } else { (xi * x).sin() / xi };
        char_fn(xi, a_sq, h) * s
    };
    let value = 0.5 + integrate_spectrum(integrand, x, h)? / PI;
    Ok(value.clamp(0.0, 1.0))
}

/// `∫ x² φ(x) dx` by the trapezium rule on `[-25h, 25h]` with step `h/20`, using
/// [`density_by_inversion`]. The density is analytic in a strip and decays like
/// `e^{-2π|x|/h}`, so the rule converges geometrically.
pub fn second_moment_by_quadrature(a_sq: f64, h: f64) -> Result<f64> {
    check(a_sq, h, 0.0)?;
    let step = h / 20.0;
    let half = 500;
    let mut total = 0.0;
    // symmetric density: integrate over x >= 0 and double; x = 0 contributes 0
    for i in 1..=half {
        let x = step * i as f64;
        let w = if i == half { 0.5 } else { 1.0 };
        total += w * x * x * density_by_inversion(x, a_sq, h)?;
    }
    Ok(2.0 * step * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::area::conditional_variance;

    #[test]
    fn char_fn_values() {
        assert_eq!(char_fn(0.0, 2.0, 1.0), 1.0);
        assert!((char_fn(1.0, 0.0, 2.0) - 1.0 / 1f64.sinh()).abs() < 1e-15);
        for xi in [1e-6, 0.3, 2.0, 17.0, 400.0] {
            for a_sq in [0.0, 2.0, 9.0] {
                assert_eq!(char_fn(xi, a_sq, 1.5), char_fn(-xi, a_sq, 1.5));
            }
        }
        assert_eq!(char_fn(1e5, 2.0, 1.0), 0.0);
    }

    #[test]
    fn char_fn_branches_agree() {
        for a_sq in [0.0, 3.0] {
            let below = char_fn(2.0 * 0.999e-4, a_sq, 1.0);
            let above = char_fn(2.0 * 1.001e-4, a_sq, 1.0);
            assert!((below - above).abs() < 1e-8);
        }
        // direct formula at moderate z
        let z: f64 = 0.7;
        let direct = z / z.sinh() * (-0.5 * 2.0 * (z / z.tanh() - 1.0)).exp();
        assert!((char_fn(1.4, 2.0, 1.0) - direct).abs() < 1e-15);
    }

    #[test]
    fn cutoff_envelope() {
        let z = 0.5 * inversion_cutoff(1.0);
        assert!((z / z.sinh() / 1e-14 - 1.0).abs() < 1e-9, "z={z}");
    }

    #[test]
    fn zero_a_sq_is_scaled_logistic() {
        for h in [1.0, 2.5] {
            for i in 0..=20 {
                let x = -h + 2.0 * h * i as f64 / 20.0;
                let exact = PI / (2.0 * h) / (PI * x / h).cosh().powi(2);
                let got = density_by_inversion(x, 0.0, h).unwrap();
                assert!((got - exact).abs() < 1e-6, "h={h} x={x}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn density_is_even_and_normalized() {
        for x in [0.1, 0.5, 1.7] {
            let d = density_by_inversion(x, 2.0, 1.0).unwrap()
                - density_by_inversion(-x, 2.0, 1.0).unwrap();
            assert!(d.abs() < 1e-10);
        }
        let step = 0.05;
        let mass: f64 = (-500..=500)
            .map(|i| density_by_inversion(step * i as f64, 2.0, 1.0).unwrap())
            .sum::<f64>()
            * step;
        assert!((mass - 1.0).abs() < 1e-4, "{mass}");
    }

    #[test]
    fn cdf_matches_logistic_at_zero_a_sq() {
        for x in [-0.8, -0.2, 0.0, 0.3, 1.1] {
            let exact = 1.0 / (1.0 + (-2.0 * PI * x).exp());
            assert!((cdf_by_inversion(x, 0.0, 1.0).unwrap() - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn second_moments() {
        for (a_sq, h) in [(0.0, 1.0), (2.0, 1.0), (2.0, 4.0)] {
            let m = second_moment_by_quadrature(a_sq, h).unwrap();
            let want = conditional_variance(a_sq, h);
            assert!(
                (m / want - 1.0).abs() < 1e-4,
                "a²={a_sq}, h={h}: {m} vs {want}"
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(density_by_inversion(0.0, 1.0, 0.0).is_err());
        assert!(density_by_inversion(0.0, -1.0, 1.0).is_err());
        assert!(cdf_by_inversion(f64::NAN, 1.0, 1.0).is_err());
    }
}
