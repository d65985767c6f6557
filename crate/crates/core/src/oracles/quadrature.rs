use crate::{Error, Result};

// Gauss–Kronrod 7-15 nodes on [-1, 1] (positive half, centre last).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
// Gauss weights for the odd-indexed Kronrod nodes (the 7-point rule).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;

/// Returns the Kronrod estimate, the Kronrod-Gauss difference and `∫|f|`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for i in 0..7 {
        let d = r * XGK[i];
        let (lo, hi) = (f(c - d), f(c + d));
        kronrod += WGK[i] * (lo + hi);
        abs += WGK[i] * (lo.abs() + hi.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo + hi);
        }
    }
    (kronrod * r, ((kronrod - gauss) * r).abs(), (abs * r).abs())
}

/// Adaptive Gauss–Kronrod 7-15 on `[a, b]`, bisecting until each piece's error
/// estimate is below its share of `abs_tol`, or below the rounding level of `∫|f|`
/// over the whole interval prorated to the piece.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
        floor_per_width: f64,
        whole: (f64, f64, f64),
        depth: u32,
    ) -> Result<f64> {
        let (value, err, _) = whole;
        if !value.is_finite() {
            return Err(Error::numeric(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if err <= tol || err <= floor_per_width * (b - a).abs() {
            return Ok(value);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::numeric(format!(
                "quadrature did not converge on [{a}, {b}] (error estimate {err:e})"
            )));
        }
        let m = 0.5 * (a + b);
        let left = recurse(
            f,
            a,
            m,
            0.5 * tol,
            floor_per_width,
            gk15(f, a, m),
            depth + 1,
        )?;
        let right = recurse(
            f,
            m,
            b,
            0.5 * tol,
            floor_per_width,
            gk15(f, m, b),
            depth + 1,
        )?;
        Ok(left + right)
    }
    let whole = gk15(&f, a, b);
    let floor_per_width = 50.0 * f64::EPSILON * whole.2 / (b - a).abs();
    recurse(&f, a, b, abs_tol, floor_per_width, whole, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_and_oscillatory() {
        let v = integrate_adaptive(|x| x.exp(), 0.0, 1.0, 1e-14).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
        let v = integrate_adaptive(|x| (30.0 * x).cos(), 0.0, 3.0, 1e-13).unwrap();
        assert!((v - (90f64).sin() / 30.0).abs() < 1e-13);
        let v = integrate_adaptive(|x| 1.0 / (1.0 + 100.0 * x * x), -1.0, 1.0, 1e-14).unwrap();
        assert!((v - 0.2 * 10f64.atan()).abs() < 1e-14);
    }

    #[test]
    fn reports_failure() {
        assert!(integrate_adaptive(|x| 1.0 / x, 0.0, 1.0, 1e-12).is_err());
    }
}
