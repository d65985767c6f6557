use std::f64::consts::PI;

use super::{LevyAreaSample, MethodConfig, WienerIncrement, DEFAULT_THRESHOLD};
use crate::distributions::VariateSource;
use crate::lped::LpedTableSet;
use crate::{Error, Result};

/// Poisson counts at or above this are beyond the decimal tables and fall back to
/// the Normal replacement in `exp_product`.
pub const EXP_PRODUCT_LIMIT: u64 = 1_000_000;

/// `P = a1 + a2·10² + a3·10³ + a4·10⁴ + a5·10⁵` with `a1 < 100` and single digits
/// `a2..a5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecimalDecomposition {
    pub a1: u32,
    /// `a2, a3, a4, a5`.
    pub digits: [u32; 4],
}

impl DecimalDecomposition {
    pub fn value(&self) -> u64 {
        let mut total = self.a1 as u64;
        let mut scale = 100u64;
        for d in self.digits {
            total += d as u64 * scale;
            scale *= 10;
        }
        total
    }
}

/// Splits `100 <= p < 10⁶` into its low two digits and the digits above.
pub fn decimal_decompose(p: u64) -> Result<DecimalDecomposition> {
    if !(100..EXP_PRODUCT_LIMIT).contains(&p) {
        return Err(Error::invalid(format!(
            "decimal decomposition needs 100 <= P < {EXP_PRODUCT_LIMIT}, got {p}"
        )));
    }
    let mut rest = p / 100;
    let mut digits = [0u32; 4];
    for d in digits.iter_mut() {
        *d = (rest % 10) as u32;
        rest /= 10;
    }
    Ok(DecimalDecomposition {
        a1: (p % 100) as u32,
        digits,
    })
}

/// How the sum of `P_n` Logistics at one order is produced.
#[derive(Clone, Copy)]
enum Accumulant<'a> {
    Direct,
    Normal {
        threshold: u64,
    },
    ExpProduct {
        threshold: u64,
        tables: &'a LpedTableSet,
    },
}

impl Accumulant<'_> {
    fn draw(self, count: u64, source: &mut VariateSource) -> f64 {
        match self {
            Accumulant::Normal { threshold } if count >= threshold => {
                normal_replacement(count, source)
            }
            Accumulant::ExpProduct { threshold, tables } if count >= threshold => {
                match decimal_decompose(count) {
                    Ok(parts) => table_sum(&parts, tables, source),
                    Err(_) if count < 100 => source.logistic_sum(count),
                    Err(_) => normal_replacement(count, source),
                }
            }
            _ => source.logistic_sum(count),
        }
    }
}

/// `√(P/3) π Z`: same mean and variance as a sum of `P` Logistics.
fn normal_replacement(count: u64, source: &mut VariateSource) -> f64 {
    (count as f64 / 3.0).sqrt() * PI * source.normal()
}

/// `a1` Logistics plus, for each `ℓ = 2..5`, `a_ℓ` differences of independent
/// draws from `Φ_{10^ℓ}`; each difference has the law of a sum of `10^ℓ` Logistics.
fn table_sum(
    parts: &DecimalDecomposition,
    tables: &LpedTableSet,
    source: &mut VariateSource,
) -> f64 {
    let mut sum = source.logistic_sum(parts.a1 as u64);
    for (i, &digit) in parts.digits.iter().enumerate() {
        if digit == 0 {
            continue;
        }
        let table = tables
            .for_exponent(i as u32 + 2)
            .expect("table set holds P = 10^2..10^5");
        for _ in 0..digit {
            let u = table.sample(source);
            let v = table.sample(source);
            sum += u - v;
        }
    }
    sum
}

fn logistic_family(
    inc: &WienerIncrement,
    cfg: &MethodConfig,
    accumulant: Accumulant<'_>,
    source: &mut VariateSource,
) -> Result<LevyAreaSample> {
    cfg.validate()?;
    let start = source.uniforms_drawn();
    let a_sq = inc.a_sq();
    let mut sum = source.logistic();
    let mut weight = 1.0;
    let mut mean = 0.5 * a_sq;
    for _ in 0..=cfg.order {
        let count = source.poisson(mean)?;
        if count > 0 {
            sum += weight * accumulant.draw(count, source);
        }
        weight *= 0.5;
        mean *= 2.0;
    }
    let h = inc.h();
    let mut value = h / (2.0 * PI) * sum;
    if cfg.tail {
        let sd = (a_sq / (3.0 * 2f64.powi(cfg.order as i32 + 1))).sqrt() * 0.5 * h;
        value += sd * source.normal();
    }
    Ok(LevyAreaSample {
        value,
        uniforms_used: source.uniforms_drawn() - start,
    })
}

/// `(h/2π)(X + Σ_{n=0}^{N} 2^{-n} Σ_{k≤P_n} X_{n,k})` with Logistic `X`, `X_{n,k}` and
/// `P_n ~ Poisson(a² 2^{n-1})`. The tail Normal is `(a/√(3·2^{N+1}))(h/2) Z`.
pub fn logistic_sample(
    inc: &WienerIncrement,
    cfg: &MethodConfig,
    source: &mut VariateSource,
) -> Result<LevyAreaSample> {
    logistic_family(inc, cfg, Accumulant::Direct, source)
}

/// [`logistic_sample`] with every order whose count reaches `cfg.threshold` drawn as
/// one matched Normal.
pub fn logistic_normal_sample(
    inc: &WienerIncrement,
    cfg: &MethodConfig,
    source: &mut VariateSource,
) -> Result<LevyAreaSample> {
    let threshold = cfg.threshold;
    logistic_family(inc, cfg, Accumulant::Normal { threshold }, source)
}

/// [`logistic_sample`] with every order whose count reaches `cfg.threshold` drawn
/// from the LPED tables by decimal decomposition of the count.
pub fn exp_product_sample(
    inc: &WienerIncrement,
    cfg: &MethodConfig,
    source: &mut VariateSource,
) -> Result<LevyAreaSample> {
    cfg.validate()?;
    let tables = cfg.tables.as_deref().expect("validated");
    let threshold = cfg.threshold;
    logistic_family(
        inc,
        cfg,
        Accumulant::ExpProduct { threshold, tables },
        source,
    )
}

/// The part of the Logistic expansion carried by orders `first..first + count`,
/// without the leading Logistic: `(h/2π) Σ_n 2^{-n} Σ_{k≤P_n} X_{n,k}`.
///
/// Counts of 100 or more are drawn as matched Normals, since high orders have
/// astronomically many terms. Summing orders `N+1..N+40` emulates the exact
/// truncation error of [`logistic_sample`] at order `N`.
pub fn logistic_tail_emulation(
    inc: &WienerIncrement,
    first: u32,
    count: u32,
    source: &mut VariateSource,
) -> Result<f64> {
    let accumulant = Accumulant::Normal {
        threshold: DEFAULT_THRESHOLD,
    };
    let mut sum = 0.0;
    for n in first..first + count {
        let p = source.poisson(0.5 * inc.a_sq() * 2f64.powi(n as i32))?;
        if p > 0 {
            sum += 0.5f64.powi(n as i32) * accumulant.draw(p, source);
        }
    }
    Ok(inc.h() / (2.0 * PI) * sum)
}
