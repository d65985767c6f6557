use crate::{Error, Result};

/// One-pass accumulator of the first four central moments. Two accumulators over
/// disjoint data merge into the accumulator of the union.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

/// Sample mean, unbiased variance and the standard error of that variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term1;
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        self.count += other.count;
        self.mean += delta * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased (divisor `L - 1`).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count as f64 - 1.0)
    }

    pub fn skewness(&self) -> f64 {
        let n = self.count as f64;
        (self.m3 / n) / (self.m2 / n).powf(1.5)
    }

    /// `sqrt((μ₄ - σ⁴ (L-3)/(L-1)) / L)` with plug-in central moments.
    pub fn variance_stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        let n = self.count as f64;
        let mu4 = self.m4 / n;
        let s2 = self.m2 / n;
        ((mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n)
            .max(0.0)
            .sqrt()
    }

    pub fn estimate(&self) -> Result<VarianceEstimate> {
        if self.count < 2 {
            return Err(Error::invalid(format!(
                "variance needs at least 2 values, got {}",
                self.count
            )));
        }
        Ok(VarianceEstimate {
            mean: self.mean,
            variance: self.variance(),
            stderr: self.variance_stderr(),
        })
    }
}

impl Extend<f64> for MomentAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl FromIterator<f64> for MomentAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

pub fn mc_variance(values: &[f64]) -> Result<VarianceEstimate> {
    values
        .iter()
        .copied()
        .collect::<MomentAccumulator>()
        .estimate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::VariateSource;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(mc_variance(&[3.0; 10]).unwrap().variance, 0.0);
        let e = mc_variance(&[-1.0, 1.0]).unwrap();
        assert_eq!((e.mean, e.variance), (0.0, 2.0));
        assert!(mc_variance(&[1.0]).is_err());
    }

    #[test]
    fn normal_variance_within_three_stderr() {
        let mut src = VariateSource::new(21, 0);
        let acc: MomentAccumulator = (0..1_000_000).map(|_| src.normal()).collect();
        let e = acc.estimate().unwrap();
        assert!((e.variance - 1.0).abs() < 3.0 * e.stderr, "{e:?}");
        // Var(s²) = 2σ⁴/(L-1) for Normal data
        assert!((e.stderr / (2.0 / 1e6f64).sqrt() - 1.0).abs() < 0.02);
    }

    proptest! {
        #[test]
        fn merge_matches_single_pass(
            a in prop::collection::vec(-100.0f64..100.0, 0..200),
            b in prop::collection::vec(-100.0f64..100.0, 0..200),
        ) {
            let mut left: MomentAccumulator = a.iter().copied().collect();
            let right: MomentAccumulator = b.iter().copied().collect();
            left.merge(&right);
            let all: MomentAccumulator = a.iter().chain(&b).copied().collect();
            prop_assert_eq!(left.count(), all.count());
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs()));
            prop_assert!(close(left.mean, all.mean));
            prop_assert!(close(left.m2, all.m2));
            prop_assert!(close(left.m3, all.m3) || (left.m3 - all.m3).abs() < 1e-6 * all.m2.powf(1.5));
            prop_assert!(close(left.m4, all.m4));
        }

        #[test]
        fn two_pass_agreement(v in prop::collection::vec(-10.0f64..10.0, 2..300)) {
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let e = mc_variance(&v).unwrap();
            prop_assert!((e.variance - var).abs() <= 1e-10 * (1.0 + var));
        }
    }
}
