use crate::{Error, Result};

/// Smallest sample accepted by the KS statistics.
pub const MIN_KS_SAMPLE: usize = 100;

/// A finite sample, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    sorted: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("sample contains {v}")));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Right-continuous empirical CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    fn check_size(&self) -> Result<()> {
        if self.sorted.len() < MIN_KS_SAMPLE {
            return Err(Error::invalid(format!(
                "KS statistic needs at least {MIN_KS_SAMPLE} values, got {}",
                self.sorted.len()
            )));
        }
        Ok(())
    }
}

/// `sup_x |F_n(x) - F(x)|` against a continuous CDF.
pub fn ks_statistic(sample: &EmpiricalSample, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    sample.check_size()?;
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// `sup_x |F_a(x) - F_b(x)|` between two empirical CDFs, evaluated at every
/// distinct value after all copies of it have been counted.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<f64> {
    a.check_size()?;
    b.check_size()?;
    let (xa, xb) = (&a.sorted, &b.sorted);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() || j < xb.len() {
        let x = match (xa.get(i), xb.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}
