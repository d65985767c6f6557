//! Sample generation and the variance-versus-effort benchmark behind the CLI.
//!
//! All CSV output uses a header row, commas, and floats printed as the shortest
//! decimal that round-trips.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;

use crate::area::{
    conditional_variance, sample_area, sample_increments, MethodConfig, WienerIncrement,
};
use crate::distributions::VariateSource;
use crate::lped::{density_asymptotic, density_large_x, density_series};
use crate::oracles::MomentAccumulator;
use crate::{Error, Result};

/// Mean of `a²` under random increments.
const MEAN_A_SQ: f64 = 2.0;

pub const SAMPLE_CSV_HEADER: &str = "dW1,dW2,a_sq,area,uniforms";
pub const BENCH_CSV_HEADER: &str = "method,N,threshold,tail,h,L,seed,shards,sample_variance,\
variance_stderr,true_variance,abs_error,cpu_seconds,uniform_draws_total";
pub const DENSITY_CSV_HEADER: &str = "x,density";

/// Where the Wiener increments of each sample come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncrementMode {
    Random,
    Fixed { dw1: f64, dw2: f64 },
}

impl FromStr for IncrementMode {
    type Err = Error;

    /// `random` or `fixed:<dW1>,<dW2>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "random" {
            return Ok(IncrementMode::Random);
        }
        let bad = || {
            Error::invalid(format!(
                "increments must be random or fixed:<dW1>,<dW2>, got {s:?}"
            ))
        };
        let rest = s.strip_prefix("fixed:").ok_or_else(bad)?;
        let (a, b) = rest.split_once(',').ok_or_else(bad)?;
        let dw1: f64 = a.trim().parse().map_err(|_| bad())?;
        let dw2: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(dw1.is_finite() && dw2.is_finite()) {
            return Err(bad());
        }
        Ok(IncrementMode::Fixed { dw1, dw2 })
    }
}

impl fmt::Display for IncrementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IncrementMode::Random => f.write_str("random"),
            IncrementMode::Fixed { dw1, dw2 } => write!(f, "fixed:{dw1:?},{dw2:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRow {
    pub increment: WienerIncrement,
    pub area: f64,
    pub uniforms: u64,
}

/// `count` samples from stream 0 of `seed`. With random increments each sample
/// draws its two Normals first, then the area.
pub fn generate_samples(
    cfg: &MethodConfig,
    h: f64,
    count: usize,
    seed: u64,
    increments: IncrementMode,
) -> Result<Vec<SampleRow>> {
    cfg.validate()?;
    let mut source = VariateSource::new(seed, 0);
    let fixed = match increments {
        IncrementMode::Fixed { dw1, dw2 } => Some(WienerIncrement::new(h, dw1, dw2)?),
        IncrementMode::Random => {
            WienerIncrement::new(h, 0.0, 0.0)?;
            None
        }
    };
    (0..count)
        .map(|_| {
            let increment = match fixed {
                Some(inc) => inc,
                None => sample_increments(h, &mut source)?,
            };
            let s = sample_area(&increment, cfg, &mut source)?;
            Ok(SampleRow {
                increment,
                area: s.value,
                uniforms: s.uniforms_used,
            })
        })
        .collect()
}

pub fn write_samples_csv(rows: &[SampleRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{SAMPLE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{:?},{:?},{:?},{:?},{}",
            r.increment.dw1(),
            r.increment.dw2(),
            r.increment.a_sq(),
            r.area,
            r.uniforms
        )?;
    }
    Ok(())
}

/// One benchmark configuration and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub method: String,
    pub order: u32,
    pub threshold: u64,
    pub tail: bool,
    pub h: f64,
    pub count: u64,
    pub seed: u64,
    pub shards: u32,
    pub sample_variance: f64,
    pub variance_stderr: f64,
    pub true_variance: f64,
    pub abs_error: f64,
    pub cpu_seconds: f64,
    /// Uniforms consumed by the area sampler, excluding the increments.
    pub uniform_draws_total: u64,
}

impl BenchmarkRow {
    /// `|sample_variance - true_variance|` from the stored fields.
    pub fn recomputed_abs_error(&self) -> f64 {
        (self.sample_variance - self.true_variance).abs()
    }

    pub fn uniforms_per_sample(&self) -> f64 {
        self.uniform_draws_total as f64 / self.count as f64
    }
}

struct ShardResult {
    moments: MomentAccumulator,
    uniforms: u64,
    cpu: Duration,
}

fn thread_cpu_time() -> Duration {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    // SAFETY: clock_gettime only writes to the timespec we pass
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return Duration::ZERO;
    }
    Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32)
}

fn run_shard(cfg: &MethodConfig, h: f64, count: u64, seed: u64, shard: u32) -> Result<ShardResult> {
    let mut source = VariateSource::new(seed, shard);
    let mut moments = MomentAccumulator::new();
    let mut uniforms = 0;
    let start = thread_cpu_time();
    for _ in 0..count {
        let inc = sample_increments(h, &mut source)?;
        let s = sample_area(&inc, cfg, &mut source)?;
        moments.push(s.value);
        uniforms += s.uniforms_used;
    }
    Ok(ShardResult {
        moments,
        uniforms,
        cpu: thread_cpu_time().saturating_sub(start),
    })
}

/// `count` samples with random increments at step `h`, split over `shards`
/// streams of `seed` (shard `i` uses stream `i`). Shards run in parallel and are
/// merged in index order, so the row depends only on its inputs.
pub fn run_benchmark(
    cfg: &MethodConfig,
    h: f64,
    count: u64,
    seed: u64,
    shards: u32,
) -> Result<BenchmarkRow> {
    cfg.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("step h must be positive, got {h}")));
    }
    if count < 2 {
        return Err(Error::invalid("benchmark needs at least 2 samples"));
    }
    if shards == 0 || shards as u64 > count {
        return Err(Error::invalid(format!(
            "shards must be in 1..={count}, got {shards}"
        )));
    }
    let base = count / shards as u64;
    let extra = count % shards as u64;
    let results = (0..shards)
        .into_par_iter()
        .map(|i| {
            let n = base + u64::from((i as u64) < extra);
            run_shard(cfg, h, n, seed, i)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut moments = MomentAccumulator::new();
    let mut uniforms = 0;
    let mut cpu = Duration::ZERO;
    for r in &results {
        moments.merge(&r.moments);
        uniforms += r.uniforms;
        cpu += r.cpu;
    }
    let estimate = moments.estimate()?;
    let true_variance = conditional_variance(MEAN_A_SQ, h);
    Ok(BenchmarkRow {
        method: cfg.method.to_string(),
        order: cfg.order,
        threshold: cfg.threshold,
        tail: cfg.tail,
        h,
        count,
        seed,
        shards,
        sample_variance: estimate.variance,
        variance_stderr: estimate.stderr,
        true_variance,
        abs_error: (estimate.variance - true_variance).abs(),
        cpu_seconds: cpu.as_secs_f64(),
        uniform_draws_total: uniforms,
    })
}

pub fn write_bench_csv(rows: &[BenchmarkRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{BENCH_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:?},{},{},{},{:?},{:?},{:?},{:?},{:?},{}",
            r.method,
            r.order,
            r.threshold,
            r.tail,
            r.h,
            r.count,
            r.seed,
            r.shards,
            r.sample_variance,
            r.variance_stderr,
            r.true_variance,
            r.abs_error,
            r.cpu_seconds,
            r.uniform_draws_total
        )?;
    }
    Ok(())
}

/// Density engines for LPED evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityEngine {
    Asymptotic,
    Series,
    LargeX,
}

impl FromStr for DensityEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymptotic" => Ok(DensityEngine::Asymptotic),
            "series" => Ok(DensityEngine::Series),
            "large_x" => Ok(DensityEngine::LargeX),
            other => Err(Error::invalid(format!(
                "engine must be asymptotic, series or large_x, got {other:?}"
            ))),
        }
    }
}

/// `(x, φ_P(x))` on `points` evenly spaced nodes of `[x_min, x_max]`.
pub fn density_grid(
    engine: DensityEngine,
    p: u32,
    x_min: f64,
    x_max: f64,
    points: usize,
    series_terms: usize,
) -> Result<Vec<(f64, f64)>> {
    if points < 2 || !(x_min < x_max) {
        return Err(Error::invalid(format!(
            "density grid needs x_min < x_max and at least 2 points, got [{x_min}, {x_max}] with {points}"
        )));
    }
    let step = (x_max - x_min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let x = if i + 1 == points {
                x_max
            } else {
                x_min + step * i as f64
            };
            let y = match engine {
                DensityEngine::Asymptotic => density_asymptotic(p, x)?,
                DensityEngine::Series => density_series(p, x, series_terms)?,
                DensityEngine::LargeX => density_large_x(p, x),
            };
            Ok((x, y))
        })
        .collect()
}

pub fn write_density_csv(rows: &[(f64, f64)], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{DENSITY_CSV_HEADER}")?;
    for (x, y) in rows {
        writeln!(out, "{x:?},{y:?}")?;
    }
    Ok(())
}
