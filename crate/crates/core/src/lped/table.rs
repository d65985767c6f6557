use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::density::density_asymptotic;
use super::io::{read_table, table_file_name, write_table};
use super::{lped_mean, lped_variance};
use crate::distributions::VariateSource;
use crate::{Error, Result};

/// Inverse-table size used by tests and quick runs.
pub const DESK_TABLE_POINTS: usize = 100_001;
/// Inverse-table size for full-fidelity runs.
pub const FULL_TABLE_POINTS: usize = 1_000_001;
/// Tables are built for `P = 10^ℓ` with these `ℓ`.
pub const TABLE_EXPONENTS: [u32; 4] = [2, 3, 4, 5];

const WINDOW_SDS: f64 = 12.0;
const STEPS_PER_SD: f64 = 2000.0;
const MIN_TABLE_P: u32 = 100;
const EDGE_MASS: f64 = 1e-6;

/// Quadrature window and inverse-table size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpedGridConfig {
    x_min: f64,
    x_max: f64,
    step: f64,
    panels: usize,
    grid_points: usize,
}

impl LpedGridConfig {
    /// `step` must split `[x_min, x_max]` into a whole number of panels.
    pub fn new(x_min: f64, x_max: f64, step: f64, grid_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::invalid(format!("bad window [{x_min}, {x_max}]")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid(format!("step must be positive, got {step}")));
        }
        let width = x_max - x_min;
        let panels = (width / step).round();
        if panels < 1.0 || (panels * step - width).abs() > 1e-9 * width {
            return Err(Error::invalid(format!(
                "step {step} does not divide [{x_min}, {x_max}] into whole panels"
            )));
        }
        if grid_points < 2 {
            return Err(Error::invalid("inverse table needs at least 2 points"));
        }
        Ok(Self {
            x_min,
            x_max,
            step: width / panels,
            panels: panels as usize,
            grid_points,
        })
    }

    /// Mean ± 12 standard deviations with 2000 panels per standard deviation.
    pub fn default_for(p: u32, grid_points: usize) -> Result<Self> {
        let mean = lped_mean(p);
        let sd = lped_variance(p).sqrt();
        let half = WINDOW_SDS * sd;
        let step = sd / STEPS_PER_SD;
        Self::new(mean - half, mean + half, step, grid_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    pub fn with_grid_points(self, grid_points: usize) -> Result<Self> {
        Self::new(self.x_min, self.x_max, self.step, grid_points)
    }
}

/// Trapezium-rule CDFs on a uniform grid, accumulated from the left edge and from
/// the right edge respectively.
#[derive(Debug, Clone)]
pub struct LpedCdf {
    p: u32,
    x_min: f64,
    step: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl LpedCdf {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.step * i as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    /// `Φ_left` interpolated linearly between nodes, 0 and 1 outside the window.
    pub fn left_at(&self, x: f64) -> f64 {
        let t = (x - self.x_min) / self.step;
        if t <= 0.0 {
            return 0.0;
        }
        let last = self.left.len() - 1;
        if t >= last as f64 {
            return self.left[last];
        }
        let i = t.floor() as usize;
        let frac = t - i as f64;
        self.left[i] + frac * (self.left[i + 1] - self.left[i])
    }
}

/// Integrates the saddle-point density over the grid window.
pub fn build_cdf(p: u32, grid: &LpedGridConfig) -> Result<LpedCdf> {
    if p < MIN_TABLE_P {
        return Err(Error::invalid(format!(
            "CDF tables need P >= {MIN_TABLE_P}, got {p}"
        )));
    }
    let n = grid.panels + 1;
    let density = (0..n)
        .map(|i| density_asymptotic(p, grid.x_min + grid.step * i as f64))
        .collect::<Result<Vec<_>>>()?;
    let sd = lped_variance(p).sqrt();
    for (x, f) in [(grid.x_min, density[0]), (grid.x_max, density[n - 1])] {
        if f * sd > EDGE_MASS {
            return Err(Error::invalid(format!(
                "window [{}, {}] too narrow for P={p}: density {f:e} at x={x}",
                grid.x_min, grid.x_max
            )));
        }
    }

    let half_step = 0.5 * grid.step;
    let mut left = Vec::with_capacity(n);
    let mut acc = 0.0;
    left.push(0.0);
    for i in 1..n {
        acc += half_step * (density[i - 1] + density[i]);
        left.push(acc.min(1.0));
    }
    let mut right = vec![1.0; n];
    let mut acc = 0.0;
    for i in (0..n - 1).rev() {
        acc += half_step * (density[i] + density[i + 1]);
        right[i] = (1.0 - acc).max(0.0);
    }
    Ok(LpedCdf {
        p,
        x_min: grid.x_min,
        step: grid.step,
        left,
        right,
    })
}

/// Convention for the last table entry `Φ_P^{-1}(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EndpointMode {
    /// `10` for `P < 1000`, `1` otherwise.
    #[default]
    Paper,
    /// Linear extrapolation of the last two interior entries.
    Extrapolated,
}

impl EndpointMode {
    fn right_endpoint(self, p: u32, values: &[f64]) -> f64 {
        let m = values.len();
        match self {
            EndpointMode::Paper if p < 1000 => 10.0,
            EndpointMode::Paper => 1.0,
            EndpointMode::Extrapolated if m >= 3 => 2.0 * values[m - 2] - values[m - 3],
            EndpointMode::Extrapolated => values[m - 1],
        }
    }
}

impl fmt::Display for EndpointMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndpointMode::Paper => "paper",
            EndpointMode::Extrapolated => "extrapolated",
        })
    }
}

impl FromStr for EndpointMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(EndpointMode::Paper),
            "extrapolated" => Ok(EndpointMode::Extrapolated),
            other => Err(Error::invalid(format!("unknown endpoint mode {other:?}"))),
        }
    }
}

/// Uses `Φ_left` below the first node where it reaches ½ and `Φ_right` from there
/// on, then inverts onto `u_m = m/(M-1)`.
pub fn splice_and_invert(
    cdf: &LpedCdf,
    grid_points: usize,
    endpoint_mode: EndpointMode,
) -> Result<InverseCdfTable> {
    if grid_points < 2 {
        return Err(Error::invalid("inverse table needs at least 2 points"));
    }
    let n = cdf.len();
    let split = cdf.left.iter().position(|&v| v >= 0.5).unwrap_or(n);
    let spliced: Vec<f64> = (0..n)
        .map(|j| if j < split { cdf.left[j] } else { cdf.right[j] })
        .collect();
    if let Some(j) = (1..n).find(|&j| spliced[j] < spliced[j - 1]) {
        return Err(Error::numeric(format!(
            "spliced CDF for P={} decreases at x={}",
            cdf.p,
            cdf.x(j)
        )));
    }

    let last = (grid_points - 1) as f64;
    let mut values = Vec::with_capacity(grid_points);
    let mut j = 0;
    for m in 0..grid_points {
        let u = m as f64 / last;
        while j < n && spliced[j] < u {
            j += 1;
        }
        let v = if j == 0 {
            cdf.x(0)
        } else if j == n {
            cdf.x(n - 1)
        } else {
            let (lo, hi) = (spliced[j - 1], spliced[j]);
            cdf.x(j - 1) + (u - lo) / (hi - lo) * cdf.step
        };
        values.push(v);
    }
    let end = endpoint_mode.right_endpoint(cdf.p, &values);
    values[grid_points - 1] = end;
    InverseCdfTable::new(cdf.p, values, endpoint_mode)
}

/// Quantiles `v_m ≈ Φ_P^{-1}(m/(M-1))`, nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseCdfTable {
    p: u32,
    values: Vec<f64>,
    endpoint_mode: EndpointMode,
}

impl InverseCdfTable {
    pub fn new(p: u32, values: Vec<f64>, endpoint_mode: EndpointMode) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("table P must be positive"));
        }
        if values.len() < 2 {
            return Err(Error::invalid("inverse table needs at least 2 points"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite table value {v}")));
        }
        if let Some(m) = (1..values.len()).find(|&m| values[m] < values[m - 1]) {
            return Err(Error::invalid(format!(
                "table values decrease at index {m}"
            )));
        }
        Ok(Self {
            p,
            values,
            endpoint_mode,
        })
    }

    /// Builds the table from the default window for `P`.
    pub fn build(p: u32, grid_points: usize, endpoint_mode: EndpointMode) -> Result<Self> {
        let grid = LpedGridConfig::default_for(p, grid_points)?;
        splice_and_invert(&build_cdf(p, &grid)?, grid_points, endpoint_mode)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn grid_points(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn endpoint_mode(&self) -> EndpointMode {
        self.endpoint_mode
    }

    /// Piecewise-linear quantile; `u` is clamped to `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let last = self.values.len() - 1;
        let t = u.clamp(0.0, 1.0) * last as f64;
        let i = (t.floor() as usize).min(last - 1);
        let frac = t - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// One draw from `φ_P`, using exactly one uniform.
    pub fn sample(&self, source: &mut VariateSource) -> f64 {
        self.quantile(source.uniform())
    }
}

/// Tables for `P = 10^2, ..., 10^5`, shared read-only by the samplers.
#[derive(Debug, Clone)]
pub struct LpedTableSet {
    tables: Vec<InverseCdfTable>,
}

impl LpedTableSet {
    pub fn build(grid_points: usize, endpoint_mode: EndpointMode) -> Result<Self> {
        let tables = TABLE_EXPONENTS
            .iter()
            .map(|&l| InverseCdfTable::build(10u32.pow(l), grid_points, endpoint_mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tables })
    }

    /// Expects one table per `P = 10^ℓ`, in order.
    pub fn from_tables(tables: Vec<InverseCdfTable>) -> Result<Self> {
        let ps: Vec<u32> = tables.iter().map(|t| t.p).collect();
        let want: Vec<u32> = TABLE_EXPONENTS.iter().map(|&l| 10u32.pow(l)).collect();
        if ps != want {
            return Err(Error::invalid(format!(
                "table set needs P = {want:?}, got {ps:?}"
            )));
        }
        Ok(Self { tables })
    }

    /// Table for `P = 10^ℓ`, `ℓ` in 2..=5.
    pub fn for_exponent(&self, l: u32) -> Option<&InverseCdfTable> {
        let first = TABLE_EXPONENTS[0];
        l.checked_sub(first)
            .and_then(|i| self.tables.get(i as usize))
    }

    pub fn tables(&self) -> &[InverseCdfTable] {
        &self.tables
    }

    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for table in &self.tables {
            write_table(table, &dir.join(table_file_name(table.p)))?;
        }
        Ok(())
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        let tables = TABLE_EXPONENTS
            .iter()
            .map(|&l| read_table(&dir.join(table_file_name(10u32.pow(l)))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_tables(tables)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::EULER_GAMMA;
    use std::sync::OnceLock;

    fn p100() -> &'static (LpedCdf, InverseCdfTable) {
        static CELL: OnceLock<(LpedCdf, InverseCdfTable)> = OnceLock::new();
        CELL.get_or_init(|| {
            let grid = LpedGridConfig::default_for(100, DESK_TABLE_POINTS).unwrap();
            let cdf = build_cdf(100, &grid).unwrap();
            let table = splice_and_invert(&cdf, DESK_TABLE_POINTS, EndpointMode::Paper).unwrap();
            (cdf, table)
        })
    }

    #[test]
    fn default_grid() {
        let g = LpedGridConfig::default_for(100, DESK_TABLE_POINTS).unwrap();
        assert_eq!(g.panels(), 48_000);
        assert!((g.x_min() + 100.0 * EULER_GAMMA + 12.0 * lped_variance(100).sqrt()).abs() < 1e-9);
        assert!(LpedGridConfig::new(0.0, 1.0, 0.3, 10).is_err());
        assert!(LpedGridConfig::new(1.0, 0.0, 0.1, 10).is_err());
        assert!(LpedGridConfig::new(0.0, 1.0, 0.25, 1).is_err());
    }

    #[test]
    fn cdf_edges_and_agreement() {
        let (cdf, _) = p100();
        assert_eq!(cdf.left()[0], 0.0);
        assert_eq!(*cdf.right().last().unwrap(), 1.0);
        let gap = cdf
            .left()
            .iter()
            .zip(cdf.right())
            .map(|(l, r)| (l - r).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-3, "gap={gap:e}");
        let at_mean = cdf.left_at(-100.0 * EULER_GAMMA);
        assert!((at_mean - 0.5).abs() < 0.02, "{at_mean}");
    }

    #[test]
    fn narrow_window_is_rejected() {
        let g = LpedGridConfig::new(-80.0, -40.0, 0.01, 100).unwrap();
        assert!(matches!(build_cdf(100, &g), Err(Error::InvalidArgument(_))));
        let g = LpedGridConfig::default_for(10, 100).unwrap();
        assert!(matches!(build_cdf(10, &g), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn table_shape() {
        let (_, table) = p100();
        assert_eq!(table.grid_points(), DESK_TABLE_POINTS);
        assert!(table.values().windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*table.values().last().unwrap(), 10.0);
        assert_eq!(
            table.values()[0],
            LpedGridConfig::default_for(100, 2).unwrap().x_min()
        );
    }

    #[test]
    fn quantile_round_trip() {
        let (cdf, table) = p100();
        for i in 1..=99 {
            let u = i as f64 / 100.0;
            let back = cdf.left_at(table.quantile(u));
            assert!((back - u).abs() < 2e-3, "u={u}: {back}");
        }
    }

    #[test]
    fn median_sits_right_of_mean() {
        // φ_P is skewed left, so the median exceeds the mean by about 0.244 at P = 100
        // (independent Monte Carlo estimate of the median: -57.478 ± 0.02).
        let (_, table) = p100();
        let median = table.quantile(0.5);
        assert!((median + 57.478).abs() < 0.05, "median={median}");
        assert!(median > -100.0 * EULER_GAMMA);
    }

    #[test]
    fn sampling_moments() {
        let (_, table) = p100();
        let mut src = VariateSource::new(11, 0);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let v = table.sample(&mut src);
            sum += v;
            sum2 += v * v;
        }
        assert_eq!(src.uniforms_drawn(), n as u64);
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!((mean + 100.0 * EULER_GAMMA).abs() < 0.5, "mean={mean}");
        assert!((var / lped_variance(100) - 1.0).abs() < 0.02, "var={var}");
    }

    #[test]
    fn knots_and_left_end() {
        let (_, table) = p100();
        let last = (table.grid_points() - 1) as f64;
        for m in [0usize, 1, 17, 50_000, 99_999] {
            assert_eq!(table.quantile(m as f64 / last), table.values()[m]);
        }
        assert_eq!(table.quantile(f64::MIN_POSITIVE), table.values()[0]);
    }

    #[test]
    fn endpoint_modes() {
        let grid = LpedGridConfig::default_for(1000, 1001).unwrap();
        let cdf = build_cdf(1000, &grid).unwrap();
        let paper = splice_and_invert(&cdf, 1001, EndpointMode::Paper).unwrap();
        assert_eq!(*paper.values().last().unwrap(), 1.0);
        let ext = splice_and_invert(&cdf, 1001, EndpointMode::Extrapolated).unwrap();
        let v = ext.values();
        assert_eq!(v[1000], 2.0 * v[999] - v[998]);
        assert_eq!(v[0], paper.values()[0]);
        assert_eq!(
            "extrapolated".parse::<EndpointMode>().unwrap(),
            EndpointMode::Extrapolated
        );
        assert_eq!(EndpointMode::Paper.to_string(), "paper");
        assert!("other".parse::<EndpointMode>().is_err());
    }

    #[test]
    fn difference_of_draws_is_symmetric() {
        let (_, table) = p100();
        let mut src = VariateSource::new(5, 0);
        let n = 1_000_000;
        let d: Vec<f64> = (0..n)
            .map(|_| table.sample(&mut src) - table.sample(&mut src))
            .collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let m2 = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let m3 = d.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n as f64;
        let skew = m3 / m2.powf(1.5);
        assert!(skew.abs() < 0.01, "skew={skew}");
    }

    #[test]
    fn rejects_decreasing_values() {
        assert!(InverseCdfTable::new(100, vec![0.0, -1.0], EndpointMode::Paper).is_err());
        assert!(InverseCdfTable::new(100, vec![0.0], EndpointMode::Paper).is_err());
    }
}
