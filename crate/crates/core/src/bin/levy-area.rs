use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use levy_logistic::area::{Method, MethodConfig, DEFAULT_THRESHOLD};
use levy_logistic::bench::{
    density_grid, generate_samples, run_benchmark, write_bench_csv, write_density_csv,
    write_samples_csv, DensityEngine, IncrementMode,
};
use levy_logistic::lped::{
    table_file_name, write_table, EndpointMode, InverseCdfTable, LpedTableSet,
    DEFAULT_SERIES_TERMS, DESK_TABLE_POINTS,
};
use levy_logistic::{Error, Result};

/// Conditioned Lévy area sampling, LPED tables and benchmarks.
#[derive(Parser)]
#[command(name = "levy-area", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// LPED inverse-CDF tables.
    #[command(subcommand)]
    Tables(TablesCommand),
    /// Write area samples as CSV.
    Sample(SampleArgs),
    /// Sample variance against the true variance, one CSV row per (method, N).
    Bench(BenchArgs),
    /// Evaluate an LPED density engine on a grid.
    Density(DensityArgs),
}

#[derive(Subcommand)]
enum TablesCommand {
    /// Build one table file per P.
    Build(TablesBuildArgs),
}

#[derive(Args)]
struct TablesBuildArgs {
    /// Comma-separated values of P, each at least 100.
    #[arg(long = "P", value_delimiter = ',', default_values_t = [100u32, 1000, 10000, 100000])]
    p: Vec<u32>,
    /// Number of points M in each inverse table.
    #[arg(long, default_value_t = DESK_TABLE_POINTS, value_parser = clap::value_parser!(usize))]
    grid: usize,
    #[arg(long, default_value = "paper", value_parser = parse_endpoint_mode)]
    endpoint_mode: EndpointMode,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SamplerArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Truncation order.
    #[arg(long = "N", default_value_t = 8)]
    order: u32,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = clap::value_parser!(u64).range(1..))]
    threshold: u64,
    /// Add the Normal tail correction (default).
    #[arg(long, overrides_with = "no_tail")]
    tail: bool,
    #[arg(long = "no-tail", overrides_with = "tail")]
    no_tail: bool,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    h: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory holding the LPED tables (exp_product only).
    #[arg(long)]
    tables: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// `random` or `fixed:<dW1>,<dW2>`.
    #[arg(long, default_value = "random", value_parser = parse_increments)]
    increments: IncrementMode,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated methods.
    #[arg(long = "method", value_delimiter = ',', required = true, value_parser = parse_method)]
    methods: Vec<Method>,
    /// Orders as a list `6,8,10` or an inclusive range `6..14` or `6..14:2`.
    #[arg(long = "N", default_value = "8", value_parser = parse_orders)]
    orders: Orders,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = clap::value_parser!(u64).range(1..))]
    threshold: u64,
    #[arg(long, overrides_with = "no_tail")]
    tail: bool,
    #[arg(long = "no-tail", overrides_with = "tail")]
    no_tail: bool,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    h: f64,
    /// Samples per row.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(10_000..))]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent streams the samples are split over.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    shards: u32,
    #[arg(long)]
    tables: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long, value_parser = parse_engine)]
    engine: DensityEngine,
    #[arg(long = "P")]
    p: u32,
    #[arg(long, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Poles summed by the series engine.
    #[arg(long, default_value_t = DEFAULT_SERIES_TERMS)]
    terms: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Orders(Vec<u32>);

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_endpoint_mode(s: &str) -> std::result::Result<EndpointMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_increments(s: &str) -> std::result::Result<IncrementMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_engine(s: &str) -> std::result::Result<DensityEngine, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn parse_orders(s: &str) -> std::result::Result<Orders, String> {
    let bad = || format!("expected N as 6,8,10 or 6..14 or 6..14:2, got {s:?}");
    let orders = if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, step.parse::<u32>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        let lo: u32 = lo.parse().map_err(|_| bad())?;
        let hi: u32 = hi.parse().map_err(|_| bad())?;
        if step == 0 || lo > hi {
            return Err(bad());
        }
        (lo..=hi).step_by(step as usize).collect()
    } else {
        s.split(',')
            .map(|v| v.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<std::result::Result<Vec<_>, _>>()?
    };
    Ok(Orders(orders))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn finish(out: impl FnOnce() -> io::Result<()>, path: Option<&Path>) -> Result<()> {
    out().map_err(|e| io_error(path.unwrap_or(Path::new("<stdout>")), e))
}

fn load_tables(method: &[Method], dir: Option<&Path>) -> Result<Option<Arc<LpedTableSet>>> {
    if !method.contains(&Method::ExpProduct) {
        return Ok(None);
    }
    let dir = dir.ok_or_else(|| {
        Error::Config("exp_product needs --tables <dir> (see `levy-area tables build`)".into())
    })?;
    Ok(Some(Arc::new(LpedTableSet::load_dir(dir)?)))
}

fn config(
    method: Method,
    order: u32,
    threshold: u64,
    tail: bool,
    tables: &Option<Arc<LpedTableSet>>,
) -> MethodConfig {
    let mut cfg = MethodConfig::new(method)
        .with_order(order)
        .with_threshold(threshold)
        .with_tail(tail);
    if let Some(t) = tables {
        cfg = cfg.with_tables(t.clone());
    }
    cfg
}

fn tables_build(args: TablesBuildArgs) -> Result<()> {
    if args.grid < 2 {
        return Err(Error::InvalidArgument("--grid must be at least 2".into()));
    }
    std::fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    for p in args.p {
        let table = InverseCdfTable::build(p, args.grid, args.endpoint_mode)?;
        let path = args.out.join(table_file_name(p));
        write_table(&table, &path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn sample(args: SampleArgs) -> Result<()> {
    let s = args.sampler;
    let tables = load_tables(&[s.method], s.tables.as_deref())?;
    let cfg = config(s.method, s.order, s.threshold, !s.no_tail, &tables);
    let rows = generate_samples(&cfg, s.h, args.count, s.seed, args.increments)?;
    let mut out = open_output(args.out.as_deref())?;
    finish(
        || {
            write_samples_csv(&rows, &mut out)?;
            out.flush()
        },
        args.out.as_deref(),
    )
}

fn bench(args: BenchArgs) -> Result<()> {
    let tables = load_tables(&args.methods, args.tables.as_deref())?;
    let mut rows = Vec::new();
    for &method in &args.methods {
        for &order in &args.orders.0 {
            let cfg = config(method, order, args.threshold, !args.no_tail, &tables);
            let row = run_benchmark(&cfg, args.h, args.count, args.seed, args.shards)?;
            eprintln!(
                "{method} N={order}: variance {:.6} (± {:.1e}), abs error {:.2e}, {:.1} uniforms/sample",
                row.sample_variance,
                row.variance_stderr,
                row.abs_error,
                row.uniforms_per_sample()
            );
            rows.push(row);
        }
    }
    let mut out = open_output(args.out.as_deref())?;
    finish(
        || {
            write_bench_csv(&rows, &mut out)?;
            out.flush()
        },
        args.out.as_deref(),
    )
}

fn density(args: DensityArgs) -> Result<()> {
    let rows = density_grid(
        args.engine,
        args.p,
        args.x_min,
        args.x_max,
        args.points,
        args.terms,
    )?;
    let mut out = open_output(args.out.as_deref())?;
    finish(
        || {
            write_density_csv(&rows, &mut out)?;
            out.flush()
        },
        args.out.as_deref(),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tables(TablesCommand::Build(args)) => tables_build(args),
        Command::Sample(args) => sample(args),
        Command::Bench(args) => bench(args),
        Command::Density(args) => density(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
