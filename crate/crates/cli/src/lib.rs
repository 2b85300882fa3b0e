//! Command-line front end: single bounds, the benchmark tables, density grids,
//! the Jackson overlay and the error constants, all written as CSV.

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use boxbound::{
    degree_split, density_eval_grid, error_constants, gaussian_overlay, jackson_bound, lookup, schmudgen_bound,
    sos_lebesgue_bound, BoundError, TestFunction,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "boxbound",
    version,
    about = "Upper bounds for polynomial minimization over [-1,1]^n"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one bound and print a CSV row.
    Bound(BoundArgs),
    /// Schmüdgen-type bounds for every catalog function, r = 6, 8, ..., r-max.
    Table1(TableArgs),
    /// Schmüdgen-type against Lebesgue SOS bounds for the bivariate functions.
    Table2(TableArgs),
    /// Evaluate the optimal density on a grid over the box.
    Density(DensityArgs),
    /// Compare the univariate Jackson density with its Gaussian approximation.
    Overlay(OverlayArgs),
    /// Error constants of every catalog function.
    Constants(OutArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Schmudgen,
    SosLebesgue,
    Jackson,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Schmudgen => "schmudgen",
            Method::SosLebesgue => "sos-lebesgue",
            Method::Jackson => "jackson",
        }
    }
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub r: u32,
    #[arg(long, value_enum, default_value_t = Method::Schmudgen)]
    pub method: Method,
    /// Center of the Jackson density; defaults to the first known minimizer.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x_star: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Largest r; defaults to the full table.
    #[arg(long)]
    pub r_max: Option<u32>,
    /// Raw CSV path; a 4-decimal copy is written next to it as `<stem>.pretty.csv`.
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub r: u32,
    #[arg(long, value_enum, default_value_t = Method::Schmudgen)]
    pub method: Method,
    /// Points per coordinate.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct OverlayArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x_star: f64,
    #[arg(long)]
    pub r: u32,
    /// Number of evaluation points, evenly spaced strictly inside (-1, 1).
    #[arg(long, default_value_t = 199)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Bound(BoundError),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Bound(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Bound(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Bound(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        CliError::Bound(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Full-precision formatting used in every raw CSV.
pub fn raw(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn pretty(v: f64) -> String {
    format!("{v:.4}")
}

fn opt(v: Option<f64>, fmt: fn(f64) -> String) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Worker pool sized by `BOXBOUND_THREADS`, or all cores.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("BOXBOUND_THREADS") {
        let t: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Usage(format!("BOXBOUND_THREADS must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(t);
    }
    builder.build().map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub function: String,
    pub n: usize,
    pub r: u32,
    pub method: Method,
    pub value: f64,
    /// Winning subset for the Schmüdgen-type bound, empty otherwise.
    pub winner: String,
    pub wall_ms: u128,
}

/// Computes one bound for a catalog function.
pub fn compute_bound(tf: &TestFunction, r: u32, method: Method, x_star: Option<&[f64]>) -> CliResult<BoundRow> {
    let start = Instant::now();
    let (value, winner) = match method {
        Method::Schmudgen => {
            let res = schmudgen_bound(&tf.cheb, r)?;
            (res.value, res.winner.to_string())
        }
        Method::SosLebesgue => (sos_lebesgue_bound(&tf.cheb, r)?.value, String::new()),
        Method::Jackson => {
            let x = x_star.unwrap_or(&tf.minimizers[0]);
            let degrees = degree_split(r, tf.n)?;
            (jackson_bound(&tf.cheb, x, &degrees)?, String::new())
        }
    };
    Ok(BoundRow {
        function: tf.name.to_string(),
        n: tf.n,
        r,
        method,
        value,
        winner,
        wall_ms: start.elapsed().as_millis(),
    })
}

fn open_out(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn pretty_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.pretty.csv"))
}

fn write_rows(out: Box<dyn Write>, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the raw table, and its 4-decimal twin when writing to a file.
fn write_table(
    path: Option<&Path>,
    header: &[&str],
    raw_rows: &[Vec<String>],
    pretty_rows: &[Vec<String>],
) -> CliResult<()> {
    write_rows(open_out(path)?, header, raw_rows)?;
    if let Some(p) = path {
        write_rows(open_out(Some(&pretty_path(p)))?, header, pretty_rows)?;
    }
    Ok(())
}

/// Column order of the first table.
pub const TABLE1_COLUMNS: [(&str, usize); 8] = [
    ("booth", 2),
    ("matyas", 2),
    ("motzkin", 2),
    ("three-hump", 2),
    ("styblinski-tang", 2),
    ("styblinski-tang", 3),
    ("rosenbrock", 2),
    ("rosenbrock", 3),
];

/// Range of r for which the trivariate columns are filled.
pub const TABLE1_N3_RANGE: (u32, u32) = (8, 24);

pub const TABLE1_R_MAX: u32 = 48;
pub const TABLE2_R_MAX: u32 = 40;
pub const TABLE_R_MIN: u32 = 6;

pub const TABLE2_FUNCTIONS: [&str; 4] = ["booth", "matyas", "three-hump", "motzkin"];

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Row {
    pub r: u32,
    pub cells: Vec<Option<f64>>,
}

fn check_r_max(r_max: u32, limit: u32) -> CliResult<()> {
    if r_max < TABLE_R_MIN || r_max % 2 != 0 {
        return Err(CliError::Usage(format!(
            "--r-max must be even and at least {TABLE_R_MIN}, got {r_max}"
        )));
    }
    if r_max > limit {
        return Err(CliError::Usage(format!(
            "--r-max is at most {limit} for this table, got {r_max}"
        )));
    }
    Ok(())
}

fn even_range(r_max: u32) -> Vec<u32> {
    (TABLE_R_MIN..=r_max).step_by(2).collect()
}

type Job<T> = (u64, Box<dyn Fn() -> CliResult<T> + Send + Sync>);

/// Runs `jobs` on the pool, keeping their order, largest cost first.
fn run_jobs<T: Send>(pool: &rayon::ThreadPool, jobs: Vec<Job<T>>) -> CliResult<Vec<T>> {
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(jobs[i].0));
    let mut done: Vec<(usize, CliResult<T>)> = pool.install(|| order.par_iter().map(|&i| (i, (jobs[i].1)())).collect());
    done.sort_by_key(|(i, _)| *i);
    done.into_iter().map(|(_, r)| r).collect()
}

fn cost(n: usize, r: u32) -> u64 {
    // order of the largest pencil, cubed
    let m = (1..=n as u64).fold(1u64, |acc, i| acc * (r as u64 / 2 + i) / i);
    m.pow(3) << n
}

pub fn table1(pool: &rayon::ThreadPool, r_max: u32) -> CliResult<Vec<Table1Row>> {
    check_r_max(r_max, TABLE1_R_MAX)?;
    let rs = even_range(r_max);
    let mut jobs: Vec<Job<Option<f64>>> = Vec::new();
    for &r in &rs {
        for (name, n) in TABLE1_COLUMNS {
            let tf = lookup(name, n)?;
            if n == 3 && !(TABLE1_N3_RANGE.0..=TABLE1_N3_RANGE.1).contains(&r) {
                jobs.push((0, Box::new(|| Ok(None))));
            } else {
                jobs.push((
                    cost(n, r),
                    Box::new(move || Ok(Some(schmudgen_bound(&tf.cheb, r)?.value))),
                ));
            }
        }
    }
    let cells = run_jobs(pool, jobs)?;
    Ok(rs
        .iter()
        .zip(cells.chunks(TABLE1_COLUMNS.len()))
        .map(|(&r, c)| Table1Row { r, cells: c.to_vec() })
        .collect())
}

fn table1_header() -> Vec<String> {
    std::iter::once("r".to_string())
        .chain(TABLE1_COLUMNS.iter().map(|(name, n)| format!("{name}-{n}")))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table2Cell {
    pub lebesgue: f64,
    pub schmudgen: f64,
}

impl Table2Cell {
    /// Whether the Schmüdgen-type bound is strictly the weaker one.
    pub fn schmudgen_above(&self) -> bool {
        self.schmudgen > self.lebesgue
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table2Row {
    pub r: u32,
    pub cells: Vec<Table2Cell>,
}

pub fn table2(pool: &rayon::ThreadPool, r_max: u32) -> CliResult<Vec<Table2Row>> {
    check_r_max(r_max, TABLE2_R_MAX)?;
    let rs = even_range(r_max);
    let mut jobs: Vec<Job<Table2Cell>> = Vec::new();
    for &r in &rs {
        for name in TABLE2_FUNCTIONS {
            let tf = lookup(name, 2)?;
            jobs.push((
                cost(2, r),
                Box::new(move || {
                    Ok(Table2Cell {
                        lebesgue: sos_lebesgue_bound(&tf.cheb, r)?.value,
                        schmudgen: schmudgen_bound(&tf.cheb, r)?.value,
                    })
                }),
            ));
        }
    }
    let cells = run_jobs(pool, jobs)?;
    Ok(rs
        .iter()
        .zip(cells.chunks(TABLE2_FUNCTIONS.len()))
        .map(|(&r, c)| Table2Row { r, cells: c.to_vec() })
        .collect())
}

fn table2_header() -> Vec<String> {
    let mut h = vec!["r".to_string()];
    for name in TABLE2_FUNCTIONS {
        h.push(format!("{name}-lebesgue"));
        h.push(format!("{name}-schmudgen"));
        h.push(format!("{name}-schmudgen-above"));
    }
    h
}

fn table2_record(row: &Table2Row, fmt: fn(f64) -> String) -> Vec<String> {
    let mut rec = vec![row.r.to_string()];
    for c in &row.cells {
        rec.push(fmt(c.lebesgue));
        rec.push(fmt(c.schmudgen));
        rec.push(c.schmudgen_above().to_string());
    }
    rec
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsRow {
    pub function: String,
    pub n: usize,
    pub d: u32,
    pub psi_d: u32,
    pub c_d: f64,
    pub big_c_d: f64,
    pub c_f: f64,
}

pub fn constants() -> CliResult<Vec<ConstantsRow>> {
    boxbound::catalog()
        .into_iter()
        .map(|tf| {
            let ec = error_constants(&tf.cheb)?;
            Ok(ConstantsRow {
                function: tf.name.to_string(),
                n: tf.n,
                d: ec.d,
                psi_d: ec.psi_d,
                c_d: ec.c_d,
                big_c_d: ec.big_c_d,
                c_f: ec.c_f,
            })
        })
        .collect()
}

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

pub fn run_bound(args: &BoundArgs) -> CliResult<()> {
    let tf = lookup(&args.function, args.n)?;
    if args.x_star.is_some() && args.method != Method::Jackson {
        return usage("--x-star only applies to --method jackson");
    }
    let row = compute_bound(&tf, args.r, args.method, args.x_star.as_deref())?;
    write_rows(
        open_out(args.out.out.as_deref())?,
        &["function", "n", "r", "method", "value", "winner_subset", "wall_ms"],
        &[vec![
            row.function,
            row.n.to_string(),
            row.r.to_string(),
            row.method.as_str().to_string(),
            raw(row.value),
            row.winner,
            row.wall_ms.to_string(),
        ]],
    )
}

pub fn run_table1(args: &TableArgs) -> CliResult<()> {
    let pool = thread_pool()?;
    let rows = table1(&pool, args.r_max.unwrap_or(TABLE1_R_MAX))?;
    let header = table1_header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let render = |fmt: fn(f64) -> String| -> Vec<Vec<String>> {
        rows.iter()
            .map(|row| {
                std::iter::once(row.r.to_string())
                    .chain(row.cells.iter().map(|&c| opt(c, fmt)))
                    .collect()
            })
            .collect()
    };
    write_table(args.out.out.as_deref(), &header, &render(raw), &render(pretty))
}

pub fn run_table2(args: &TableArgs) -> CliResult<()> {
    let pool = thread_pool()?;
    let rows = table2(&pool, args.r_max.unwrap_or(TABLE2_R_MAX))?;
    let header = table2_header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let raw_rows: Vec<_> = rows.iter().map(|r| table2_record(r, raw)).collect();
    let pretty_rows: Vec<_> = rows.iter().map(|r| table2_record(r, pretty)).collect();
    write_table(args.out.out.as_deref(), &header, &raw_rows, &pretty_rows)
}

pub fn run_density(args: &DensityArgs) -> CliResult<()> {
    if args.method != Method::Schmudgen {
        return usage("density grids are produced for --method schmudgen only");
    }
    let tf = lookup(&args.function, args.n)?;
    let res = schmudgen_bound(&tf.cheb, args.r)?;
    let grid = density_eval_grid(&res, args.grid)?;
    let mut header: Vec<String> = (1..=tf.n).map(|i| format!("x{i}")).collect();
    header.push("density".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|(x, v)| x.iter().map(|&xi| raw(xi)).chain(std::iter::once(raw(*v))).collect())
        .collect();
    write_rows(open_out(args.out.out.as_deref())?, &header, &rows)
}

pub fn run_overlay(args: &OverlayArgs) -> CliResult<()> {
    if args.grid == 0 {
        return usage("--grid must be positive");
    }
    let m = args.grid as f64 + 1.0;
    let grid: Vec<f64> = (1..=args.grid).map(|i| -1.0 + 2.0 * i as f64 / m).collect();
    let ov = gaussian_overlay(args.x_star, args.r, &grid)?;
    let rows: Vec<Vec<String>> = ov
        .rows
        .iter()
        .map(|row| vec![raw(row.x), raw(row.delta_kpm), raw(row.gaussian)])
        .collect();
    write_rows(
        open_out(args.out.out.as_deref())?,
        &["x", "delta_kpm", "gaussian"],
        &rows,
    )
}

pub fn run_constants(args: &OutArgs) -> CliResult<()> {
    let rows: Vec<Vec<String>> = constants()?
        .into_iter()
        .map(|c| {
            vec![
                c.function,
                c.n.to_string(),
                c.d.to_string(),
                c.psi_d.to_string(),
                raw(c.c_d),
                raw(c.big_c_d),
                raw(c.c_f),
            ]
        })
        .collect();
    write_rows(
        open_out(args.out.as_deref())?,
        &["function", "n", "d", "psi_d", "c_d", "C_d", "C_f"],
        &rows,
    )
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Bound(a) => run_bound(a),
        Command::Table1(a) => run_table1(a),
        Command::Table2(a) => run_table2(a),
        Command::Density(a) => run_density(a),
        Command::Overlay(a) => run_overlay(a),
        Command::Constants(a) => run_constants(a),
    }
}
