//! Command-line front end.
//!
//! Every subcommand except `dump-lp` produces a [`Table`], which is written
//! either as RFC-4180 CSV (header row plus one record per row) or as one
//! JSON object `{"meta": {...}, "rows": [...]}`. Column names and order
//! are the same in both formats. Nested values (populations, histogram
//! support, decompositions) are JSON arrays; in CSV they appear as compact
//! JSON text in a quoted cell.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::Serialize;
use serde_json::{json, Value};

use crate::ansatz::{classify, classify_rank3, classify_rank4};
use crate::error::{Error, Result};
use crate::fock::FockDiagonalState;
use crate::lp::{write_dump, SolveOptions};
use crate::qfi::quadrature_qfi;
use crate::roof::{
    self, assemble_lp, build_grid_capped, classification_tolerance, count_points, default_phase_order,
    expand_histogram, min_phase_order, Histogram, RoofOptions, DEFAULT_MAX_POINTS,
};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "fockroof",
    version,
    about = "Nonclassicality of Fock-diagonal states by convex-roof linear programming"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads; 0 picks one per core. Output does not depend on it.
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,

    /// Simplex pivot limit.
    #[arg(long = "max-iter", default_value_t = 1_000_000, global = true)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate one state: LP estimate, simple bound, ansatz, metrological power.
    Eval(EvalArgs),
    /// Rank-3 phase diagram over the triangle p2 + p1 <= 1.
    Sweep3(SweepArgs),
    /// Rank-4 phase diagram over the pyramid p3 + p2 + p1 <= 1.
    Sweep4(SweepArgs),
    /// Truncated thermal states over a range of truncations.
    Thermal(ThermalArgs),
    /// Grid size and projected LP memory.
    GridInfo(GridInfoArgs),
    /// Write the LP for one state in the plain-text dump format.
    DumpLp(DumpArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Populations p_n, p_{n+1}, ... separated by commas.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub p: Vec<f64>,
    /// Photon number of the first population.
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Number of phases per support point in the explicit decomposition.
    #[arg(long = "expansion-P")]
    pub expansion_p: Option<usize>,
    /// Leave out the off-lattice simple-decomposition column.
    #[arg(long)]
    pub lattice_only: bool,
    /// Also write the histogram as CSV to this file.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    /// Also write the explicit decomposition as JSON to this file.
    #[arg(long)]
    pub decomposition: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    /// Lattice spacing in population space.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Grid spacing for LP checks [default: 0.01 for sweep3, 0.05 for sweep4].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Run the LP on every k-th point.
    #[arg(long = "lp-check")]
    pub lp_check: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ThermalArgs {
    /// Mean photon number of the untruncated thermal state.
    #[arg(long = "n-th", default_value_t = 0.5)]
    pub n_th: f64,
    #[arg(long = "m-min", default_value_t = 1)]
    pub m_min: usize,
    #[arg(long = "m-max", default_value_t = 6)]
    pub m_max: usize,
    /// Starting grid spacing.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Local refinement levels after the first solve.
    #[arg(long, default_value_t = 2)]
    pub refine: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GridInfoArgs {
    /// Rank M.
    #[arg(long, alias = "rank")]
    pub m: usize,
    #[arg(long)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DumpArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
    Json(Value),
}

impl Cell {
    fn csv_text(&self) -> Result<String> {
        Ok(match self {
            Cell::Empty => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Json(v) => serde_json::to_string(v)?,
        })
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Empty => s.serialize_none(),
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Num(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Num(_) => s.serialize_none(),
            Cell::Bool(v) => s.serialize_bool(*v),
            Cell::Text(v) => s.serialize_str(v),
            Cell::Json(v) => v.serialize(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// Output of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Run parameters, in insertion order.
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self {
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    fn meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            let rec = row.iter().map(Cell::csv_text).collect::<Result<Vec<_>>>()?;
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

struct Meta<'a>(&'a [(String, Value)]);

impl Serialize for Meta<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Row<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Rows<'a>(&'a Table);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
        for r in &self.0.rows {
            seq.serialize_element(&Row(&self.0.columns, r))?;
        }
        seq.end()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("meta", &Meta(&self.meta))?;
        map.serialize_entry("rows", &Rows(self))?;
        map.end()
    }
}

/// Shortest decimal that parses back to the same `f64`; scientific
/// notation outside `[1e-5, 1e16)`.
pub fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 0.5], got {delta}")));
    }
    Ok(())
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidArgument(format!("step must lie in (0, 0.5], got {step}")));
    }
    Ok(())
}

fn roof_options(cfg: &RunConfig, lattice_only: bool) -> Result<RoofOptions> {
    if cfg.max_iter == 0 {
        return Err(Error::InvalidArgument("--max-iter must be positive".into()));
    }
    Ok(RoofOptions {
        include_simple_column: !lattice_only,
        max_points: DEFAULT_MAX_POINTS,
        solve: SolveOptions::default().with_max_iter(cfg.max_iter),
    })
}

fn support_json(h: &Histogram) -> Value {
    Value::Array(
        h.entries()
            .iter()
            .map(|e| {
                json!({
                    "x": e.free_amplitudes(),
                    "weight": e.weight,
                    "on_lattice": e.lattice.is_some(),
                })
            })
            .collect(),
    )
}

pub fn eval(cfg: &RunConfig, args: &EvalArgs) -> Result<Table> {
    check_delta(args.delta)?;
    let state = FockDiagonalState::new(args.n, args.p.clone())?;
    let m = state.rank();
    let order = args.expansion_p.unwrap_or_else(|| default_phase_order(m));
    if order < min_phase_order(m) {
        return Err(Error::InvalidArgument(format!(
            "--expansion-P must be at least max(3, M) = {}, got {order}",
            min_phase_order(m)
        )));
    }
    let opts = roof_options(cfg, args.lattice_only)?;
    let est = roof::estimate_ort_with(&state, args.delta, &opts)?;
    let ansatz = classify(&state)?;
    let qfi = quadrature_qfi(&state);
    let dec = expand_histogram(&est.histogram, order)?;

    if let Some(path) = &args.histogram {
        est.histogram.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let dec_json: Value = serde_json::from_str(&dec.to_json()?)?;
    if let Some(path) = &args.decomposition {
        std::fs::write(path, dec.to_json()? + "\n")?;
    }

    let simple = state.simple_bound();
    let decomposability = if simple - est.n_upper <= classification_tolerance(args.delta) {
        "simply-decomposed"
    } else {
        "compositely-decomposed"
    };

    let mut t = Table::new(vec![
        "n",
        "rank",
        "populations",
        "delta",
        "mean_photon",
        "n_lp",
        "simple_bound",
        "decomposability",
        "ansatz_label",
        "ansatz_value",
        "upper_bound_only",
        "fisher",
        "w",
        "columns",
        "iterations",
        "support",
        "phase_order",
        "decomposition_value",
        "decomposition",
    ])
    .meta("command", "eval")
    .meta("delta", args.delta)
    .meta("lattice_only", args.lattice_only)
    .meta("max_iter", cfg.max_iter);
    t.rows.push(vec![
        Cell::Int(state.offset() as i64),
        Cell::Int(m as i64),
        Cell::Json(json!(state.populations())),
        Cell::Num(args.delta),
        Cell::Num(state.mean_photon()),
        Cell::Num(est.n_upper),
        Cell::Num(simple),
        Cell::Text(decomposability.into()),
        ansatz
            .as_ref()
            .map_or(Cell::Empty, |a| Cell::Text(a.label.as_str().into())),
        ansatz.as_ref().map(|a| a.value).into(),
        ansatz.as_ref().map_or(Cell::Empty, |a| Cell::Bool(a.upper_bound_only)),
        Cell::Num(qfi.fisher),
        Cell::Num(qfi.power),
        Cell::Int(est.columns as i64),
        Cell::Int(est.iterations as i64),
        Cell::Json(support_json(&est.histogram)),
        Cell::Int(order as i64),
        Cell::Num(dec.value()),
        Cell::Json(dec_json),
    ]);
    Ok(t)
}

/// Integer points `(i_d, …, i_1)` with `Σ i ≤ ⌊1/step⌋`, lexicographic with
/// the first coordinate outermost.
fn simplex_lattice(dim: usize, step: f64) -> Vec<Vec<usize>> {
    let k = (1.0 / step + 1e-9).floor() as usize;
    let mut out = Vec::new();
    let mut cur = vec![0usize; dim];
    fn rec(level: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if level == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..=left {
            cur[level] = i;
            rec(level + 1, left - i, cur, out);
        }
    }
    rec(0, k, &mut cur, &mut out);
    out
}

/// Populations `[p_n, …, p_{n+dim}]` of one lattice point, given as
/// `(i_dim, …, i_1)`.
fn lattice_populations(idx: &[usize], step: f64) -> Vec<f64> {
    // i/K reads better than i·step when the step divides 1
    let k = (1.0 / step).round();
    if (k * step - 1.0).abs() < 1e-12 {
        let rest = k as usize - idx.iter().sum::<usize>();
        return std::iter::once(rest)
            .chain(idx.iter().rev().copied())
            .map(|i| i as f64 / k)
            .collect();
    }
    let upper: Vec<f64> = idx.iter().rev().map(|&i| i as f64 * step).collect();
    let p0 = (1.0 - upper.iter().sum::<f64>()).max(0.0);
    std::iter::once(p0).chain(upper).collect()
}

fn sweep(cfg: &RunConfig, args: &SweepArgs, rank: usize) -> Result<Table> {
    check_step(args.step)?;
    let delta = args.delta.unwrap_or(if rank == 3 { 0.01 } else { 0.05 });
    check_delta(delta)?;
    if args.lp_check == Some(0) {
        return Err(Error::InvalidArgument("--lp-check stride must be positive".into()));
    }
    let opts = roof_options(cfg, false)?;
    let points = simplex_lattice(rank - 1, args.step);

    let mut columns: Vec<&'static str> = vec!["n"];
    columns.extend(if rank == 3 {
        vec!["p2", "p1", "p0"]
    } else {
        vec!["p3", "p2", "p1", "p0"]
    });
    columns.extend(["label", "value", "upper_bound_only", "n_lp", "lp_minus_ansatz"]);

    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, idx)| -> Result<Vec<Cell>> {
            let p = lattice_populations(idx, args.step);
            let res = if rank == 3 {
                classify_rank3(args.n, [p[0], p[1], p[2]])?
            } else {
                classify_rank4(args.n, [p[0], p[1], p[2], p[3]])?
            };
            let lp = match args.lp_check {
                Some(stride) if i % stride == 0 => {
                    let state = FockDiagonalState::new(args.n, p.clone())?;
                    Some(roof::estimate_ort_with(&state, delta, &opts)?.n_upper)
                }
                _ => None,
            };
            let mut row = vec![Cell::Int(args.n as i64)];
            row.extend(p.iter().rev().map(|&v| Cell::Num(v)));
            row.push(Cell::Text(res.label.as_str().into()));
            row.push(Cell::Num(res.value));
            row.push(Cell::Bool(res.upper_bound_only));
            row.push(lp.into());
            row.push(lp.map(|v| v - res.value).into());
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut t = Table::new(columns)
        .meta("command", if rank == 3 { "sweep3" } else { "sweep4" })
        .meta("n", args.n)
        .meta("step", args.step)
        .meta("points", points.len());
    if let Some(stride) = args.lp_check {
        t = t
            .meta("lp_check", stride)
            .meta("delta", delta)
            .meta("max_iter", cfg.max_iter);
    }
    t.rows = rows;
    Ok(t)
}

pub fn sweep3(cfg: &RunConfig, args: &SweepArgs) -> Result<Table> {
    sweep(cfg, args, 3)
}

pub fn sweep4(cfg: &RunConfig, args: &SweepArgs) -> Result<Table> {
    sweep(cfg, args, 4)
}

pub fn thermal(cfg: &RunConfig, args: &ThermalArgs) -> Result<Table> {
    if !(args.n_th > 0.0 && args.n_th.is_finite()) {
        return Err(Error::InvalidArgument(format!("--n-th must be positive, got {}", args.n_th)));
    }
    if args.m_min == 0 || args.m_min > args.m_max {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= m-min <= m-max, got {}..{}",
            args.m_min, args.m_max
        )));
    }
    check_delta(args.delta)?;
    let opts = roof_options(cfg, false)?;
    let mut t = Table::new(vec![
        "m",
        "mean_photon",
        "n_lp",
        "ratio",
        "simple_bound",
        "final_delta",
        "columns",
        "populations",
    ])
    .meta("command", "thermal")
    .meta("n_th", args.n_th)
    .meta("delta", args.delta)
    .meta("refine", args.refine)
    .meta("max_iter", cfg.max_iter);
    for m in args.m_min..=args.m_max {
        let state = FockDiagonalState::truncated_thermal(args.n_th, m)?;
        let r = roof::refine_with(&state, args.delta, args.refine + 1, &opts)?;
        let mean = state.mean_photon();
        let n_lp = r.estimate.n_upper;
        log::info!("thermal M={m}: N={n_lp} over {} levels", r.levels.len());
        t.rows.push(vec![
            Cell::Int(m as i64),
            Cell::Num(mean),
            Cell::Num(n_lp),
            (mean > 0.0).then(|| n_lp / mean).into(),
            Cell::Num(state.simple_bound()),
            Cell::Num(r.estimate.delta),
            Cell::Int(r.estimate.columns as i64),
            Cell::Json(json!(state.populations())),
        ]);
    }
    Ok(t)
}

pub fn grid_info(_cfg: &RunConfig, args: &GridInfoArgs) -> Result<Table> {
    check_delta(args.delta)?;
    if args.m == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let points = count_points(args.m, args.delta);
    let lp_bytes = points * (args.m + 1) * 8;
    let grid_bytes = points * (args.m - 1) * 4;
    let mut t = Table::new(vec!["m", "delta", "points", "lp_bytes", "grid_bytes"])
        .meta("command", "grid-info");
    t.rows.push(vec![
        Cell::Int(args.m as i64),
        Cell::Num(args.delta),
        Cell::Int(points as i64),
        Cell::Int(lp_bytes as i64),
        Cell::Int(grid_bytes as i64),
    ]);
    Ok(t)
}

pub fn dump_lp<W: Write>(_cfg: &RunConfig, args: &DumpArgs, out: W) -> Result<()> {
    check_delta(args.delta)?;
    let state = FockDiagonalState::new(args.n, args.p.clone())?;
    if state.rank() < 2 {
        return Err(Error::InvalidArgument("a rank-1 state has no LP".into()));
    }
    let grid = build_grid_capped(state.rank(), args.delta, DEFAULT_MAX_POINTS)?;
    write_dump(&assemble_lp(&state, &grid)?, out)
}

/// Builds the table for a table-producing command.
pub fn table(cfg: &RunConfig) -> Result<Option<Table>> {
    Ok(Some(match &cfg.command {
        Command::Eval(a) => eval(cfg, a)?,
        Command::Sweep3(a) => sweep3(cfg, a)?,
        Command::Sweep4(a) => sweep4(cfg, a)?,
        Command::Thermal(a) => thermal(cfg, a)?,
        Command::GridInfo(a) => grid_info(cfg, a)?,
        Command::DumpLp(_) => return Ok(None),
    }))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs a parsed configuration on a dedicated thread pool.
pub fn run(cfg: &RunConfig) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| {
        if let Command::DumpLp(a) = &cfg.command {
            let mut out = open_out(cfg.out.as_deref())?;
            dump_lp(cfg, a, &mut out)?;
            out.flush()?;
            return Ok(());
        }
        let t = table(cfg)?.expect("table command");
        let mut out = open_out(cfg.out.as_deref())?;
        t.write(cfg.format, &mut out)?;
        out.flush()?;
        Ok(())
    })
}
