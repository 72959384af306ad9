//! Flat tabular records in CSV and JSON.
//!
//! Floating-point fields are written with 17 significant digits
//! (`{:.16e}`), which round-trips every `f64` exactly. Non-finite floats are
//! written as `NaN`/`inf`/`-inf` in CSV and `null` in JSON. Missing optional
//! values are empty CSV cells and JSON `null`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::value::RawValue;

use super::config::OutputFormat;
use crate::error::{Error, Result};
use crate::experiments::{BenchmarkRecord, FitStatus, Spread, TransitionEstimate, TrialRecord};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Float(f64),
    OptFloat(Option<f64>),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Field {
    fn csv_text(&self) -> String {
        match self {
            Field::Float(v) | Field::OptFloat(Some(v)) => format_f64(*v),
            Field::OptFloat(None) => String::new(),
            Field::Int(v) => v.to_string(),
            Field::Bool(v) => v.to_string(),
            Field::Text(s) => s.clone(),
        }
    }

    fn json_text(&self) -> String {
        match self {
            Field::Float(v) | Field::OptFloat(Some(v)) if v.is_finite() => format_f64(*v),
            Field::Float(_) | Field::OptFloat(_) => "null".into(),
            Field::Int(v) => v.to_string(),
            Field::Bool(v) => v.to_string(),
            Field::Text(s) => serde_json::to_string(s).expect("strings always serialize"),
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// A record with a fixed column order. `from_row` receives cells as text in
/// `COLUMNS` order: CSV cells verbatim, JSON values with strings unquoted and
/// `null` mapped to an empty cell.
pub trait Record: Sized {
    const COLUMNS: &'static [&'static str];
    fn to_row(&self) -> Vec<Field>;
    fn from_row(cells: &[String]) -> Result<Self>;
}

/// Cell cursor used by `from_row` implementations.
pub struct Cells<'a> {
    cells: &'a [String],
    pos: usize,
}

impl<'a> Cells<'a> {
    pub fn new(cells: &'a [String]) -> Self {
        Self { cells, pos: 0 }
    }

    fn next_raw(&mut self) -> Result<&'a str> {
        let c = self
            .cells
            .get(self.pos)
            .ok_or_else(|| Error::invalid(format!("row has only {} cells", self.cells.len())))?;
        self.pos += 1;
        Ok(c.trim())
    }

    pub fn float(&mut self) -> Result<f64> {
        let c = self.next_raw()?;
        if c.is_empty() {
            return Ok(f64::NAN);
        }
        c.parse().map_err(|_| Error::invalid(format!("bad number {c:?}")))
    }

    pub fn opt_float(&mut self) -> Result<Option<f64>> {
        let c = self.next_raw()?;
        if c.is_empty() {
            return Ok(None);
        }
        c.parse().map(Some).map_err(|_| Error::invalid(format!("bad number {c:?}")))
    }

    pub fn int(&mut self) -> Result<u64> {
        let c = self.next_raw()?;
        c.parse().map_err(|_| Error::invalid(format!("bad integer {c:?}")))
    }

    pub fn usize(&mut self) -> Result<usize> {
        let c = self.next_raw()?;
        c.parse().map_err(|_| Error::invalid(format!("bad integer {c:?}")))
    }

    pub fn bool(&mut self) -> Result<bool> {
        let c = self.next_raw()?;
        c.parse().map_err(|_| Error::invalid(format!("bad boolean {c:?}")))
    }

    pub fn text(&mut self) -> Result<String> {
        let c = self
            .cells
            .get(self.pos)
            .ok_or_else(|| Error::invalid("row too short"))?;
        self.pos += 1;
        Ok(c.clone())
    }
}

pub fn records_to_csv<R: Record>(records: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ctx = |e: csv::Error| Error::Csv {
        path: "<memory>".into(),
        source: e,
    };
    w.write_record(R::COLUMNS).map_err(ctx)?;
    for r in records {
        w.write_record(r.to_row().iter().map(Field::csv_text)).map_err(ctx)?;
    }
    w.into_inner().map_err(|e| Error::invalid(format!("csv flush: {e}")))
}

pub fn records_to_json<R: Record>(records: &[R]) -> String {
    let mut s = String::from("[");
    for (i, r) in records.iter().enumerate() {
        s.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
        for (j, (col, field)) in R::COLUMNS.iter().zip(r.to_row()).enumerate() {
            if j > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "\"{col}\": {}", field.json_text());
        }
        s.push('}');
    }
    s.push_str(if records.is_empty() { "]\n" } else { "\n]\n" });
    s
}

pub fn records_from_csv<R: Record>(data: &[u8]) -> Result<Vec<R>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(data);
    let ctx = |e: csv::Error| Error::Csv {
        path: "<memory>".into(),
        source: e,
    };
    let headers = rdr.headers().map_err(ctx)?.clone();
    if headers.iter().ne(R::COLUMNS.iter().copied()) {
        return Err(Error::parse(1, format!("expected columns {:?}", R::COLUMNS)));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(ctx)?;
        let cells: Vec<String> = row.iter().map(str::to_string).collect();
        out.push(R::from_row(&cells).map_err(|e| Error::parse(i + 2, e.to_string()))?);
    }
    Ok(out)
}

pub fn records_from_json<R: Record>(text: &str) -> Result<Vec<R>> {
    let objects: Vec<BTreeMap<String, Box<RawValue>>> = serde_json::from_str(text)?;
    let mut out = Vec::with_capacity(objects.len());
    for (i, obj) in objects.iter().enumerate() {
        if obj.len() != R::COLUMNS.len() {
            return Err(Error::invalid(format!("record {i}: expected {} fields", R::COLUMNS.len())));
        }
        let mut cells = Vec::with_capacity(R::COLUMNS.len());
        for col in R::COLUMNS {
            let raw = obj
                .get(*col)
                .ok_or_else(|| Error::invalid(format!("record {i}: missing field {col:?}")))?
                .get();
            let cell = if raw.starts_with('"') {
                serde_json::from_str::<String>(raw)?
            } else if raw == "null" {
                String::new()
            } else {
                raw.to_string()
            };
            cells.push(cell);
        }
        out.push(R::from_row(&cells).map_err(|e| Error::invalid(format!("record {i}: {e}")))?);
    }
    Ok(out)
}

/// Write `records` to `path`, creating parent directories as needed.
pub fn write_records<R: Record>(records: &[R], format: OutputFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        OutputFormat::Csv => records_to_csv(records)?,
        OutputFormat::Json => records_to_json(records).into_bytes(),
    };
    write_bytes(path, &bytes)
}

pub fn read_records<R: Record>(format: OutputFormat, path: impl AsRef<Path>) -> Result<Vec<R>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let parsed = match format {
        OutputFormat::Csv => records_from_csv(&bytes),
        OutputFormat::Json => {
            let text = String::from_utf8(bytes).map_err(|_| Error::invalid("file is not UTF-8"))?;
            records_from_json(&text)
        }
    };
    parsed.map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

impl Record for TrialRecord {
    const COLUMNS: &'static [&'static str] = &[
        "delta", "rho", "n", "k", "big_n", "seed", "solver", "relative_rmse", "success", "operator_calls",
        "outer_iters", "wall_time", "status",
    ];

    fn to_row(&self) -> Vec<Field> {
        vec![
            Field::Float(self.delta),
            Field::Float(self.rho),
            Field::Int(self.n as u64),
            Field::Int(self.k as u64),
            Field::Int(self.big_n as u64),
            Field::Int(self.seed),
            Field::Text(self.solver.clone()),
            Field::OptFloat(self.relative_rmse),
            Field::Bool(self.success),
            Field::Int(self.operator_calls),
            Field::Int(self.outer_iters as u64),
            Field::Float(self.wall_time),
            Field::Text(self.status.clone()),
        ]
    }

    fn from_row(cells: &[String]) -> Result<Self> {
        let mut c = Cells::new(cells);
        Ok(TrialRecord {
            delta: c.float()?,
            rho: c.float()?,
            n: c.usize()?,
            k: c.usize()?,
            big_n: c.usize()?,
            seed: c.int()?,
            solver: c.text()?,
            relative_rmse: c.opt_float()?,
            success: c.bool()?,
            operator_calls: c.int()?,
            outer_iters: c.usize()?,
            wall_time: c.float()?,
            status: c.text()?,
        })
    }
}

impl Record for BenchmarkRecord {
    /// Benchmark table schema, in this order.
    const COLUMNS: &'static [&'static str] = &[
        "solver", "delta", "rho", "n", "k", "big_n", "trials", "successes", "failures", "rmse_min", "rmse_mean",
        "rmse_max", "calls_min", "calls_mean", "calls_max", "time_min", "time_mean", "time_max",
    ];

    fn to_row(&self) -> Vec<Field> {
        let mut row = vec![
            Field::Text(self.solver.clone()),
            Field::Float(self.delta),
            Field::Float(self.rho),
            Field::Int(self.n as u64),
            Field::Int(self.k as u64),
            Field::Int(self.big_n as u64),
            Field::Int(self.trials as u64),
            Field::Int(self.successes as u64),
            Field::Int(self.failures as u64),
        ];
        for s in [self.rmse, self.operator_calls, self.wall_time] {
            row.extend([Field::Float(s.min), Field::Float(s.mean), Field::Float(s.max)]);
        }
        row
    }

    fn from_row(cells: &[String]) -> Result<Self> {
        let mut c = Cells::new(cells);
        let solver = c.text()?;
        let delta = c.float()?;
        let rho = c.float()?;
        let (n, k, big_n) = (c.usize()?, c.usize()?, c.usize()?);
        let (trials, successes, failures) = (c.usize()?, c.usize()?, c.usize()?);
        let mut spread = || -> Result<Spread> {
            Ok(Spread {
                min: c.float()?,
                mean: c.float()?,
                max: c.float()?,
            })
        };
        Ok(BenchmarkRecord {
            solver,
            delta,
            rho,
            n,
            k,
            big_n,
            trials,
            successes,
            failures,
            rmse: spread()?,
            operator_calls: spread()?,
            wall_time: spread()?,
        })
    }
}

/// One fitted transition point per `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    pub solver: String,
    pub delta: f64,
    pub rho_reference: f64,
    pub rho_hat: f64,
    pub std_error: f64,
    pub intercept: f64,
    pub slope: f64,
    pub status: String,
}

impl TransitionRow {
    pub fn from_estimate(solver: &str, e: &TransitionEstimate) -> Self {
        Self {
            solver: solver.to_string(),
            delta: e.delta,
            rho_reference: e.rho_reference,
            rho_hat: e.fit.rho_hat,
            std_error: e.fit.std_error,
            intercept: e.fit.intercept,
            slope: e.fit.slope,
            status: fit_status_name(e.fit.status).into(),
        }
    }
}

pub fn fit_status_name(s: FitStatus) -> &'static str {
    match s {
        FitStatus::Fitted => "fitted",
        FitStatus::Separated => "degenerate-separated",
        FitStatus::AllSuccess => "degenerate-all-success",
        FitStatus::AllFailure => "degenerate-all-failure",
    }
}

impl Record for TransitionRow {
    const COLUMNS: &'static [&'static str] =
        &["solver", "delta", "rho_reference", "rho_hat", "std_error", "intercept", "slope", "status"];

    fn to_row(&self) -> Vec<Field> {
        vec![
            Field::Text(self.solver.clone()),
            Field::Float(self.delta),
            Field::Float(self.rho_reference),
            Field::Float(self.rho_hat),
            Field::Float(self.std_error),
            Field::Float(self.intercept),
            Field::Float(self.slope),
            Field::Text(self.status.clone()),
        ]
    }

    fn from_row(cells: &[String]) -> Result<Self> {
        let mut c = Cells::new(cells);
        Ok(Self {
            solver: c.text()?,
            delta: c.float()?,
            rho_reference: c.float()?,
            rho_hat: c.float()?,
            std_error: c.float()?,
            intercept: c.float()?,
            slope: c.float()?,
            status: c.text()?,
        })
    }
}

/// Success count of one `(delta, rho)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRow {
    pub solver: String,
    pub delta: f64,
    pub rho: f64,
    pub successes: usize,
    pub trials: usize,
}

impl CellRow {
    pub fn from_estimate(solver: &str, e: &TransitionEstimate) -> Vec<Self> {
        e.rhos
            .iter()
            .zip(&e.successes)
            .map(|(&rho, &successes)| Self {
                solver: solver.to_string(),
                delta: e.delta,
                rho,
                successes,
                trials: e.trials,
            })
            .collect()
    }
}

impl Record for CellRow {
    const COLUMNS: &'static [&'static str] = &["solver", "delta", "rho", "successes", "trials"];

    fn to_row(&self) -> Vec<Field> {
        vec![
            Field::Text(self.solver.clone()),
            Field::Float(self.delta),
            Field::Float(self.rho),
            Field::Int(self.successes as u64),
            Field::Int(self.trials as u64),
        ]
    }

    fn from_row(cells: &[String]) -> Result<Self> {
        let mut c = Cells::new(cells);
        Ok(Self {
            solver: c.text()?,
            delta: c.float()?,
            rho: c.float()?,
            successes: c.usize()?,
            trials: c.usize()?,
        })
    }
}

/// Summary of one image reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRow {
    pub solver: String,
    pub height: usize,
    pub width: usize,
    pub n: usize,
    pub sigma: f64,
    pub epsilon: f64,
    pub relative_error: f64,
    pub residual_norm: f64,
    pub feasible: bool,
    pub outer_iters: usize,
    pub operator_calls: u64,
    pub wall_time: f64,
}

impl Record for ImageRow {
    const COLUMNS: &'static [&'static str] = &[
        "solver", "height", "width", "n", "sigma", "epsilon", "relative_error", "residual_norm", "feasible",
        "outer_iters", "operator_calls", "wall_time",
    ];

    fn to_row(&self) -> Vec<Field> {
        vec![
            Field::Text(self.solver.clone()),
            Field::Int(self.height as u64),
            Field::Int(self.width as u64),
            Field::Int(self.n as u64),
            Field::Float(self.sigma),
            Field::Float(self.epsilon),
            Field::Float(self.relative_error),
            Field::Float(self.residual_norm),
            Field::Bool(self.feasible),
            Field::Int(self.outer_iters as u64),
            Field::Int(self.operator_calls),
            Field::Float(self.wall_time),
        ]
    }

    fn from_row(cells: &[String]) -> Result<Self> {
        let mut c = Cells::new(cells);
        Ok(Self {
            solver: c.text()?,
            height: c.usize()?,
            width: c.usize()?,
            n: c.usize()?,
            sigma: c.float()?,
            epsilon: c.float()?,
            relative_error: c.float()?,
            residual_norm: c.float()?,
            feasible: c.bool()?,
            outer_iters: c.usize()?,
            operator_calls: c.int()?,
            wall_time: c.float()?,
        })
    }
}
