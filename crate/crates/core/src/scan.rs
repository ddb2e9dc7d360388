//! Grid scans of `n0` and `m0` over slice points, with CSV output.

use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::eta;
use crate::error::{HankelError, Result};
use crate::hankel::SlicePoint;
use crate::sos::{m0_search, BisectionOptions};

pub const COORDS: [&str; 5] = ["v2", "v6", "v1", "v3", "v5"];

pub const TABLE1_V2: [f64; 11] = [-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
pub const TABLE1_V6: [f64; 8] = [-0.2, -0.1, 0.0, 0.5, 1.0, 1.5, 2.0, 4.0];

/// Reference `M0 = N0` at `(v2, v6, 0, 0, 0)`; rows follow `TABLE1_V2`,
/// columns `TABLE1_V6`.
pub const TABLE1: [[f64; 8]; 11] = [
    [3.54e4, 8.74e3, 3.76e3, 4.78e2, 3.12e2, 3.92e2, 6.23e2, 6.37e3],
    [2.98e4, 6.77e3, 2.73e3, 2.75e2, 1.25e2, 1.70e2, 3.57e2, 6.11e3],
    [2.72e4, 5.85e3, 2.26e3, 1.91e2, 6.15e1, 9.26e1, 2.73e2, 6.06e3],
    [2.59e4, 5.42e3, 2.04e3, 1.53e2, 3.78e1, 6.41e1, 2.48e2, 6.06e3],
    [2.46e4, 4.99e3, 1.82e3, 1.20e2, 1.96e1, 4.50e1, 2.39e2, 6.07e3],
    [2.34e4, 4.57e3, 1.62e3, 8.90e1, 7.058, 4.18e1, 2.45e2, 6.09e3],
    [2.21e4, 4.17e3, 1.42e3, 6.21e1, 1.000, 4.93e1, 2.56e2, 6.11e3],
    [2.09e4, 3.78e3, 1.23e3, 3.90e1, 4.191, 5.69e1, 2.67e2, 6.14e3],
    [1.98e4, 3.41e3, 1.06e3, 2.02e1, 8.00e0, 6.46e1, 2.78e2, 6.16e3],
    [1.75e4, 2.70e3, 7.28e2, 7.16e0, 1.66e1, 8.01e1, 3.01e2, 6.21e3],
    [1.53e4, 2.04e3, 4.41e2, 1.23e1, 2.60e1, 9.60e1, 3.23e2, 6.25e3],
];

/// Table entry at `(v2, v6)` when both are grid values.
pub fn table1_lookup(v2: f64, v6: f64) -> Option<f64> {
    let i = TABLE1_V2.iter().position(|&x| x == v2)?;
    let j = TABLE1_V6.iter().position(|&x| x == v6)?;
    Some(TABLE1[i][j])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Axis {
    Fixed(f64),
    Sweep { min: f64, max: f64, steps: usize },
    List(Vec<f64>),
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Fixed(x) => vec![*x],
            Axis::Sweep { min, max, steps } => {
                if *steps <= 1 {
                    return vec![*min];
                }
                (0..*steps)
                    .map(|k| min + (max - min) * k as f64 / (*steps - 1) as f64)
                    .collect()
            }
            Axis::List(v) => v.clone(),
        }
    }

    pub fn is_swept(&self) -> bool {
        !matches!(self, Axis::Fixed(_))
    }

    fn validate(&self) -> Result<()> {
        match self {
            Axis::Fixed(x) if !x.is_finite() => Err(bad("fixed value must be finite")),
            Axis::Sweep { min, max, steps } => {
                if *steps < 1 {
                    Err(bad("steps must be >= 1"))
                } else if !(min <= max) || !min.is_finite() || !max.is_finite() {
                    Err(bad("sweep needs finite min <= max"))
                } else {
                    Ok(())
                }
            }
            Axis::List(v) if v.is_empty() || v.iter().any(|x| !x.is_finite()) => {
                Err(bad("value list must be non-empty and finite"))
            }
            _ => Ok(()),
        }
    }
}

/// `min:max:steps`, or a single number for a fixed value.
impl FromStr for Axis {
    type Err = HankelError;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad(&format!("bad number {t:?}")));
        let axis = match parts.as_slice() {
            [x] => Axis::Fixed(num(x)?),
            [a, b, n] => Axis::Sweep {
                min: num(a)?,
                max: num(b)?,
                steps: n.parse().map_err(|_| bad(&format!("bad step count {n:?}")))?,
            },
            _ => return Err(bad(&format!("expected min:max:steps, got {s:?}"))),
        };
        axis.validate()?;
        Ok(axis)
    }
}

fn bad(msg: &str) -> HankelError {
    HankelError::InvalidInput(msg.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// In `COORDS` order.
    pub axes: [Axis; 5],
    pub options: BisectionOptions,
    /// Worker count; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    /// Attach Table-1 reference values and relative deviations.
    pub compare_table1: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            axes: std::array::from_fn(|_| Axis::Fixed(0.0)),
            options: BisectionOptions::default(),
            jobs: None,
            compare_table1: false,
        }
    }
}

impl GridSpec {
    /// The 11 x 8 `(v2, v6)` grid with `v1 = v3 = v5 = 0`.
    pub fn table1() -> Self {
        let mut g = Self::default();
        g.axes[0] = Axis::List(TABLE1_V2.to_vec());
        g.axes[1] = Axis::List(TABLE1_V6.to_vec());
        g.compare_table1 = true;
        g
    }

    pub fn set_axis(&mut self, coord: &str, axis: Axis) -> Result<()> {
        let k = COORDS
            .iter()
            .position(|c| *c == coord)
            .ok_or_else(|| bad(&format!("unknown coordinate {coord:?} (use v2, v6, v1, v3, v5)")))?;
        axis.validate()?;
        self.axes[k] = axis;
        Ok(())
    }

    /// Parse `coord=spec` as used by `--grid` and `--fix`.
    pub fn set_from_arg(&mut self, arg: &str) -> Result<()> {
        let (c, s) = arg
            .split_once('=')
            .ok_or_else(|| bad(&format!("expected coord=value, got {arg:?}")))?;
        self.set_axis(c.trim(), s.parse()?)
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.axes {
            a.validate()?;
        }
        self.options.search.validate()
    }

    /// Grid points in row-major order over `COORDS`.
    pub fn points(&self) -> Vec<[f64; 5]> {
        let vals: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        let mut out = vec![[0.0; 5]];
        for (k, vs) in vals.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    vs.iter().map(move |&x| {
                        let mut q = p;
                        q[k] = x;
                        q
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    SkippedDomain,
    Error,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::SkippedDomain => "skipped_domain",
            RowStatus::Error => "error",
        }
    }
}

impl FromStr for RowStatus {
    type Err = HankelError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(RowStatus::Ok),
            "skipped_domain" => Ok(RowStatus::SkippedDomain),
            "error" => Ok(RowStatus::Error),
            _ => Err(bad(&format!("unknown status {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub v2: f64,
    pub v6: f64,
    pub v1: f64,
    pub v3: f64,
    pub v5: f64,
    pub n0: Option<f64>,
    pub m0: Option<f64>,
    pub gap: Option<f64>,
    pub pns_free: Option<bool>,
    pub status: RowStatus,
    pub table1_ref: Option<f64>,
    pub rel_dev: Option<f64>,
}

/// `max(1e-3, 1e-2 n0)`
pub fn gap_tol(n0: f64) -> f64 {
    (1e-2 * n0).max(1e-3)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanOutput {
    pub rows: Vec<ScanRow>,
    /// Largest `m0 - n0` over ok rows.
    pub max_gap: Option<f64>,
}

fn scan_point(p: [f64; 5], spec: &GridSpec) -> ScanRow {
    let mut row = ScanRow {
        v2: p[0],
        v6: p[1],
        v1: p[2],
        v3: p[3],
        v5: p[4],
        n0: None,
        m0: None,
        gap: None,
        pns_free: None,
        status: RowStatus::Error,
        table1_ref: None,
        rel_dev: None,
    };
    if spec.compare_table1 && p[2] == 0.0 && p[3] == 0.0 && p[4] == 0.0 {
        row.table1_ref = table1_lookup(p[0], p[1]);
    }
    if !(eta(p[4], p[1]) < 1.0) {
        row.status = RowStatus::SkippedDomain;
        return row;
    }
    let Ok(sp) = SlicePoint::from_array(p) else {
        return row;
    };
    let Ok(s) = m0_search(&sp, &spec.options) else {
        return row;
    };
    row.m0 = Some(s.result.value);
    let Some(n) = s.n0 else {
        return row;
    };
    let m = s.result.value;
    row.n0 = Some(n.value);
    row.gap = Some(m - n.value);
    row.pns_free = Some(m - n.value <= gap_tol(n.value));
    row.status = RowStatus::Ok;
    row.rel_dev = row.table1_ref.map(|r| (m - r) / r);
    row
}

/// Evaluate every grid point on a pool of `spec.jobs` workers; rows come
/// back in grid order.
pub fn run_scan(spec: &GridSpec) -> Result<ScanOutput> {
    spec.validate()?;
    let points = spec.points();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = spec.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| HankelError::InvalidInput(format!("worker pool: {e}")))?;
    let rows: Vec<ScanRow> = pool.install(|| points.par_iter().map(|&p| scan_point(p, spec)).collect());
    let max_gap = rows
        .iter()
        .filter(|r| r.status == RowStatus::Ok)
        .filter_map(|r| r.gap)
        .reduce(f64::max);
    Ok(ScanOutput { rows, max_gap })
}

const HEADER: [&str; 10] = ["v2", "v6", "v1", "v3", "v5", "n0", "m0", "gap", "pns_free", "status"];
const REF_HEADER: [&str; 2] = ["table1_ref", "rel_dev"];

/// Ten significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.9e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// Write rows as CSV; the two reference columns are appended when
/// `with_reference` is set.
pub fn write_csv<W: Write>(rows: &[ScanRow], out: W, with_reference: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = HEADER.to_vec();
    if with_reference {
        header.extend(REF_HEADER);
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            format_number(r.v2),
            format_number(r.v6),
            format_number(r.v1),
            format_number(r.v3),
            format_number(r.v5),
            opt_num(r.n0),
            opt_num(r.m0),
            opt_num(r.gap),
            r.pns_free.map(|b| b.to_string()).unwrap_or_default(),
            r.status.as_str().to_string(),
        ];
        if with_reference {
            rec.push(opt_num(r.table1_ref));
            rec.push(opt_num(r.rel_dev));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ScanRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let idx: Vec<usize> = HEADER
        .iter()
        .map(|h| col(h).ok_or_else(|| bad(&format!("missing column {h}"))))
        .collect::<Result<_>>()?;
    let ref_idx = (col(REF_HEADER[0]), col(REF_HEADER[1]));
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            field(k).parse().map_err(|_| bad(&format!("bad number {:?}", field(k))))
        };
        let opt = |k: Option<usize>| -> Result<Option<f64>> {
            match k.map(field) {
                None | Some("") => Ok(None),
                Some(s) => s.parse().map(Some).map_err(|_| bad(&format!("bad number {s:?}"))),
            }
        };
        let pns_free = match field(idx[8]) {
            "" => None,
            "true" => Some(true),
            "false" => Some(false),
            s => return Err(bad(&format!("bad flag {s:?}"))),
        };
        rows.push(ScanRow {
            v2: num(idx[0])?,
            v6: num(idx[1])?,
            v1: num(idx[2])?,
            v3: num(idx[3])?,
            v5: num(idx[4])?,
            n0: opt(Some(idx[5]))?,
            m0: opt(Some(idx[6]))?,
            gap: opt(Some(idx[7]))?,
            pns_free,
            status: field(idx[9]).parse()?,
            table1_ref: opt(ref_idx.0)?,
            rel_dev: opt(ref_idx.1)?,
        });
    }
    Ok(rows)
}

/// Apply `key = value` lines (with `#` comments) to solver options.
///
/// Keys: n_starts, seed, grad_tol, max_iters_per_start, grid_resolution,
/// rel_tol, feas_tol, max_iter, backend, jobs.
pub fn apply_config(text: &str, opts: &mut BisectionOptions, jobs: &mut Option<usize>) -> Result<()> {
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(&format!("config line {}: expected key = value", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        let err = || bad(&format!("config line {}: bad value {v:?} for {k}", n + 1));
        let s = &mut opts.search;
        match k {
            "n_starts" => s.n_starts = v.parse().map_err(|_| err())?,
            "seed" => s.seed = v.parse().map_err(|_| err())?,
            "grad_tol" => s.grad_tol = v.parse().map_err(|_| err())?,
            "max_iters_per_start" => s.max_iters_per_start = v.parse().map_err(|_| err())?,
            "grid_resolution" => s.grid_resolution = v.parse().map_err(|_| err())?,
            "rel_tol" => opts.rel_tol = v.parse().map_err(|_| err())?,
            "feas_tol" => opts.feas_tol = v.parse().map_err(|_| err())?,
            "max_iter" => opts.max_iter = v.parse().map_err(|_| err())?,
            "backend" => opts.backend = v.parse()?,
            "jobs" => *jobs = Some(v.parse().map_err(|_| err())?),
            _ => return Err(bad(&format!("config line {}: unknown key {k:?}", n + 1))),
        }
    }
    opts.search.validate()
}
