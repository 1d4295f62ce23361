//! Versioned CSV rows of the scaling harness and their summary.

use std::io::{Read, Write};

use ddeg_core::pipeline::ExperimentRecord;
use ddeg_core::Fraction;
use serde::Serialize;
use thiserror::Error;

pub const SCHEMA: &str = "v1";

pub const COLUMNS: [&str; 11] = [
    SCHEMA,
    "N",
    "seed",
    "delta",
    "distinct_count",
    "u_size",
    "uprime_size",
    "balanced_size",
    "retries_used",
    "wall_ms",
    "error",
];

/// One `(N, trial)` outcome. Failed trials keep `distinct_count = 0` and
/// carry the error text.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub record: ExperimentRecord,
    pub error: Option<String>,
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("unsupported schema version '{0}' (expected {SCHEMA})")]
    Version(String),
    #[error("row {row}: {msg}")]
    Field { row: usize, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub fn write_csv<W: Write>(out: W, rows: &[ScalingRow]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        let r = &row.record;
        w.write_record([
            SCHEMA.to_string(),
            r.n.to_string(),
            r.seed.to_string(),
            r.delta.to_string(),
            r.distinct_count.to_string(),
            r.u_size.to_string(),
            r.uprime_size.to_string(),
            r.balanced_size.to_string(),
            r.retries_used.to_string(),
            r.wall_ms.to_string(),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ScalingRow>, CsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.clone();
    if header.get(0) != Some(SCHEMA) {
        return Err(CsvError::Version(header.get(0).unwrap_or("").to_string()));
    }
    if header.iter().ne(COLUMNS) {
        return Err(CsvError::Field { row: 0, msg: "unexpected columns".into() });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.get(0) != Some(SCHEMA) {
            return Err(CsvError::Version(rec.get(0).unwrap_or("").to_string()));
        }
        let field = |j: usize| rec.get(j).unwrap_or("");
        let num = |j: usize| -> Result<u64, CsvError> {
            field(j).parse().map_err(|_| CsvError::Field { row, msg: format!("bad {} '{}'", COLUMNS[j], field(j)) })
        };
        let delta: Fraction =
            field(3).parse().map_err(|_| CsvError::Field { row, msg: format!("bad delta '{}'", field(3)) })?;
        let error = Some(field(10).to_string()).filter(|e| !e.is_empty());
        rows.push(ScalingRow {
            record: ExperimentRecord {
                n: num(1)? as usize,
                seed: num(2)?,
                delta,
                distinct_count: num(4)? as usize,
                u_size: num(5)? as usize,
                uprime_size: num(6)? as usize,
                balanced_size: num(7)? as usize,
                retries_used: num(8)? as u32,
                wall_ms: num(9)?,
            },
            error,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub log2_n: f64,
    pub trials: usize,
    pub failures: usize,
    pub mean: f64,
    pub stddev: f64,
    pub log2_mean: f64,
}

/// Per-`N` statistics over successful trials and the least-squares slope
/// of `log2(mean distinct_count)` against `log2 N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSummary {
    pub schema: &'static str,
    pub points: Vec<ScalingPoint>,
    pub slope: Option<f64>,
    pub insufficient_points: bool,
}

pub fn summarize(rows: &[ScalingRow]) -> ScalingSummary {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.record.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut points = Vec::new();
    for n in ns {
        let of_n: Vec<&ScalingRow> = rows.iter().filter(|r| r.record.n == n).collect();
        let ok: Vec<f64> =
            of_n.iter().filter(|r| r.error.is_none()).map(|r| r.record.distinct_count as f64).collect();
        let failures = of_n.len() - ok.len();
        if ok.is_empty() {
            points.push(ScalingPoint {
                n,
                log2_n: (n as f64).log2(),
                trials: of_n.len(),
                failures,
                mean: 0.0,
                stddev: 0.0,
                log2_mean: f64::NAN,
            });
            continue;
        }
        let mean = ok.iter().sum::<f64>() / ok.len() as f64;
        let stddev = if ok.len() > 1 {
            (ok.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (ok.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        points.push(ScalingPoint {
            n,
            log2_n: (n as f64).log2(),
            trials: of_n.len(),
            failures,
            mean,
            stddev,
            log2_mean: mean.log2(),
        });
    }
    let usable: Vec<(f64, f64)> =
        points.iter().filter(|p| p.mean > 0.0).map(|p| (p.log2_n, p.log2_mean)).collect();
    let slope = (usable.len() >= 3).then(|| least_squares_slope(&usable));
    ScalingSummary { schema: SCHEMA, points, slope, insufficient_points: slope.is_none() }
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
