//! Reading and writing transition matrices.
//!
//! JSON files hold `{"labels": [...], "P": [[...], ...]}` with `labels`
//! optional. CSV files hold the square matrix, optionally preceded by a header
//! row of labels. Rows must sum to 1 within [`LOAD_TOL`]; rows inside that
//! tolerance are rescaled so the loaded chain is exactly stochastic.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FiniteChain, ROW_SUM_TOL};
use crate::error::{Error, Result};

pub const LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Serialize, Deserialize)]
struct ChainFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(rename = "P")]
    p: Vec<Vec<f64>>,
}

fn build(mut rows: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<FiniteChain> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidChain("no rows".into()));
    }
    for (i, row) in rows.iter_mut().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidChain(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidChain(format!("row {i}: entry {j} = {} is not a probability", row[j])));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > LOAD_TOL {
            return Err(Error::InvalidChain(format!("row {i} sums to {s}, not 1")));
        }
        if (s - 1.0).abs() > ROW_SUM_TOL {
            row.iter_mut().for_each(|v| *v /= s);
        }
    }
    let chain = FiniteChain::from_rows(&rows)?;
    match labels {
        Some(l) => chain.with_labels(l),
        None => Ok(chain),
    }
}

pub fn from_json_str(s: &str) -> Result<FiniteChain> {
    let f: ChainFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    build(f.p, f.labels)
}

pub fn to_json_string(chain: &FiniteChain) -> String {
    let f = ChainFile {
        labels: chain.labels().map(<[String]>::to_vec),
        p: chain.rows(),
    };
    serde_json::to_string(&f).expect("chain serialises")
}

pub fn from_csv_str(s: &str) -> Result<FiniteChain> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(s.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec);
    }
    let mut labels = None;
    let mut rows = Vec::with_capacity(records.len());
    for (k, rec) in records.iter().enumerate() {
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if k == 0 => labels = Some(rec.iter().map(str::to_owned).collect()),
            Err(e) => {
                let i = k - usize::from(labels.is_some());
                return Err(Error::Parse(format!("row {i}: {e}")));
            }
        }
    }
    build(rows, labels)
}

pub fn to_csv_string(chain: &FiniteChain) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(l) = chain.labels() {
        w.write_record(l).expect("in-memory write");
    }
    for row in chain.rows() {
        w.write_record(row.iter().map(f64::to_string)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Loads a chain, choosing the format from the extension (`.json` or else CSV),
/// or from the first character when there is no extension.
pub fn load(path: &Path) -> Result<FiniteChain> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let is_json = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => ext.eq_ignore_ascii_case("json"),
        None => text.trim_start().starts_with('{'),
    };
    if is_json {
        from_json_str(&text)
    } else {
        from_csv_str(&text)
    }
}
