//! File formats: dataset CSV (`y,x1..xd`), trace CSV (`iter,held,beta_1..`)
//! with a JSON sidecar, and the sweep CSV.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always give equal bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diagnostics::{SweepRow, Trace};
use crate::models::Dataset;
use crate::{Error, Result};

/// Reads a dataset; `entry_bound` is validated against every entry.
pub fn read_dataset_csv(path: &Path, entry_bound: Option<f64>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header = rdr.headers()?.clone();
    let d = header.len().saturating_sub(1);
    if header.get(0) != Some("y") || d == 0 || (1..=d).any(|j| header.get(j) != Some(format!("x{j}").as_str())) {
        return Err(Error::data(format!("{}: header must be y,x1,...,xd", path.display())));
    }
    let (mut ys, mut xs) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::data(format!("{} row {}: {e}", path.display(), line + 2)))?;
        ys.push(row[0]);
        xs.extend_from_slice(&row[1..]);
    }
    let n = ys.len();
    Dataset::new(DMatrix::from_row_slice(n, d, &xs), DVector::from_vec(ys), entry_bound)
}

pub fn write_dataset_csv<W: Write>(mut w: W, data: &Dataset) -> Result<()> {
    let mut head = String::from("y");
    for j in 1..=data.d() {
        head.push_str(&format!(",x{j}"));
    }
    writeln!(w, "{head}")?;
    for i in 0..data.n() {
        write!(w, "{}", data.y[i])?;
        for j in 0..data.d() {
            write!(w, ",{}", data.x[(i, j)])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Writes the trace CSV. `iter` counts transitions from 1; `held` is 0/1.
pub fn write_trace_csv<W: Write>(mut w: W, trace: &Trace) -> Result<()> {
    writeln!(w, "iter,held,{}", trace.column_names().join(","))?;
    for i in 0..trace.len() {
        write!(w, "{},{}", i + 1, u8::from(trace.held()[i]))?;
        for v in trace.row(i) {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Reads a trace CSV back; run metadata lives in the sidecar and is left
/// at defaults.
pub fn read_trace_csv(path: &Path, model: &str) -> Result<Trace> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header = rdr.headers()?.clone();
    let names: Vec<&str> = header.iter().skip(2).collect();
    let has_v = names.last() == Some(&"v");
    let d = names.len() - usize::from(has_v);
    let mut t = Trace::new(model, 0, 0.0, 0, d, has_v);
    for rec in rdr.records() {
        let rec = rec?;
        let held = rec.get(1) == Some("1");
        let row = rec
            .iter()
            .skip(2)
            .map(|f| f.parse::<f64>().map_err(|e| Error::data(format!("{}: {e}", path.display()))))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != t.cols() {
            return Err(Error::data(format!("{}: ragged row", path.display())));
        }
        t.push(row, held);
    }
    Ok(t)
}

/// JSON sidecar of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub seed: u64,
    pub zeta: f64,
    pub model: String,
    pub n: usize,
    pub d: usize,
    pub runtime_ns_per_iter: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accept_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl TraceMeta {
    pub fn of(trace: &Trace, config_hash: Option<&str>) -> Self {
        Self {
            seed: trace.seed,
            zeta: trace.zeta,
            model: trace.model.clone(),
            n: trace.n,
            d: trace.d,
            runtime_ns_per_iter: trace.ns_per_iter,
            accept_rate: trace.accept_rate,
            config_hash: config_hash.map(str::to_string),
        }
    }
}

/// `dir/name.csv` becomes `dir/name.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.meta.json"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes `path` (trace CSV) and its sidecar.
pub fn write_trace(path: &Path, trace: &Trace, config_hash: Option<&str>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trace_csv(&mut w, trace)?;
    w.flush()?;
    write_json(&sidecar_path(path), &TraceMeta::of(trace, config_hash))
}

/// Writes sweep rows under the header
/// `model,n,d,replicate,seed,iat,ess,ns_per_iter,slope_context`.
pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "model,n,d,replicate,seed,iat,ess,ns_per_iter,slope_context")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.model, r.n, r.d, r.replicate, r.seed, r.iat, r.ess, r.ns_per_iter, r.slope_context
        )?;
    }
    Ok(())
}

/// Writes `contents` to `path`, creating the file.
pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        let data = Dataset::new(DMatrix::from_row_slice(2, 2, &[0.1, -0.3, 1.0 / 3.0, 0.0]), DVector::from_vec(vec![1.0, 0.0]), None)
            .unwrap();
        write_dataset_csv(File::create(&p).unwrap(), &data).unwrap();
        let back = read_dataset_csv(&p, Some(1.0)).unwrap();
        assert_eq!(back.x, data.x);
        assert_eq!(back.y, data.y);
        assert!(read_dataset_csv(&p, Some(0.2)).is_err());
    }

    #[test]
    fn trace_round_trip_and_empty_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let mut t = Trace::new("lasso", 3, 0.5, 4, 2, true);
        t.push([0.25, -1.5, 2.0], true);
        t.push([1e-300, 3.0, 0.1], false);
        write_trace(&p, &t, Some("abc")).unwrap();
        let back = read_trace_csv(&p, "lasso").unwrap();
        assert_eq!(back.row(1), t.row(1));
        assert_eq!(back.held(), t.held());
        assert!(dir.path().join("t.meta.json").exists());

        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &Trace::new("probit", 0, 0.5, 3, 2, false)).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iter,held,beta_1,beta_2\n");
    }
}
