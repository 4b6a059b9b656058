//! CSV and JSON artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{GramSidecar, HarnessError};
use crate::svm::GramMatrix;

fn io_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

/// `dir/stem.suffix` for an output file `dir/stem.ext`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// Gram matrix as CSV with shape ids as row and column headers. Values use
/// the shortest representation that round-trips.
pub fn gram_to_csv(gram: &GramMatrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("shape_id")
        .chain(gram.ids.iter().map(String::as_str))
        .collect();
    w.write_record(&header).expect("in-memory write");
    for (i, id) in gram.ids.iter().enumerate() {
        let row: Vec<String> = std::iter::once(id.clone())
            .chain(gram.row(i).iter().map(|v| v.to_string()))
            .collect();
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

pub fn write_gram(path: &Path, gram: &GramMatrix, sidecar: &GramSidecar) -> Result<(), HarnessError> {
    fs::write(path, gram_to_csv(gram)).map_err(|e| io_err(path, e))?;
    write_json(&sibling(path, "json"), sidecar)
}

/// Reads a Gram CSV, picking up tags and fingerprint from its sidecar when
/// present.
pub fn read_gram(path: &Path) -> Result<GramMatrix, HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header = reader.headers().map_err(|e| io_err(path, e))?.clone();
    let ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = ids.len();
    let mut values = Vec::with_capacity(n * n);
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        if rec.len() != n + 1 || rec.get(0) != ids.get(i).map(String::as_str) {
            return Err(io_err(path, format!("row {} does not match the header", i + 1)));
        }
        for v in rec.iter().skip(1) {
            values.push(v.parse::<f64>().map_err(|e| io_err(path, e))?);
        }
    }
    let mut gram = GramMatrix::new(ids, values)?;
    let side = sibling(path, "json");
    if side.exists() {
        let text = fs::read_to_string(&side).map_err(|e| io_err(&side, e))?;
        let meta: GramSidecar = serde_json::from_str(&text).map_err(|e| io_err(&side, e))?;
        gram.tags = meta.tags;
        gram.fingerprint = meta.fingerprint;
    }
    Ok(gram)
}
