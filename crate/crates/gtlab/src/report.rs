//! CSV output: one row per (grid point, algorithm).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::sweep::SweepRow;
use crate::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub point: usize,
    pub mu: f64,
    pub entropy: f64,
    pub algorithm: String,
    pub mean_tests: f64,
    pub std_tests: f64,
    /// Empty when too few trials were run for a normal-approximation interval.
    pub ci95: Option<f64>,
    pub bound_ours: f64,
    pub bound_ours_iid: f64,
    pub bound_li: f64,
    pub bound_kealy: f64,
    pub entropy_lb: f64,
}

pub const CSV_HEADER: &str =
    "point,mu,entropy,algorithm,mean_tests,std_tests,ci95,bound_ours,bound_ours_iid,bound_li,bound_kealy,entropy_lb";

pub fn csv_rows(rows: &[SweepRow]) -> Vec<CsvRow> {
    rows.iter()
        .flat_map(|row| {
            row.stats.iter().map(move |s| CsvRow {
                point: row.point,
                mu: row.mu,
                entropy: row.entropy,
                algorithm: s.algorithm.name().to_owned(),
                mean_tests: s.mean_tests,
                std_tests: s.std_tests,
                ci95: s.ci95,
                bound_ours: row.bounds.ours_inid,
                bound_ours_iid: row.bounds.ours_iid,
                bound_li: row.bounds.li,
                bound_kealy: row.bounds.kealy,
                entropy_lb: row.bounds.entropy_lb,
            })
        })
        .collect()
}

pub fn write_csv_rows<W: std::io::Write>(rows: &[CsvRow], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| HarnessError::Io { path: path.to_owned(), source })?;
    write_csv_rows(&csv_rows(rows), std::io::BufWriter::new(file))
}

/// Reads a sweep CSV; the header must match [`CSV_HEADER`] exactly.
pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?;
    if !header.iter().eq(CSV_HEADER.split(',')) {
        return Err(HarnessError::Schema { path: path.to_owned(), found: header.iter().collect::<Vec<_>>().join(",") });
    }
    reader.deserialize().map(|r| r.map_err(HarnessError::from)).collect()
}
