//! Refractive-index tables.

use std::path::Path;

use eosvac_core::constants::thz_to_rad_per_s;
use eosvac_core::dispersion::IndexTable;
use eosvac_core::Complex64;
use log::{info, warn};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
struct Row {
    freq_thz: f64,
    re_n: f64,
    im_n: f64,
}

/// Reads a `freq_thz,re_n,im_n` CSV. Rows are sorted, duplicates dropped
/// and negative `Im n` projected to zero by [`IndexTable::from_rows`].
pub fn ingest_index_table(path: &Path) -> Result<IndexTable, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    read_index_table(file, &path.display().to_string())
}

pub fn read_index_table<R: std::io::Read>(reader: R, name: &str) -> Result<IndexTable, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| CliError::Data(format!("{name}: {e}")))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["freq_thz", "re_n", "im_n"] {
        return Err(CliError::Data(format!("{name}: header must be freq_thz,re_n,im_n")));
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<Row>() {
        let row = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::Data(format!("{name}: malformed row at line {line}: {e}"))
        })?;
        rows.push((thz_to_rad_per_s(row.freq_thz), Complex64::new(row.re_n, row.im_n)));
    }
    let table = IndexTable::from_rows(rows).map_err(|e| CliError::Data(format!("{name}: {e}")))?;
    let s = table.stats();
    info!(
        "{name}: {} rows read, {} kept, {} duplicates removed, {} projected to Im n = 0",
        s.rows_in,
        table.len(),
        s.duplicates_removed,
        s.passivity_projected
    );
    if s.passivity_projected > 0 {
        warn!("{name}: {} rows had Im n < 0", s.passivity_projected);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let t = read_index_table("freq_thz,re_n,im_n\n1.0,3.0,0.1\n2.0,3.2,0.2\n".as_bytes(), "t").unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn negative_absorption_is_projected_and_counted() {
        let t = read_index_table("freq_thz,re_n,im_n\n1.0,3.0,-0.01\n2.0,3.2,0.2\n".as_bytes(), "t").unwrap();
        assert_eq!(t.values()[0].im, 0.0);
        assert_eq!(t.stats().passivity_projected, 1);
    }

    #[test]
    fn malformed_row_reports_line() {
        let e = read_index_table("freq_thz,re_n,im_n\n1.0,3.0,0.0\n2.0,abc,0.0\n".as_bytes(), "t").unwrap_err();
        match e {
            CliError::Data(m) => assert!(m.contains("line 3"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_row_is_rejected() {
        let e = read_index_table("freq_thz,re_n,im_n\n1.0,3.0,0.0\n".as_bytes(), "t").unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_index_table("f,n,k\n1,2,3\n".as_bytes(), "t").is_err());
    }
}
