//! CSV tables and JSON sidecars.
//!
//! Floats are written in their shortest round-trip form and columns in a
//! fixed order, so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use eosvac_core::signal::Components;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::runner::GeometryRun;

pub const RECORD_HEADER: &str = "axis,g0,g1,g_full,est_error,converged,tail";

/// One output row. `g_full` is `g0 + g1` as summed here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputRecord {
    pub axis: f64,
    pub g0: f64,
    pub g1: f64,
    pub g_full: f64,
    pub est_error: f64,
    pub converged: bool,
    pub tail: &'static str,
}

impl OutputRecord {
    /// Record for `c`, divided by `norm`.
    pub fn new(axis: f64, c: &Components, norm: f64) -> Self {
        let g0 = c.g0 / norm;
        let g1 = c.g1 / norm;
        Self {
            axis,
            g0,
            g1,
            g_full: g0 + g1,
            est_error: (c.err0 + c.err1) / norm.abs(),
            converged: c.converged,
            tail: c.tail.as_str(),
        }
    }
}

pub fn records_csv(records: &[OutputRecord]) -> String {
    let mut s = String::with_capacity(64 * (records.len() + 1));
    s.push_str(RECORD_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{:?},{:?},{:?},{:?},{:?},{},{}",
            r.axis, r.g0, r.g1, r.g_full, r.est_error, r.converged, r.tail
        );
    }
    s
}

/// `(freq_thz, density)` rows.
pub fn spectrum_csv(freq_thz: &[f64], density: &[f64]) -> String {
    let mut s = String::from("freq_thz,density\n");
    for (f, d) in freq_thz.iter().zip(density) {
        let _ = writeln!(s, "{f:?},{d:?}");
    }
    s
}

/// File stem for geometry `index` of `count`.
pub fn geometry_stem(prefix: &str, index: usize, count: usize, run: &GeometryRun) -> String {
    if count == 1 {
        prefix.to_string()
    } else {
        format!("{prefix}_{index}_{}", run.geometry.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryStats {
    pub file: String,
    pub geometry: String,
    pub points: usize,
    pub evaluations: usize,
    pub non_converged: usize,
    pub max_est_error: f64,
    pub max_imag_residue: f64,
    pub tail: String,
}

impl GeometryStats {
    pub fn new(file: String, run: &GeometryRun) -> Self {
        let max = |f: &dyn Fn(&Components) -> f64| run.points.iter().map(f).fold(0.0, f64::max);
        let tail = run.points.iter().map(|p| p.tail).max().map(|t| t.as_str()).unwrap_or("decaying");
        Self {
            file,
            geometry: run.geometry.name().to_string(),
            points: run.points.len(),
            evaluations: run.evaluations(),
            non_converged: run.non_converged(),
            max_est_error: max(&|p| p.err0 + p.err1),
            max_imag_residue: max(&|p| p.imag_residue.abs()),
            tail: tail.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Sidecar<'a, X: Serialize> {
    pub version: &'static str,
    pub command: &'static str,
    pub axis: &'static str,
    pub axis_unit: &'static str,
    /// Bulk `g⁽⁰⁾/C` that outputs were divided by, if normalized.
    pub normalization: Option<f64>,
    pub config: &'a RunConfig,
    pub geometries: Vec<GeometryStats>,
    pub extra: X,
}

pub fn sidecar_json<X: Serialize>(sidecar: &Sidecar<'_, X>) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(sidecar).map_err(|e| CliError::Other(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes all files after the computation has finished.
pub fn write_all(out_dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Other(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use eosvac_core::signal::TailDiagnostic;

    fn comp(g0: f64, g1: f64) -> Components {
        Components {
            g0,
            g1,
            err0: 1e-5,
            err1: 2e-5,
            imag_residue: 0.0,
            n_evaluations: 10,
            converged: true,
            tail: TailDiagnostic::Decaying,
        }
    }

    #[test]
    fn full_is_the_sum_of_the_written_parts() {
        let r = OutputRecord::new(1.5, &comp(0.1, 0.2), 1.0);
        assert_eq!(r.g_full, r.g0 + r.g1);
        assert_eq!(r.est_error, 1e-5 + 2e-5);
    }

    #[test]
    fn floats_round_trip_through_text() {
        let r = OutputRecord::new(0.1, &comp(1.0 / 3.0, -2.0e-17), 0.7);
        let csv = records_csv(&[r]);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[1].parse::<f64>().unwrap().to_bits(), r.g0.to_bits());
        assert_eq!(row[2].parse::<f64>().unwrap().to_bits(), r.g1.to_bits());
        assert_eq!(row[5], "true");
        assert_eq!(row[6], "decaying");
        assert!(csv.starts_with(RECORD_HEADER));
    }
}
