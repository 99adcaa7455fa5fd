use std::io::{self, Write};

use qclone::linalg::ComplexMatrix;
use serde::Serialize;

use crate::{Failure, Format};

/// One (M, trial) row of a sweep. Column order is fixed by field order.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub f_measured: f64,
    pub f_predicted: f64,
    pub residual: f64,
    /// Max entrywise dense-vs-closed-form gap; absent above the dense cap.
    pub oracle_gap: Option<f64>,
    pub wall_time_ms: f64,
}

/// Entries of a 2×2 single-qubit output, real and imaginary parts.
#[derive(Debug, Clone, Serialize)]
pub struct Marginal {
    pub m00_re: f64,
    pub m00_im: f64,
    pub m01_re: f64,
    pub m01_im: f64,
    pub m10_re: f64,
    pub m10_im: f64,
    pub m11_re: f64,
    pub m11_im: f64,
}

impl From<&ComplexMatrix> for Marginal {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            m00_re: m[(0, 0)].re,
            m00_im: m[(0, 0)].im,
            m01_re: m[(0, 1)].re,
            m01_im: m[(0, 1)].im,
            m10_re: m[(1, 0)].re,
            m10_im: m[(1, 0)].im,
            m11_re: m[(1, 1)].re,
            m11_im: m[(1, 1)].im,
        }
    }
}

// csv cannot serialize flattened structs, so the marginal is spelled out.
#[derive(Debug, Clone, Serialize)]
pub struct CloneRecord {
    #[serde(rename = "M")]
    pub m: usize,
    pub path: &'static str,
    pub m00_re: f64,
    pub m00_im: f64,
    pub m01_re: f64,
    pub m01_im: f64,
    pub m10_re: f64,
    pub m10_im: f64,
    pub m11_re: f64,
    pub m11_im: f64,
    /// Absent when the input Bloch vector is zero.
    pub f: Option<f64>,
    pub residual: Option<f64>,
    pub f_predicted: f64,
}

impl CloneRecord {
    pub fn new(
        m: usize,
        path: &'static str,
        marginal: Marginal,
        fit: Option<(f64, f64)>,
        f_predicted: f64,
    ) -> Self {
        Self {
            m,
            path,
            m00_re: marginal.m00_re,
            m00_im: marginal.m00_im,
            m01_re: marginal.m01_re,
            m01_im: marginal.m01_im,
            m10_re: marginal.m10_re,
            m10_im: marginal.m10_im,
            m11_re: marginal.m11_re,
            m11_im: marginal.m11_im,
            f: fit.map(|x| x.0),
            residual: fit.map(|x| x.1),
            f_predicted,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BaselineRow {
    pub machine: &'static str,
    pub m00_re: f64,
    pub m01_re: f64,
    pub m01_im: f64,
    pub m11_re: f64,
    pub trace_distance: f64,
    pub probability: f64,
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure::Check(format!("writing output: {e}"))
}

/// Writes rows to stdout: CSV with a header, or a JSON array.
pub fn emit<T: Serialize>(rows: &[T], format: Format) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for r in rows {
                w.serialize(r).map_err(io_failure)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows).map_err(io_failure)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Single-record variant: CSV header plus one row, or a JSON object.
pub fn emit_one<T: Serialize>(row: &T, format: Format) -> Result<(), Failure> {
    match format {
        Format::Csv => emit(std::slice::from_ref(row), format),
        Format::Json => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            serde_json::to_writer_pretty(&mut out, row).map_err(io_failure)?;
            writeln!(out)?;
            Ok(())
        }
    }
}
