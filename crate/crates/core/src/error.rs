use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dense dimension {requested} exceeds limit {limit}")]
    DimensionLimit { requested: usize, limit: usize },

    #[error("dense path refuses M = {m} (limit {max_qubits} qubits); use the analytic path")]
    DenseCapExceeded { m: usize, max_qubits: usize },

    #[error("not a density operator: {0}")]
    InvalidDensity(ViolationReport),

    #[error("shrinking factor unidentifiable: input Bloch vector norm {0:e} is below 1e-12")]
    Unidentifiable(f64),
}

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

/// A density-operator invariant that failed, with its measured magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    /// Largest entry of `|m - m†|`.
    NotHermitian { deviation: f64 },
    /// Real part of the trace.
    Trace { trace: f64 },
    /// Smallest eigenvalue of the Hermitian part.
    NotPositive { min_eigenvalue: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotHermitian { deviation } => {
                write!(f, "hermiticity deviation {deviation:e}")
            }
            Violation::Trace { trace } => write!(f, "trace = {trace}"),
            Violation::NotPositive { min_eigenvalue } => {
                write!(f, "minimum eigenvalue {min_eigenvalue:e}")
            }
        }
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
