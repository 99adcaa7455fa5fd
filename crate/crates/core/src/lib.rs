//! Universal 2→M cloning of two identical mixed qubits.
//!
//! Modules, bottom up:
//!
//! - [`linalg`]: dense complex matrices, Kronecker products, partial traces,
//!   density validation and trace distance.
//! - [`states`]: single-qubit densities, Bloch vectors, seeded sampling and
//!   the triplet/singlet expansion of `ρ⊗ρ`.
//! - [`dicke`]: Dicke states, their phased partners, the χ basis.
//! - [`cloner`]: coefficients, isometry, channel, closed-form reduction and
//!   shrinking-factor fit.
//! - [`baseline`]: symmetric-projection cloning at 2→2 for comparison.

pub mod baseline;
pub mod cloner;
pub mod dicke;
mod error;
pub mod linalg;
pub mod states;

pub use error::{Error, Result, Violation, ViolationReport};
pub use num_complex::Complex64;
