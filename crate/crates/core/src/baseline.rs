//! Symmetric-projection cloning at 2→2: project `ρ⊗ρ` onto the triplet
//! subspace and renormalize. Not universal for mixed inputs.

use num_complex::Complex64;

use crate::dicke::chi_basis;
use crate::error::Result;
use crate::linalg::{
    partial_trace_matrix, tensor_product, trace_distance, ComplexMatrix, MultipartiteDensity,
};
use crate::states::QubitDensity;

/// Projector onto `span(χ_0, χ_1, χ_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricProjector {
    matrix: ComplexMatrix,
}

impl SymmetricProjector {
    pub fn new() -> Self {
        let chi = chi_basis();
        let matrix = chi[..3]
            .iter()
            .map(|v| ComplexMatrix::outer(v, v))
            .fold(ComplexMatrix::zeros(4, 4), |acc, p| &acc + &p);
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl Default for SymmetricProjector {
    fn default() -> Self {
        Self::new()
    }
}

/// Conditional output of the projection machine.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionOutcome {
    /// Single-qubit marginal of `P(ρ⊗ρ)P / Tr[P(ρ⊗ρ)P]`; both qubits agree.
    pub marginal: QubitDensity,
    /// `Tr[P(ρ⊗ρ)P] = 1 − det ρ`
    pub probability: f64,
}

pub fn werner_2to2(rho: &QubitDensity) -> Result<ProjectionOutcome> {
    let p = SymmetricProjector::new();
    let two = tensor_product(&rho.to_matrix(), &rho.to_matrix())?;
    let projected = &(p.matrix() * &two) * p.matrix();
    // det ρ ≤ 1/4, so the probability is at least 3/4
    let probability = projected.trace().re;
    let (m, _) = partial_trace_matrix(&projected, &[2, 2], &[0])?;
    let m = m.scale(Complex64::new(1.0 / probability, 0.0));
    let marginal = QubitDensity::new(m[(0, 0)].re, (m[(0, 1)] + m[(1, 0)].conj()) * 0.5)?;
    Ok(ProjectionOutcome {
        marginal,
        probability,
    })
}

/// Trace distance between the projection machine's conditional output and
/// its input.
pub fn nonuniversality_gap(rho: &QubitDensity) -> Result<f64> {
    let out = werner_2to2(rho)?;
    trace_distance(&out.marginal.to_density(), &rho.to_density())
}

/// Same gap for the 2→2 cloner, which leaves `ρ⊗ρ` untouched.
pub fn cloner_gap_at_two(rho: &QubitDensity) -> Result<f64> {
    let out = crate::cloner::clone_channel(rho, 2)?;
    let r: MultipartiteDensity = crate::cloner::reduced_single_qubit(&out, 0)?;
    trace_distance(&r, &rho.to_density())
}
