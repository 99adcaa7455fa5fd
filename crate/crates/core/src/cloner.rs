//! The 2→M cloning machine for two identical mixed qubits.
//!
//! The machine maps the triplet states `χ_0, χ_1, χ_2` and the singlet `χ_3`
//! onto weighted sums of M-qubit Dicke states entangled with an ancilla:
//!
//! ```text
//! U χ_j ⊗ R = Σ_k α_{jk} |(M−j−k)↑, (j+k)↓⟩ ⊗ R_k        j = 0, 1, 2
//! U χ_3 ⊗ R = Σ_k α_{1k} |~(M−1−k)↑, (1+k)↓⟩ ⊗ R_k
//! ```
//!
//! with `k = 0..=M−2` and `R_k` orthonormal. The ancilla is modeled as one
//! `(M−1)`-dimensional factor placed after the M output qubits. Every
//! single-qubit output is `f ρ + (1−f)/2 I` with `f = (M+2)/(2M)`.
//!
//! Two evaluation routes are provided. The dense route builds the isometry
//! and pushes `ρ⊗ρ` through it (`M ≤ max_qubits`, 12 by default). The
//! analytic route assembles the single-qubit output from per-block closed
//! forms and works for any M.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::dicke::DickeSpec;
use crate::error::{arg, Error, Result};
use crate::linalg::{ComplexMatrix, MultipartiteDensity, DENSE_DIM_LIMIT, ONE, ZERO};
use crate::states::{bloch_from_density, two_copy_expand, BlochVector, QubitDensity};

pub const DEFAULT_MAX_QUBITS: usize = 12;

fn check_copies(m: usize) -> Result<()> {
    if m < 2 {
        return arg(format!("copy count M = {m} must be at least 2"));
    }
    Ok(())
}

/// `ln(n! / d!)`, summing `ln i` over the shorter side in ascending `i`.
fn ln_factorial_ratio(n: usize, d: usize) -> f64 {
    if n >= d {
        ((d + 1)..=n).map(|i| (i as f64).ln()).sum()
    } else {
        -((n + 1)..=d).map(|i| (i as f64).ln()).sum::<f64>()
    }
}

fn ln_factorial(n: usize) -> f64 {
    ln_factorial_ratio(n, 0)
}

/// `ln α_{jk}²`, grouping the factorials of the coefficient formula into
/// ratios whose ranges never exceed three terms:
///
/// `ln 6 + ln[(M−2)!/(M+1)!] + ln[(M−j−k)!/(M−2−k)!] + ln[(j+k)!/k!] − ln[(2−j)! j!]`
fn ln_alpha_sq(m: usize, j: usize, k: usize) -> f64 {
    6f64.ln()
        + ln_factorial_ratio(m - 2, m + 1)
        + ln_factorial_ratio(m - j - k, m - 2 - k)
        + ln_factorial_ratio(j + k, k)
        - ln_factorial(2 - j)
        - ln_factorial(j)
}

/// Amplitude `α_{jk}` of the `k`-th ancilla branch for input sector `j`.
pub fn alpha(m: usize, j: usize, k: usize) -> Result<f64> {
    check_copies(m)?;
    if j > 2 {
        return arg(format!("sector j = {j} outside 0..=2"));
    }
    if k > m - 2 {
        return arg(format!("branch k = {k} outside 0..={}", m - 2));
    }
    Ok((0.5 * ln_alpha_sq(m, j, k)).exp())
}

/// All `α_{jk}` for one M.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneCoefficients {
    m: usize,
    alpha: [Vec<f64>; 3],
}

impl CloneCoefficients {
    pub fn new(m: usize) -> Result<Self> {
        check_copies(m)?;
        let row = |j| {
            (0..=m - 2)
                .map(|k| (0.5 * ln_alpha_sq(m, j, k)).exp())
                .collect()
        };
        Ok(Self {
            m,
            alpha: [row(0), row(1), row(2)],
        })
    }

    pub fn copies(&self) -> usize {
        self.m
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.alpha[j][k]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.alpha[j]
    }

    /// `max_j |Σ_k α_{jk}² − 1|`
    pub fn normalization_error(&self) -> f64 {
        self.alpha
            .iter()
            .map(|row| (row.iter().map(|a| a * a).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// The cloning map restricted to `span(χ_0..χ_3) ⊗ R`.
///
/// `matrix` has `2^M · (M−1)` rows (output qubits, then ancilla) and four
/// columns, one per `χ_j`.
#[derive(Debug, Clone)]
pub struct CloningIsometry {
    m: usize,
    matrix: ComplexMatrix,
}

impl CloningIsometry {
    pub fn build(m: usize) -> Result<Self> {
        Self::build_with_limit(m, DEFAULT_MAX_QUBITS)
    }

    pub fn build_with_limit(m: usize, max_qubits: usize) -> Result<Self> {
        check_copies(m)?;
        if m > max_qubits || m >= usize::BITS as usize - 8 {
            return Err(Error::DenseCapExceeded { m, max_qubits });
        }
        let coeffs = CloneCoefficients::new(m)?;
        let anc = m - 1;
        let mut matrix = ComplexMatrix::zeros((1usize << m) * anc, 4);
        for k in 0..anc {
            let sectors = [
                (0, DickeSpec::unphased(m - k, k)?, coeffs.get(0, k)),
                (1, DickeSpec::unphased(m - 1 - k, 1 + k)?, coeffs.get(1, k)),
                (2, DickeSpec::unphased(m - 2 - k, 2 + k)?, coeffs.get(2, k)),
                (3, DickeSpec::phased(m - 1 - k, 1 + k)?, coeffs.get(1, k)),
            ];
            for (col, spec, a) in sectors {
                for (label, amp) in spec.terms_sparse() {
                    matrix[(label * anc + k, col)] = amp * a;
                }
            }
        }
        Ok(Self { m, matrix })
    }

    pub fn copies(&self) -> usize {
        self.m
    }

    pub fn ancilla_dim(&self) -> usize {
        self.m - 1
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `max |V†V − I₄|`
    pub fn isometry_error(&self) -> f64 {
        let gram = &self.matrix.adjoint() * &self.matrix;
        gram.max_abs_diff(&ComplexMatrix::identity(4))
    }

    /// `Tr_R V C V†` for an operator `C = Σ c_ij χ_i χ_j†` on the input
    /// span, contracted one ancilla branch at a time.
    pub fn apply(&self, c: &[[Complex64; 4]; 4]) -> ComplexMatrix {
        let dim = 1usize << self.m;
        let anc = self.ancilla_dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for k in 0..anc {
            let rows: Vec<(usize, [Complex64; 4])> = (0..dim)
                .filter_map(|s| {
                    let r = s * anc + k;
                    let v = [
                        self.matrix[(r, 0)],
                        self.matrix[(r, 1)],
                        self.matrix[(r, 2)],
                        self.matrix[(r, 3)],
                    ];
                    v.iter().any(|z| *z != ZERO).then_some((s, v))
                })
                .collect();
            // u[b]_i = Σ_j c_ij conj(v_j[b])
            let u: Vec<[Complex64; 4]> = rows
                .iter()
                .map(|(_, v)| std::array::from_fn(|i| (0..4).map(|j| c[i][j] * v[j].conj()).sum()))
                .collect();
            for (a, va) in &rows {
                for ((b, _), ub) in rows.iter().zip(&u) {
                    let add: Complex64 = (0..4).map(|i| va[i] * ub[i]).sum();
                    out[(*a, *b)] += add;
                }
            }
        }
        out
    }

    /// Full `V C V†` on output qubits ⊗ ancilla, without tracing anything
    /// out. Only for small M: the side is `2^M (M−1)`.
    pub fn joint_output(&self, c: &[[Complex64; 4]; 4]) -> Result<(ComplexMatrix, Vec<usize>)> {
        let side = self.matrix.rows();
        if side > DENSE_DIM_LIMIT {
            return Err(Error::DimensionLimit {
                requested: side,
                limit: DENSE_DIM_LIMIT,
            });
        }
        let cm = ComplexMatrix::from_fn(4, 4, |i, j| c[i][j]);
        let joint = &(&self.matrix * &cm) * &self.matrix.adjoint();
        let mut dims = vec![2; self.m];
        dims.push(self.ancilla_dim());
        Ok((joint, dims))
    }

    pub fn clone_state(&self, rho: &QubitDensity) -> MultipartiteDensity {
        let out = self.apply(&two_copy_expand(rho).coeff);
        MultipartiteDensity::from_trusted(out, vec![2; self.m])
    }
}

/// Dense-path front end with a per-M isometry cache.
///
/// Each slot is initialized at most once; readers never block each other
/// once a slot is filled.
#[derive(Debug)]
pub struct Cloner {
    max_qubits: usize,
    slots: Vec<OnceLock<Arc<CloningIsometry>>>,
}

impl Cloner {
    pub fn new(max_qubits: usize) -> Self {
        Self {
            max_qubits,
            slots: (0..=max_qubits).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn max_qubits(&self) -> usize {
        self.max_qubits
    }

    pub fn supports_dense(&self, m: usize) -> bool {
        (2..=self.max_qubits).contains(&m)
    }

    pub fn isometry(&self, m: usize) -> Result<Arc<CloningIsometry>> {
        check_copies(m)?;
        let Some(slot) = self.slots.get(m) else {
            return Err(Error::DenseCapExceeded {
                m,
                max_qubits: self.max_qubits,
            });
        };
        if let Some(iso) = slot.get() {
            return Ok(Arc::clone(iso));
        }
        let built = Arc::new(CloningIsometry::build_with_limit(m, self.max_qubits)?);
        Ok(Arc::clone(slot.get_or_init(|| built)))
    }

    pub fn clone_channel(&self, rho: &QubitDensity, m: usize) -> Result<MultipartiteDensity> {
        Ok(self.isometry(m)?.clone_state(rho))
    }
}

impl Default for Cloner {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_QUBITS)
    }
}

fn shared_cloner() -> &'static Cloner {
    static CLONER: OnceLock<Cloner> = OnceLock::new();
    CLONER.get_or_init(Cloner::default)
}

/// M-qubit output of the machine on `ρ⊗ρ`, ancilla traced out.
pub fn clone_channel(rho: &QubitDensity, m: usize) -> Result<MultipartiteDensity> {
    shared_cloner().clone_channel(rho, m)
}

pub fn reduced_single_qubit(
    out: &MultipartiteDensity,
    which: usize,
) -> Result<MultipartiteDensity> {
    if which >= out.dims().len() {
        return arg(format!(
            "qubit {which} out of range for {} subsystems",
            out.dims().len()
        ));
    }
    out.partial_trace(&[which])
}

fn check_block(i: usize, j: usize) -> Result<()> {
    if i > 3 || j > 3 {
        return arg(format!("block ({i}, {j}) outside the 4x4 χ basis"));
    }
    if (i == 3) != (j == 3) {
        return arg(format!(
            "block ({i}, {j}) mixes triplet and singlet; its two-copy coefficient is always zero"
        ));
    }
    Ok(())
}

/// Closed-form `Tr_{M−1} ρ_ij` for the block fed by `χ_i χ_j†`.
///
/// Defined for the nine triplet blocks and `(3, 3)`. The `(0, 2)` and
/// `(2, 0)` blocks vanish: their Dicke sectors differ by two down-spins.
pub fn block_marginal_closed_form(m: usize, i: usize, j: usize) -> Result<ComplexMatrix> {
    check_copies(m)?;
    check_block(i, j)?;
    let mf = m as f64;
    let heavy = (3.0 * mf + 2.0) / (4.0 * mf);
    let light = (mf - 2.0) / (4.0 * mf);
    let hop = Complex64::new(std::f64::consts::SQRT_2 * (mf + 2.0) / (4.0 * mf), 0.0);
    let mut out = ComplexMatrix::zeros(2, 2);
    match (i, j) {
        (0, 0) => out = ComplexMatrix::from_real_diagonal(&[heavy, light]),
        (2, 2) => out = ComplexMatrix::from_real_diagonal(&[light, heavy]),
        (1, 1) | (3, 3) => out = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]),
        (0, 1) | (1, 2) => out[(0, 1)] = hop,
        (1, 0) | (2, 1) => out[(1, 0)] = hop,
        _ => {}
    }
    Ok(out)
}

/// `Tr_{M−1} ρ_ij` evaluated from the branch sums over `k` using the
/// coefficients directly; O(M) per block.
pub fn block_marginal_from_coefficients(m: usize, i: usize, j: usize) -> Result<ComplexMatrix> {
    check_copies(m)?;
    check_block(i, j)?;
    let mf = m as f64;
    let a = |j, k| (0.5 * ln_alpha_sq(m, j, k)).exp();
    let mut out = ComplexMatrix::zeros(2, 2);
    match (i, j) {
        (d, e) if d == e => {
            let sector = if d == 3 { 1 } else { d };
            let (mut up, mut down) = (0.0, 0.0);
            for k in 0..=m - 2 {
                let w = a(sector, k).powi(2);
                up += w * (m - sector - k) as f64 / mf;
                down += w * (sector + k) as f64 / mf;
            }
            out = ComplexMatrix::from_real_diagonal(&[up, down]);
        }
        (d, e) if d.abs_diff(e) == 1 => {
            let lo = d.min(e);
            let hop: f64 = (0..=m - 2)
                .map(|k| {
                    a(lo, k) * a(lo + 1, k) * (((m - lo - k) * (lo + k + 1)) as f64).sqrt() / mf
                })
                .sum();
            if d < e {
                out[(0, 1)] = Complex64::new(hop, 0.0);
            } else {
                out[(1, 0)] = Complex64::new(hop, 0.0);
            }
        }
        _ => {}
    }
    Ok(out)
}

/// Single-qubit output for any M from the two-copy coefficients and the
/// per-block closed forms.
pub fn analytic_reduced(rho: &QubitDensity, m: usize) -> Result<ComplexMatrix> {
    check_copies(m)?;
    let e = two_copy_expand(rho);
    let mut out = ComplexMatrix::zeros(2, 2);
    for i in 0..4 {
        for j in 0..4 {
            if check_block(i, j).is_err() {
                continue;
            }
            let c = e.coeff[i][j];
            if c == ZERO {
                continue;
            }
            out = &out + &block_marginal_closed_form(m, i, j)?.scale(c);
        }
    }
    Ok(out)
}

/// `(M+2)/(2M)`
pub fn predicted_f(m: usize) -> Result<f64> {
    check_copies(m)?;
    Ok((m as f64 + 2.0) / (2.0 * m as f64))
}

/// Least-squares shrinking factor along the input's Bloch direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkFit {
    pub f: f64,
    /// Orthogonal Bloch component plus trace and Hermiticity deviations.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ShrinkReport {
    pub f: f64,
    pub residual: f64,
    pub predicted: f64,
}

impl ShrinkFit {
    pub fn report(self, m: usize) -> Result<ShrinkReport> {
        Ok(ShrinkReport {
            f: self.f,
            residual: self.residual,
            predicted: predicted_f(m)?,
        })
    }
}

pub fn shrink_fit(input: &QubitDensity, output_marginal: &ComplexMatrix) -> Result<ShrinkFit> {
    if output_marginal.rows() != 2 || output_marginal.cols() != 2 {
        return arg(format!(
            "output marginal must be 2x2, got {}x{}",
            output_marginal.rows(),
            output_marginal.cols()
        ));
    }
    let b_in = bloch_from_density(input);
    let n2 = b_in.norm_sqr();
    if n2.sqrt() < 1e-12 {
        return Err(Error::Unidentifiable(n2.sqrt()));
    }
    let b_out = BlochVector::of_matrix(output_marginal);
    let f = b_out.dot(&b_in) / n2;
    let ortho = ((b_out.x - f * b_in.x).powi(2)
        + (b_out.y - f * b_in.y).powi(2)
        + (b_out.z - f * b_in.z).powi(2))
    .sqrt();
    let tr = output_marginal.trace();
    let residual = ortho + (tr - ONE).norm() + output_marginal.hermiticity_error();
    Ok(ShrinkFit { f, residual })
}
