//! Dense complex linear algebra over multipartite Hilbert spaces.
//!
//! Basis convention used throughout the crate: in a register of `n` qubits,
//! qubit `q` occupies bit `n - 1 - q` of the basis label, with `|↑⟩ = 0` and
//! `|↓⟩ = 1`. For mixed registers the first factor in `dims` is the most
//! significant digit; the cloner's ancilla is always the last factor.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{arg, Error, Result, Violation, ViolationReport};

/// Largest side length of a square dense operator.
pub const DENSE_DIM_LIMIT: usize = 1 << 14;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return arg(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            ));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return arg(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    /// Column vector view of a state.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `(m + m†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return arg(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return arg(format!(
                "eigenvalues of non-square {}x{}",
                self.rows, self.cols
            ));
        }
        let n = self.rows;
        let h = self.hermitian_part();
        let m = DMatrix::from_fn(n, n, |r, c| h[(r, c)]);
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch")
    }
}

/// Kronecker product `a ⊗ b`, refusing results whose side exceeds
/// [`DENSE_DIM_LIMIT`].
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_product_with_limit(a, b, DENSE_DIM_LIMIT)
}

pub fn tensor_product_with_limit(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    limit: usize,
) -> Result<ComplexMatrix> {
    let side = |x: usize, y: usize| {
        x.checked_mul(y).ok_or(Error::DimensionLimit {
            requested: usize::MAX,
            limit,
        })
    };
    let rows = side(a.rows, b.rows)?;
    let cols = side(a.cols, b.cols)?;
    if rows.max(cols) > limit {
        return Err(Error::DimensionLimit {
            requested: rows.max(cols),
            limit,
        });
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    }))
}

/// Per-call tolerances for density validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            trace: 1e-10,
            psd: 1e-9,
        }
    }
}

/// A validated density operator over an ordered list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteDensity {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl MultipartiteDensity {
    /// Skips the Hermiticity, trace and positivity checks; only shape is
    /// checked. For outputs of maps already known to be trace preserving
    /// and completely positive.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert!(matrix.is_square());
        debug_assert_eq!(matrix.rows(), dims.iter().product::<usize>());
        Self { matrix, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<MultipartiteDensity> {
        let (m, dims) = partial_trace_matrix(&self.matrix, &self.dims, keep)?;
        Ok(Self::from_trusted(m, dims))
    }
}

/// Checks the density-operator invariants of `m` over `dims`.
///
/// Returns every violated invariant at once rather than the first one hit.
pub fn validate_density(
    m: ComplexMatrix,
    dims: &[usize],
    tol: &Tolerances,
) -> Result<MultipartiteDensity> {
    if !m.is_square() {
        return arg(format!(
            "density must be square, got {}x{}",
            m.rows(),
            m.cols()
        ));
    }
    check_dims(m.rows(), dims)?;

    let mut report = ViolationReport::default();
    let herm = m.hermiticity_error();
    if herm > tol.herm {
        report
            .violations
            .push(Violation::NotHermitian { deviation: herm });
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
        report.violations.push(Violation::Trace { trace: tr.re });
    }
    let min_eig = m.hermitian_eigenvalues()?.first().copied().unwrap_or(0.0);
    if min_eig < -tol.psd {
        report.violations.push(Violation::NotPositive {
            min_eigenvalue: min_eig,
        });
    }

    if report.is_empty() {
        Ok(MultipartiteDensity {
            matrix: m,
            dims: dims.to_vec(),
        })
    } else {
        Err(Error::InvalidDensity(report))
    }
}

fn check_dims(side: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return arg(format!("invalid subsystem dims {dims:?}"));
    }
    let prod = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    if prod != side {
        return arg(format!(
            "dims {dims:?} have product {prod}, matrix side is {side}"
        ));
    }
    Ok(())
}

/// Partial trace of a (not necessarily normalized) operator, keeping the
/// subsystems listed in `keep` in their original order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    if !m.is_square() {
        return arg("partial trace of a non-square matrix");
    }
    check_dims(m.rows(), dims)?;
    if keep.is_empty() {
        return arg("keep set is empty");
    }
    let mut kept = vec![false; dims.len()];
    for &q in keep {
        if q >= dims.len() {
            return arg(format!(
                "subsystem {q} out of range for {} subsystems",
                dims.len()
            ));
        }
        if kept[q] {
            return arg(format!("subsystem {q} listed twice"));
        }
        kept[q] = true;
    }

    // Stride of each factor in the full basis label (last factor fastest).
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |select: bool| -> Vec<usize> {
        let mut offs = vec![0usize];
        for (i, &d) in dims.iter().enumerate() {
            if kept[i] != select {
                continue;
            }
            let stride = strides[i];
            offs = offs
                .iter()
                .flat_map(|&o| (0..d).map(move |v| o + v * stride))
                .collect();
        }
        offs
    };
    let keep_offs = offsets(true);
    let trace_offs = offsets(false);

    let n = keep_offs.len();
    let out = ComplexMatrix::from_fn(n, n, |r, c| {
        let (kr, kc) = (keep_offs[r], keep_offs[c]);
        trace_offs.iter().map(|&t| m[(kr + t, kc + t)]).sum()
    });
    let out_dims = dims
        .iter()
        .zip(&kept)
        .filter_map(|(&d, &k)| k.then_some(d))
        .collect();
    Ok((out, out_dims))
}

/// Reduced density over the subsystems in `keep`.
pub fn partial_trace(state: &MultipartiteDensity, keep: &[usize]) -> Result<MultipartiteDensity> {
    state.partial_trace(keep)
}

/// `½ Σ |λ_i(a − b)|`
pub fn trace_distance(a: &MultipartiteDensity, b: &MultipartiteDensity) -> Result<f64> {
    if a.dims != b.dims {
        return arg(format!("dims mismatch: {:?} vs {:?}", a.dims, b.dims));
    }
    let diff = &a.matrix - &b.matrix;
    Ok(0.5
        * diff
            .hermitian_eigenvalues()?
            .iter()
            .map(|l| l.abs())
            .sum::<f64>())
}
