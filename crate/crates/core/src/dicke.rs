//! Symmetric Dicke states, their phased partners, and the two-qubit χ basis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{arg, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};

/// `|n_up ↑, n_down ↓⟩`, optionally with the root-of-unity phase ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DickeSpec {
    pub n_up: usize,
    pub n_down: usize,
    pub phased: bool,
}

impl DickeSpec {
    pub fn new(n_up: usize, n_down: usize, phased: bool) -> Result<Self> {
        let spec = Self {
            n_up,
            n_down,
            phased,
        };
        if spec.qubits() == 0 {
            return arg("Dicke state needs at least one qubit");
        }
        if spec.qubits() >= usize::BITS as usize {
            return arg(format!("{} qubits is too many", spec.qubits()));
        }
        if phased && spec.terms() < 2 {
            return arg(format!(
                "|{n_up}↑,{n_down}↓⟩ has a single term and no phased partner"
            ));
        }
        Ok(spec)
    }

    pub fn unphased(n_up: usize, n_down: usize) -> Result<Self> {
        Self::new(n_up, n_down, false)
    }

    pub fn phased(n_up: usize, n_down: usize) -> Result<Self> {
        Self::new(n_up, n_down, true)
    }

    /// M
    pub fn qubits(&self) -> usize {
        self.n_up + self.n_down
    }

    /// D = C(M, n_down)
    pub fn terms(&self) -> u64 {
        binomial(self.qubits() as u64, self.n_down as u64)
    }

    /// Nonzero amplitudes as `(basis label, amplitude)`, labels ascending.
    ///
    /// The phased variant puts `ω^r / √D`, `ω = e^{2πi/D}`, on the r-th
    /// label in ascending order, so for three qubits with one down-spin the
    /// phases on `|↑↑↓⟩, |↑↓↑⟩, |↓↑↑⟩` are `1, ω, ω²`.
    pub fn terms_sparse(&self) -> Vec<(usize, Complex64)> {
        let d = self.terms();
        let norm = 1.0 / (d as f64).sqrt();
        weight_labels(self.qubits(), self.n_down)
            .enumerate()
            .map(|(r, label)| {
                let amp = if self.phased {
                    Complex64::from_polar(norm, 2.0 * PI * (r as f64) / (d as f64))
                } else {
                    Complex64::new(norm, 0.0)
                };
                (label, amp)
            })
            .collect()
    }

    pub fn vector(&self) -> Vec<Complex64> {
        let mut v = vec![ZERO; 1usize << self.qubits()];
        for (label, amp) in self.terms_sparse() {
            v[label] = amp;
        }
        v
    }
}

/// Basis labels of `m` bits with exactly `weight` ones, ascending
/// (Gosper's hack).
pub fn weight_labels(m: usize, weight: usize) -> impl Iterator<Item = usize> {
    let limit = 1usize << m;
    let first = if weight > m {
        limit
    } else {
        (1usize << weight) - 1
    };
    let mut next = Some(first).filter(|&x| x < limit);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            let succ = (((ripple ^ cur) >> 2) / low) | ripple;
            Some(succ).filter(|&x| x < limit)
        };
        Some(cur)
    })
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn dicke_vector(spec: &DickeSpec) -> Result<Vec<Complex64>> {
    if spec.phased {
        return arg("dicke_vector takes an unphased spec");
    }
    Ok(spec.vector())
}

pub fn twiddle_vector(spec: &DickeSpec) -> Result<Vec<Complex64>> {
    if !spec.phased {
        return arg("twiddle_vector takes a phased spec");
    }
    if spec.terms() < 2 {
        return arg("phased Dicke state needs at least two terms");
    }
    Ok(spec.vector())
}

/// `(χ_0, χ_1, χ_2, χ_3) = (|↑↑⟩, (|↑↓⟩+|↓↑⟩)/√2, |↓↓⟩, (|↑↓⟩−|↓↑⟩)/√2)`.
pub fn chi_basis() -> [[Complex64; 4]; 4] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, h, h, ZERO],
        [ZERO, ZERO, ZERO, ONE],
        [ZERO, h, -h, ZERO],
    ]
}

/// Single-qubit reduced state of the spec's projector; the same for every
/// qubit and for both phased and unphased variants.
pub fn dicke_single_qubit_marginal(spec: &DickeSpec) -> ComplexMatrix {
    let m = spec.qubits() as f64;
    ComplexMatrix::from_real_diagonal(&[spec.n_up as f64 / m, spec.n_down as f64 / m])
}
