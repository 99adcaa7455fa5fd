//! Single mixed qubits, their Bloch vectors, and the expansion of `ρ⊗ρ` in
//! the triplet/singlet basis.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dicke::chi_basis;
use crate::error::{arg, Result};
use crate::linalg::{validate_density, ComplexMatrix, MultipartiteDensity, Tolerances, ZERO};

const BALL_SLACK: f64 = 1e-12;

/// `ρ = z0|↑⟩⟨↑| + z1|↑⟩⟨↓| + z2|↓⟩⟨↑| + z3|↓⟩⟨↓|` with `z2 = z1*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity {
    z0: f64,
    z1: Complex64,
    z3: f64,
}

impl QubitDensity {
    /// Builds a qubit from `z0` and the off-diagonal `z1`; `z3 = 1 - z0`.
    pub fn new(z0: f64, z1: Complex64) -> Result<Self> {
        let z3 = 1.0 - z0;
        if !(z0.is_finite() && z1.re.is_finite() && z1.im.is_finite()) {
            return arg("non-finite qubit entries");
        }
        if z0 < -BALL_SLACK || z3 < -BALL_SLACK {
            return arg(format!("z0 = {z0} outside [0, 1]"));
        }
        let det = z0 * z3 - z1.norm_sqr();
        if det < -BALL_SLACK {
            return arg(format!("negative determinant {det:e}"));
        }
        Ok(Self { z0, z1, z3 })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            z0: 0.5,
            z1: ZERO,
            z3: 0.5,
        }
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn z1(&self) -> Complex64 {
        self.z1
    }

    pub fn z2(&self) -> Complex64 {
        self.z1.conj()
    }

    pub fn z3(&self) -> f64 {
        self.z3
    }

    pub fn det(&self) -> f64 {
        self.z0 * self.z3 - self.z1.norm_sqr()
    }

    pub fn purity(&self) -> f64 {
        self.z0 * self.z0 + self.z3 * self.z3 + 2.0 * self.z1.norm_sqr()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(self.z0, 0.0),
                self.z1,
                self.z2(),
                Complex64::new(self.z3, 0.0),
            ],
        )
        .expect("2x2")
    }

    pub fn to_density(&self) -> MultipartiteDensity {
        validate_density(self.to_matrix(), &[2], &Tolerances::default())
            .expect("QubitDensity invariants imply a valid density")
    }

    /// Reads a 2×2 density; the matrix must pass [`validate_density`].
    pub fn from_matrix(m: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let d = validate_density(m.clone(), &[2], tol)?;
        let m = d.matrix();
        Self::new(m[(0, 0)].re, (m[(0, 1)] + m[(1, 0)].conj()) * 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = Self { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return arg("non-finite Bloch vector");
        }
        if b.norm_sqr() > 1.0 + BALL_SLACK {
            return arg(format!("Bloch vector norm {} exceeds 1", b.norm()));
        }
        Ok(b)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Bloch components of the Hermitian part of any 2×2 matrix, without
    /// checking the ball constraint.
    pub(crate) fn of_matrix(m: &ComplexMatrix) -> Self {
        let off = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
        Self {
            x: 2.0 * off.re,
            y: -2.0 * off.im,
            z: m[(0, 0)].re - m[(1, 1)].re,
        }
    }
}

pub fn density_from_bloch(b: &BlochVector) -> Result<QubitDensity> {
    if b.norm_sqr() > 1.0 + BALL_SLACK {
        return arg(format!("Bloch vector norm {} exceeds 1", b.norm()));
    }
    QubitDensity::new(0.5 * (1.0 + b.z), Complex64::new(0.5 * b.x, -0.5 * b.y))
}

pub fn bloch_from_density(rho: &QubitDensity) -> BlochVector {
    BlochVector {
        x: 2.0 * rho.z1.re,
        y: -2.0 * rho.z1.im,
        z: rho.z0 - rho.z3,
    }
}

/// Draws a state with Bloch vector uniform in the solid ball of radius
/// `ball_radius`, advancing `rng`.
pub fn random_mixed<R: Rng + ?Sized>(rng: &mut R, ball_radius: f64) -> Result<QubitDensity> {
    if !(0.0..=1.0).contains(&ball_radius) {
        return arg(format!("ball radius {ball_radius} outside [0, 1]"));
    }
    let cos_theta: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let u: f64 = rng.random();
    let r = ball_radius * u.cbrt();
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let b = BlochVector {
        x: r * sin_theta * phi.cos(),
        y: r * sin_theta * phi.sin(),
        z: r * cos_theta,
    };
    density_from_bloch(&b)
}

/// Seeded convenience wrapper: a fresh ChaCha8 stream from `seed`.
pub fn random_mixed_seeded(seed: u64, ball_radius: f64) -> Result<QubitDensity> {
    random_mixed(&mut ChaCha8Rng::seed_from_u64(seed), ball_radius)
}

/// Coefficients of `ρ⊗ρ = Σ coeff[i][j] χ_i χ_j†` in the basis
/// `(χ_0, χ_1, χ_2, χ_3)`, `χ_3` the singlet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoCopyExpansion {
    pub coeff: [[Complex64; 4]; 4],
}

impl TwoCopyExpansion {
    /// `Σ coeff[i][j] χ_i χ_j†` as a 4×4 matrix.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let chi = chi_basis();
        let mut m = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let c = self.coeff[i][j];
                if c == ZERO {
                    continue;
                }
                for r in 0..4 {
                    for s in 0..4 {
                        m[(r, s)] += c * chi[i][r] * chi[j][s].conj();
                    }
                }
            }
        }
        m
    }
}

pub fn two_copy_expand(rho: &QubitDensity) -> TwoCopyExpansion {
    let (z0, z1, z2, z3) = (
        Complex64::new(rho.z0, 0.0),
        rho.z1,
        rho.z2(),
        Complex64::new(rho.z3, 0.0),
    );
    let mut coeff = [[ZERO; 4]; 4];
    coeff[0][0] = z0 * z0;
    coeff[0][1] = z0 * z1 * SQRT_2;
    coeff[0][2] = z1 * z1;
    coeff[1][0] = z0 * z2 * SQRT_2;
    coeff[1][1] = z0 * z3 + z1 * z2;
    coeff[1][2] = z1 * z3 * SQRT_2;
    coeff[2][0] = z2 * z2;
    coeff[2][1] = z2 * z3 * SQRT_2;
    coeff[2][2] = z3 * z3;
    // the singlet decouples from the triplet: ρ⊗ρ commutes with the swap
    coeff[3][3] = Complex64::new(rho.det(), 0.0);
    TwoCopyExpansion { coeff }
}
