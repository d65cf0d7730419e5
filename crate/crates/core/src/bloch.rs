//! Bloch–Fano decomposition of two-qubit states.
//!
//! Any two-qubit state can be written as
//!
//! ```text
//! ρ = ¼ (I⊗I + a⃗·σ⃗ ⊗ I + I ⊗ b⃗·σ⃗ + Σᵢⱼ Wᵢⱼ σᵢ ⊗ σⱼ)
//! ```
//!
//! with local Bloch vectors `a⃗`, `b⃗` and a real 3x3 correlation tensor
//! `W`. Only the two largest singular values of `W` enter the n-local
//! bounds, and local unitaries act on `W` as `W ↦ R_A W R_Bᵀ` with proper
//! rotations, so a diagonal frame can always be reached.

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::density::{validate_density, DensityMatrix4};
use crate::error::Result;
use crate::linalg::{
    cross, dot, mat_mul, mat_vec, norm, scale, sub, symmetric_eigen3, transpose, Mat3, Vec3, ZERO3,
};
use crate::matrix::{qubit, ComplexMatrix};

/// Local Bloch vectors and correlation tensor of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochForm {
    /// First qubit: `aᵢ = Tr[ρ σᵢ⊗I]`.
    pub local_a: Vec3,
    /// Second qubit: `bᵢ = Tr[ρ I⊗σᵢ]`.
    pub local_b: Vec3,
    /// `Wᵢⱼ = Tr[ρ σᵢ⊗σⱼ]`.
    pub correlation: Mat3,
}

impl BlochForm {
    pub fn zero() -> Self {
        Self {
            local_a: [0.0; 3],
            local_b: [0.0; 3],
            correlation: ZERO3,
        }
    }

    pub fn has_null_local_vectors(&self, tol: f64) -> bool {
        norm(&self.local_a) <= tol && norm(&self.local_b) <= tol
    }
}

/// Singular values of a correlation tensor, sorted descending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpectrum(pub [f64; 3]);

impl CorrelationSpectrum {
    /// Singular values of `w` from the eigenvectors of `WᵀW`.
    ///
    /// Each value is taken as `|W v|` for the eigenvector `v` rather than the
    /// square root of its eigenvalue, so that vanishing singular values stay
    /// at rounding level instead of `√ε`.
    pub fn of(w: &Mat3) -> Self {
        let (_, vectors) = right_singular_vectors(w);
        let mut s = vectors.map(|v| norm(&mat_vec(w, &v)));
        s.sort_by(|a, b| b.total_cmp(a));
        CorrelationSpectrum(s)
    }

    pub fn largest(&self) -> f64 {
        self.0[0]
    }

    pub fn second(&self) -> f64 {
        self.0[1]
    }

    pub fn smallest(&self) -> f64 {
        self.0[2]
    }
}

struct PauliTable {
    local_a: [ComplexMatrix; 3],
    local_b: [ComplexMatrix; 3],
    correlation: [[ComplexMatrix; 3]; 3],
}

static PAULI_TABLE: LazyLock<PauliTable> = LazyLock::new(|| {
    let p = qubit::paulis();
    let id = qubit::identity();
    PauliTable {
        local_a: std::array::from_fn(|i| p[i].kron(&id)),
        local_b: std::array::from_fn(|i| id.kron(&p[i])),
        correlation: std::array::from_fn(|i| std::array::from_fn(|j| p[i].kron(&p[j]))),
    }
});

pub fn bloch_decompose(rho: &DensityMatrix4) -> BlochForm {
    let t = &*PAULI_TABLE;
    let local_a = std::array::from_fn(|i| rho.expectation(&t.local_a[i]));
    let local_b = std::array::from_fn(|i| rho.expectation(&t.local_b[i]));
    let correlation =
        std::array::from_fn(|i| std::array::from_fn(|j| rho.expectation(&t.correlation[i][j])));
    BlochForm {
        local_a,
        local_b,
        correlation,
    }
}

/// Assembles the matrix of a Bloch form without validating it.
pub fn bloch_matrix(bf: &BlochForm) -> ComplexMatrix {
    let t = &*PAULI_TABLE;
    let mut m = ComplexMatrix::identity(4);
    for i in 0..3 {
        m = m.add(&t.local_a[i].scale_real(bf.local_a[i]));
        m = m.add(&t.local_b[i].scale_real(bf.local_b[i]));
        for j in 0..3 {
            m = m.add(&t.correlation[i][j].scale_real(bf.correlation[i][j]));
        }
    }
    m.scale_real(0.25)
}

/// Rebuilds the state; fails with `NotPositive` when `(a, b, W)` is not
/// physical.
pub fn from_bloch(bf: &BlochForm) -> Result<DensityMatrix4> {
    validate_density(bloch_matrix(bf))
}

pub fn correlation_singular_values(rho: &DensityMatrix4) -> CorrelationSpectrum {
    CorrelationSpectrum::of(&bloch_decompose(rho).correlation)
}

/// Eigenvectors of `WᵀW`, eigenvalues descending.
fn right_singular_vectors(w: &Mat3) -> ([f64; 3], [Vec3; 3]) {
    symmetric_eigen3(&mat_mul(&transpose(w), w))
}

const RANK_TOLERANCE: f64 = 1e-12;

fn normalize(v: &Vec3) -> Option<Vec3> {
    let n = norm(v);
    (n > RANK_TOLERANCE).then(|| scale(v, 1.0 / n))
}

fn orthogonalize(v: &Vec3, basis: &[Vec3]) -> Vec3 {
    basis
        .iter()
        .fold(*v, |acc, u| sub(&acc, &scale(u, dot(&acc, u))))
}

/// First unit vector orthogonal to `basis`, trying `preferred` before the
/// coordinate axes.
fn complete(preferred: &Vec3, basis: &[Vec3]) -> Vec3 {
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    std::iter::once(*preferred)
        .chain(axes)
        .find_map(|cand| {
            let v = orthogonalize(&cand, basis);
            (norm(&v) > 1e-6).then(|| scale(&v, 1.0 / norm(&v)))
        })
        .expect("three axes always span the complement")
}

/// Proper rotations `(R_A, R_B)` with `R_A W R_Bᵀ` diagonal and ordered as
/// `(s₂, ±s₃, s₁)`.
pub fn canonical_rotations(w: &Mat3) -> (Mat3, Mat3) {
    let (_, v) = right_singular_vectors(w);
    let s = v.map(|vk| norm(&mat_vec(w, &vk)));

    let u1 = if s[0] > RANK_TOLERANCE {
        normalize(&mat_vec(w, &v[0])).unwrap_or_else(|| complete(&v[0], &[]))
    } else {
        complete(&v[0], &[])
    };
    let u2 = if s[1] > RANK_TOLERANCE {
        normalize(&orthogonalize(&mat_vec(w, &v[1]), &[u1]))
            .unwrap_or_else(|| complete(&v[1], &[u1]))
    } else {
        complete(&v[1], &[u1])
    };
    // Rows (x, y, z) = (u2, u3, u1) is right-handed iff u3 = u1 × u2.
    let u3 = cross(&u1, &u2);
    let v3 = cross(&v[0], &v[1]);
    let rot_a = [u2, u3, u1];
    let rot_b = [v[1], v3, v[0]];
    (rot_a, rot_b)
}

/// Moves a state to its canonical local frame: diagonal correlation tensor
/// with the largest singular value on axis 3, the second on axis 1, and any
/// unavoidable sign on axis 2 (`W₃₃ ≥ |W₁₁| ≥ |W₂₂|`, `W₃₃, W₁₁ ≥ 0`).
pub fn canonical_frame(rho: &DensityMatrix4) -> Result<(DensityMatrix4, BlochForm)> {
    let bf = bloch_decompose(rho);
    let (rot_a, rot_b) = canonical_rotations(&bf.correlation);
    let rotated = mat_mul(&mat_mul(&rot_a, &bf.correlation), &transpose(&rot_b));
    let mut correlation = ZERO3;
    for k in 0..3 {
        correlation[k][k] = rotated[k][k];
    }
    let canonical = BlochForm {
        local_a: mat_vec(&rot_a, &bf.local_a),
        local_b: mat_vec(&rot_b, &bf.local_b),
        correlation,
    };
    Ok((from_bloch(&canonical)?, canonical))
}
