//! Dense complex matrices in row-major order.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

pub type C64 = Complex64;

pub const fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

/// A square complex matrix.
///
/// Serialized as an array of rows, each row an array of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                len: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C64::default(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c(d, 0.0);
        }
        m
    }

    /// Builds a matrix from rows of complex entries. Panics on ragged input;
    /// meant for literals.
    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self {
            dim: N,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    /// Projector `|ψ⟩⟨ψ|` onto an (unnormalized) state vector.
    pub fn outer(ket: &[C64]) -> Self {
        let dim = ket.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = ket[i] * ket[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul: dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == C64::default() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    /// `A X A†`
    pub fn conjugate(&self, x: &Self) -> Self {
        self.matmul(x).matmul(&self.adjoint())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim, "trace_product: dimension mismatch");
        let n = self.dim;
        let mut acc = C64::default();
        for i in 0..n {
            for j in 0..n {
                acc += self.entries[i * n + j] * other.entries[j * n + i];
            }
        }
        acc
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "add: dimension mismatch");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_real(-1.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |m[i][j] - conj(m[j][i])|`
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let e = (self.entries[i * n + j] - self.entries[j * n + i].conj()).norm();
                d = d.max(e);
            }
        }
        d
    }

    /// Eigenvalues of the Hermitian part, ascending.
    ///
    /// Uses the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose
    /// spectrum is that of the Hermitian matrix with every value doubled.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let m = 2 * n;
        let mut real = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let h = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i].conj());
                real[i * m + j] = h.re;
                real[(i + n) * m + (j + n)] = h.re;
                real[i * m + (j + n)] = -h.im;
                real[(i + n) * m + j] = h.im;
            }
        }
        let eig = symmetric_eigen(m, &real);
        let mut vals: Vec<f64> = eig.values.iter().step_by(2).copied().collect();
        vals.reverse();
        vals
    }

    /// Tensor (Kronecker) product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let d = n * m;
        let mut out = Self::zeros(d);
        for i in 0..n {
            for j in 0..n {
                let a = self.entries[i * n + j];
                if a == C64::default() {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.entries[(i * m + k) * d + (j * m + l)] = a * other.entries[k * m + l];
                    }
                }
            }
        }
        out
    }

    /// Partial transpose on the second factor of a `d_a x d_b` bipartition.
    pub fn partial_transpose_second(&self, dim_b: usize) -> Self {
        assert_eq!(self.dim % dim_b, 0, "partial transpose: bad subsystem size");
        let dim_a = self.dim / dim_b;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..dim_a {
            for j in 0..dim_a {
                for k in 0..dim_b {
                    for l in 0..dim_b {
                        out.entries[(i * dim_b + k) * d + (j * dim_b + l)] =
                            self.entries[(i * dim_b + l) * d + (j * dim_b + k)];
                    }
                }
            }
        }
        out
    }

    /// Traces out the second factor of a `d_a x d_b` bipartition.
    pub fn partial_trace_second(&self, dim_b: usize) -> Self {
        assert_eq!(self.dim % dim_b, 0, "partial trace: bad subsystem size");
        let dim_a = self.dim / dim_b;
        let d = self.dim;
        let mut out = Self::zeros(dim_a);
        for i in 0..dim_a {
            for j in 0..dim_a {
                out.entries[i * dim_a + j] = (0..dim_b)
                    .map(|k| self.entries[(i * dim_b + k) * d + (j * dim_b + k)])
                    .sum();
            }
        }
        out
    }

    /// Traces out the first factor of a `d_a x d_b` bipartition.
    pub fn partial_trace_first(&self, dim_b: usize) -> Self {
        assert_eq!(self.dim % dim_b, 0, "partial trace: bad subsystem size");
        let dim_a = self.dim / dim_b;
        let d = self.dim;
        let mut out = Self::zeros(dim_b);
        for k in 0..dim_b {
            for l in 0..dim_b {
                out.entries[k * dim_b + l] = (0..dim_a)
                    .map(|i| self.entries[(i * dim_b + k) * d + (i * dim_b + l)])
                    .sum();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for ComplexMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::EntryCount {
                dim,
                len: dim * (dim - 1) + bad.len(),
            });
        }
        let entries = rows.iter().flatten().map(|&[re, im]| c(re, im)).collect();
        ComplexMatrix::new(dim, entries)
    }
}

impl From<ComplexMatrix> for Vec<Vec<[f64; 2]>> {
    fn from(m: ComplexMatrix) -> Self {
        m.entries
            .chunks(m.dim)
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect()
    }
}

/// Single-qubit operators.
pub mod qubit {
    use super::{c, ComplexMatrix};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_rows([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    /// `(σ_x, σ_y, σ_z)`, the axis convention used throughout the crate.
    pub fn paulis() -> [ComplexMatrix; 3] {
        [sigma_x(), sigma_y(), sigma_z()]
    }

    /// `r⃗·σ⃗`
    pub fn dot_sigma(r: &[f64; 3]) -> ComplexMatrix {
        let [x, y, z] = *r;
        ComplexMatrix::from_rows([[c(z, 0.0), c(x, -y)], [c(x, y), c(-z, 0.0)]])
    }
}

#[cfg(test)]
mod tests {
    use super::qubit::*;
    use super::*;

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "matrices differ by {d:e}");
    }

    #[test]
    fn kron_of_identities() {
        assert_eq!(identity().kron(&identity()), ComplexMatrix::identity(4));
    }

    #[test]
    fn xx_maps_00_to_11() {
        let xx = sigma_x().kron(&sigma_x());
        assert_eq!(xx[(3, 0)], c(1.0, 0.0));
        assert_eq!(xx[(0, 3)], c(1.0, 0.0));
        for i in 0..4 {
            if i != 3 {
                assert_eq!(xx[(i, 0)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn mixed_product_property() {
        let a =
            ComplexMatrix::from_rows([[c(0.3, 0.1), c(-1.0, 2.0)], [c(0.0, -0.5), c(1.5, 0.0)]]);
        let b = ComplexMatrix::from_rows([[c(1.0, 0.0), c(0.2, 0.2)], [c(-0.7, 0.0), c(0.0, 1.0)]]);
        let cm =
            ComplexMatrix::from_rows([[c(2.0, -1.0), c(0.0, 0.0)], [c(0.5, 0.5), c(-1.0, 0.3)]]);
        let d = ComplexMatrix::from_rows([[c(0.1, 0.0), c(0.0, 0.9)], [c(1.1, -0.2), c(0.4, 0.4)]]);
        let lhs = a.kron(&b).matmul(&cm.kron(&d));
        let rhs = a.matmul(&cm).kron(&b.matmul(&d));
        assert_close(&lhs, &rhs, 1e-14);
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli_y() {
        let vals = sigma_y().hermitian_eigenvalues();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_and_transpose_of_product() {
        let a = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        let b = ComplexMatrix::from_rows([[c(0.5, 0.0), c(0.1, 0.2)], [c(0.1, -0.2), c(0.5, 0.0)]]);
        let ab = a.kron(&b);
        assert_close(&ab.partial_trace_second(2), &a, 1e-15);
        assert_close(&ab.partial_trace_first(2), &b, 1e-15);
        let bt =
            ComplexMatrix::from_rows([[c(0.5, 0.0), c(0.1, -0.2)], [c(0.1, 0.2), c(0.5, 0.0)]]);
        assert_close(&ab.partial_transpose_second(2), &a.kron(&bt), 1e-15);
    }

    #[test]
    fn json_layout_is_rows_of_pairs() {
        let m = sigma_y();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[[0.0,0.0],[0.0,-1.0]],[[0.0,1.0],[0.0,0.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0]],[[0,0]]]").is_err());
    }
}
