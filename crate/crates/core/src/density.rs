//! Validated two-qubit density matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Absolute tolerance for Hermiticity, unit trace and positivity.
pub const DENSITY_TOLERANCE: f64 = 1e-9;

/// A two-qubit state: 4x4, Hermitian, unit trace, positive semidefinite.
///
/// Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with the first qubit most
/// significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix4(ComplexMatrix);

impl DensityMatrix4 {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.0.hermitian_eigenvalues()
    }

    /// Expectation value `Tr[ρ O]`, real part.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        self.0.trace_product(op).re
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix4(ComplexMatrix::identity(4).scale_real(0.25))
    }

    /// Wraps a matrix the caller has already validated or constructed to be
    /// a state. Crate-internal.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert_eq!(m.dim(), 4);
        DensityMatrix4(m)
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix4 {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        validate_density(m)
    }
}

impl From<DensityMatrix4> for ComplexMatrix {
    fn from(d: DensityMatrix4) -> Self {
        d.0
    }
}

/// Checks the three state invariants at [`DENSITY_TOLERANCE`] and wraps the
/// matrix.
pub fn validate_density(m: ComplexMatrix) -> Result<DensityMatrix4> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: m.dim(),
        });
    }
    let deviation = m.hermiticity_deviation();
    if !(deviation <= DENSITY_TOLERANCE) {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = m.trace().re;
    let trace_dev = (trace - 1.0).abs();
    if !(trace_dev <= DENSITY_TOLERANCE) {
        return Err(Error::NotUnitTrace {
            trace,
            deviation: trace_dev,
        });
    }
    let min_eigenvalue = m.hermitian_eigenvalues()[0];
    if !(min_eigenvalue >= -DENSITY_TOLERANCE) {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix4(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = validate_density(ComplexMatrix::identity(4).scale_real(0.25)).unwrap();
        for e in rho.eigenvalues() {
            assert!((e - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn unnormalized_projector_fails_trace() {
        let m = ComplexMatrix::from_real_diagonal(&[2.0, 0.0, 0.0, 0.0]);
        match validate_density(m) {
            Err(Error::NotUnitTrace { trace, .. }) => assert_eq!(trace, 2.0),
            other => panic!("expected NotUnitTrace, got {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = ComplexMatrix::identity(4).scale_real(0.25);
        m[(0, 1)] = c(0.0, 0.1);
        assert!(matches!(
            validate_density(m),
            Err(Error::NotHermitian { deviation }) if (deviation - 0.1).abs() < 1e-15
        ));
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = ComplexMatrix::from_real_diagonal(&[0.6, 0.5, 0.1, -0.2]);
        assert!(matches!(
            validate_density(m),
            Err(Error::NotPositive { min_eigenvalue }) if (min_eigenvalue + 0.2).abs() < 1e-12
        ));
    }

    #[test]
    fn wrong_dimension_rejected() {
        assert!(matches!(
            validate_density(ComplexMatrix::identity(2)),
            Err(Error::DimensionMismatch {
                expected: 4,
                actual: 2
            })
        ));
    }

    #[test]
    fn grud_matrix_assembled_by_hand_is_valid() {
        // v|00⟩⟨00| + (1-v)(s²|01⟩⟨01| + c²|10⟩⟨10| + sc(|01⟩⟨10| + |10⟩⟨01|))
        let (v, x) = (0.1_f64, 0.23_f64);
        let (s, co) = x.sin_cos();
        let mut m = ComplexMatrix::zeros(4);
        m[(0, 0)] = c(v, 0.0);
        m[(1, 1)] = c((1.0 - v) * s * s, 0.0);
        m[(2, 2)] = c((1.0 - v) * co * co, 0.0);
        m[(1, 2)] = c((1.0 - v) * s * co, 0.0);
        m[(2, 1)] = m[(1, 2)];
        let rho = validate_density(m).unwrap();
        // Independent check: the |01⟩,|10⟩ block is rank one with eigenvalue 1-v.
        let ev = rho.eigenvalues();
        let expected = [0.0, 0.0, v, 1.0 - v];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn serde_rejects_invalid_state() {
        let json = serde_json::to_string(&ComplexMatrix::identity(4)).unwrap();
        assert!(serde_json::from_str::<DensityMatrix4>(&json).is_err());
        let ok = DensityMatrix4::maximally_mixed();
        let back: DensityMatrix4 =
            serde_json::from_str(&serde_json::to_string(&ok).unwrap()).unwrap();
        assert_eq!(back, ok);
    }
}
