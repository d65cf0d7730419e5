//! Single-qubit Kraus channels applied locally to link qubits.

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix4;
use crate::error::{check_range, Error, Result};
use crate::matrix::{c, qubit, ComplexMatrix};

/// Tolerance on `Σ K†K = I`.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let mut sum = ComplexMatrix::zeros(2);
        for k in &ops {
            if k.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    actual: k.dim(),
                });
            }
            sum = sum.add(&k.adjoint().matmul(k));
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(2));
        if !(deviation <= COMPLETENESS_TOLERANCE) {
            return Err(Error::NotTracePreserving(deviation));
        }
        Ok(Self { ops })
    }

    pub fn identity() -> Self {
        Self {
            ops: vec![ComplexMatrix::identity(2)],
        }
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }
}

/// `{√(1−p) I, √p X}`
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    let p = check_range("p", p, 0.0, 1.0)?;
    KrausChannel::new(vec![
        qubit::identity().scale_real((1.0 - p).sqrt()),
        qubit::sigma_x().scale_real(p.sqrt()),
    ])
}

/// `{diag(1, √(1−γ)), √γ |0⟩⟨1|}`
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    let gamma = check_range("gamma", gamma, 0.0, 1.0)?;
    let zero = c(0.0, 0.0);
    KrausChannel::new(vec![
        ComplexMatrix::from_real_diagonal(&[1.0, (1.0 - gamma).sqrt()]),
        ComplexMatrix::from_rows([[zero, c(gamma.sqrt(), 0.0)], [zero, zero]]),
    ])
}

/// Which qubits of a link a channel acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sides {
    #[default]
    Both,
    Left,
    Right,
}

pub fn apply_channel(rho: &DensityMatrix4, ch: &KrausChannel, sides: Sides) -> DensityMatrix4 {
    let id = [ComplexMatrix::identity(2)];
    let (left, right): (&[ComplexMatrix], &[ComplexMatrix]) = match sides {
        Sides::Both => (ch.ops(), ch.ops()),
        Sides::Left => (ch.ops(), &id),
        Sides::Right => (&id, ch.ops()),
    };
    let mut out = ComplexMatrix::zeros(4);
    for ka in left {
        for kb in right {
            out = out.add(&ka.kron(kb).conjugate(rho.matrix()));
        }
    }
    // Kraus maps are CPTP: positivity is exact and the trace is preserved to
    // within the completeness tolerance.
    DensityMatrix4::from_trusted(out)
}

pub fn apply_channel_both_qubits(rho: &DensityMatrix4, ch: &KrausChannel) -> DensityMatrix4 {
    apply_channel(rho, ch, Sides::Both)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::validate_density;
    use crate::states::{pure_theta_state, x_state, PureThetaParam, XParams};

    fn re(m: &ComplexMatrix, i: usize, j: usize) -> f64 {
        m[(i, j)].re
    }

    #[test]
    fn limits() {
        let id = apply_channel_both_qubits(
            &x_state(&XParams::new(0.2, 0.1, 0.7, 0.15).unwrap()),
            &bit_flip(0.0).unwrap(),
        );
        assert_eq!(id, x_state(&XParams::new(0.2, 0.1, 0.7, 0.15).unwrap()));
        assert!(bit_flip(-0.1).is_err());
        assert!(amplitude_damping(1.5).is_err());

        let rho = pure_theta_state(&PureThetaParam::new(0.4).unwrap());
        let damped = apply_channel_both_qubits(&rho, &amplitude_damping(1.0).unwrap());
        let ground = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]);
        assert!(damped.matrix().max_abs_diff(&ground) < 1e-15);

        let flipped = apply_channel_both_qubits(&rho, &bit_flip(1.0).unwrap());
        let xx = qubit::sigma_x().kron(&qubit::sigma_x());
        assert!(flipped.matrix().max_abs_diff(&xx.conjugate(rho.matrix())) < 1e-15);
    }

    #[test]
    fn completeness_enforced() {
        for ch in [bit_flip(0.3).unwrap(), amplitude_damping(0.21).unwrap()] {
            let sum = ch.ops().iter().fold(ComplexMatrix::zeros(2), |acc, k| {
                acc.add(&k.adjoint().matmul(k))
            });
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        }
        let bad = KrausChannel::new(vec![qubit::sigma_x(), qubit::sigma_z()]);
        assert!(matches!(bad, Err(Error::NotTracePreserving(_))));
    }

    #[test]
    fn bit_flip_matches_hand_expansion() {
        for &theta in &[0.1, 0.3, 0.55, 0.62, std::f64::consts::FRAC_PI_4] {
            for &p in &[0.0, 0.05, 0.15, 0.214, 0.5, 0.8, 1.0] {
                let rho = pure_theta_state(&PureThetaParam::new(theta).unwrap());
                let out = apply_channel_both_qubits(&rho, &bit_flip(p).unwrap());
                let m = out.matrix();
                let (s, co) = f64::sin_cos(theta);
                let q = 1.0 - p;
                let d01 = q * q * co * co + p * p * s * s;
                let d10 = q * q * s * s + p * p * co * co;
                let d00 = p * q;
                let d11 = p * q;
                let coh = p * q * (2.0 * theta).sin();
                let inner = (q * q + p * p) * s * co;
                let expected = [
                    [d00, 0.0, 0.0, coh],
                    [0.0, d01, inner, 0.0],
                    [0.0, inner, d10, 0.0],
                    [coh, 0.0, 0.0, d11],
                ];
                for i in 0..4 {
                    for j in 0..4 {
                        assert!((re(m, i, j) - expected[i][j]).abs() < 1e-12);
                        assert!(m[(i, j)].im.abs() < 1e-15);
                    }
                }
                validate_density(m.clone()).unwrap();
            }
        }
    }

    #[test]
    fn damping_coefficients() {
        let theta: f64 = 0.55;
        let gamma = 0.21;
        let rho = pure_theta_state(&PureThetaParam::new(theta).unwrap());
        let out = apply_channel_both_qubits(&rho, &amplitude_damping(gamma).unwrap());
        let m = out.matrix();
        assert!((re(m, 0, 0) - gamma).abs() < 1e-15);
        assert!((re(m, 1, 2) - (1.0 - gamma) * theta.cos() * theta.sin()).abs() < 1e-15);
        assert!((m.trace().re - 1.0).abs() < 1e-12);
        validate_density(m.clone()).unwrap();
    }

    #[test]
    fn complementary_flip_probabilities_related_by_xx() {
        let xx = qubit::sigma_x().kron(&qubit::sigma_x());
        for &theta in &[0.2, 0.62] {
            let rho = pure_theta_state(&PureThetaParam::new(theta).unwrap());
            for &p in &[0.1, 0.3, 0.45] {
                let a = apply_channel_both_qubits(&rho, &bit_flip(p).unwrap());
                let b = apply_channel_both_qubits(&rho, &bit_flip(1.0 - p).unwrap());
                assert!(xx.conjugate(a.matrix()).max_abs_diff(b.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn one_sided_channels() {
        let rho = pure_theta_state(&PureThetaParam::new(0.5).unwrap());
        let ch = amplitude_damping(0.3).unwrap();
        let left = apply_channel(&rho, &ch, Sides::Left);
        let right = apply_channel(&rho, &ch, Sides::Right);
        let both = apply_channel(&left, &ch, Sides::Right);
        assert!(
            both.matrix()
                .max_abs_diff(apply_channel_both_qubits(&rho, &ch).matrix())
                < 1e-15
        );
        assert!(left.matrix().max_abs_diff(right.matrix()) > 1e-3);
        for out in [left, right] {
            validate_density(out.into_matrix()).unwrap();
        }
    }
}
