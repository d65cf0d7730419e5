//! Two-qubit state families used by the network examples.
//!
//! Parameters are validated on construction and never clamped.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix4;
use crate::error::{check_range, Error, Result};
use crate::linalg::{norm, Vec3};
use crate::matrix::{c, qubit, ComplexMatrix, C64};

const X_STATE_TOLERANCE: f64 = 1e-12;

/// `v|00⟩⟨00| + (1-v)(sin²x|01⟩⟨01| + cos²x|10⟩⟨10| + sin x cos x(|01⟩⟨10| + |10⟩⟨01|))`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrudParams {
    v: f64,
    x: f64,
}

impl GrudParams {
    /// `v ∈ [0,1]`, `x ∈ [0, π/4]` radians.
    pub fn new(v: f64, x: f64) -> Result<Self> {
        Ok(Self {
            v: check_range("v", v, 0.0, 1.0)?,
            x: check_range("x", x, 0.0, FRAC_PI_4)?,
        })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

/// Mixing weight of the singlet in a Werner state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParam {
    p: f64,
}

impl WernerParam {
    pub fn new(p: f64) -> Result<Self> {
        Ok(Self {
            p: check_range("p", p, 0.0, 1.0)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Werner states are separable exactly for `p ≤ 1/3`.
    pub fn is_separable(&self) -> bool {
        self.p <= 1.0 / 3.0
    }
}

/// `x1|00⟩⟨00| + x2|01⟩⟨01| + x3|11⟩⟨11| + x4(|00⟩⟨11| + |11⟩⟨00|)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XParams {
    pub(crate) x1: f64,
    pub(crate) x2: f64,
    pub(crate) x3: f64,
    pub(crate) x4: f64,
}

impl XParams {
    /// Requires `x1, x2, x3 ∈ [0,1]` summing to one and `x4² ≤ x1·x3`, both
    /// at tolerance `1e-12`.
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Result<Self> {
        check_range("x1", x1, 0.0, 1.0)?;
        check_range("x2", x2, 0.0, 1.0)?;
        check_range("x3", x3, 0.0, 1.0)?;
        if !x4.is_finite() {
            return Err(Error::param("x4", x4, "not finite"));
        }
        let sum = x1 + x2 + x3;
        if (sum - 1.0).abs() > X_STATE_TOLERANCE {
            return Err(Error::param("x1+x2+x3", sum, "must equal 1"));
        }
        if x4 * x4 > x1 * x3 + X_STATE_TOLERANCE {
            return Err(Error::param("x4", x4, "requires x4^2 <= x1*x3"));
        }
        Ok(Self { x1, x2, x3, x4 })
    }

    pub fn components(&self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }
}

/// Angle of `cos θ|01⟩ + sin θ|10⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureThetaParam {
    theta: f64,
}

impl PureThetaParam {
    /// `θ ∈ (0, π/4]`.
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= FRAC_PI_4) {
            return Err(Error::param("theta", theta, "must lie in (0, pi/4]"));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Local Bloch vectors of a product state `¼(I + m⃗·σ⃗) ⊗ (I + n⃗·σ⃗)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductParams {
    m: Vec3,
    n: Vec3,
}

impl ProductParams {
    pub fn new(m: Vec3, n: Vec3) -> Result<Self> {
        for (name, v) in [("|m|", &m), ("|n|", &n)] {
            let len = norm(v);
            if !(len <= 1.0 + 1e-12) {
                return Err(Error::param(name, len, "Bloch vector longer than 1"));
            }
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> Vec3 {
        self.m
    }

    pub fn n(&self) -> Vec3 {
        self.n
    }
}

fn real_matrix(rows: [[f64; 4]; 4]) -> ComplexMatrix {
    ComplexMatrix::from_rows(rows.map(|r| r.map(|x| c(x, 0.0))))
}

pub fn grud_state(p: &GrudParams) -> DensityMatrix4 {
    let (v, w) = (p.v, 1.0 - p.v);
    let (s, co) = p.x.sin_cos();
    DensityMatrix4::from_trusted(real_matrix([
        [v, 0.0, 0.0, 0.0],
        [0.0, w * s * s, w * s * co, 0.0],
        [0.0, w * s * co, w * co * co, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ]))
}

/// `(1-p) I/4 + p |ψ⁻⟩⟨ψ⁻|` with `ψ⁻ = (|01⟩ - |10⟩)/√2`.
pub fn werner_state(p: &WernerParam) -> DensityMatrix4 {
    let noise = (1.0 - p.p) / 4.0;
    let half = p.p / 2.0;
    DensityMatrix4::from_trusted(real_matrix([
        [noise, 0.0, 0.0, 0.0],
        [0.0, noise + half, -half, 0.0],
        [0.0, -half, noise + half, 0.0],
        [0.0, 0.0, 0.0, noise],
    ]))
}

pub fn x_state(p: &XParams) -> DensityMatrix4 {
    DensityMatrix4::from_trusted(real_matrix([
        [p.x1, 0.0, 0.0, p.x4],
        [0.0, p.x2, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [p.x4, 0.0, 0.0, p.x3],
    ]))
}

/// `|Ψ(θ)⟩⟨Ψ(θ)|` with `|Ψ(θ)⟩ = cos θ|01⟩ + sin θ|10⟩`.
pub fn pure_theta_state(p: &PureThetaParam) -> DensityMatrix4 {
    let (s, co) = p.theta.sin_cos();
    let ket = [c(0.0, 0.0), c(co, 0.0), c(s, 0.0), c(0.0, 0.0)];
    DensityMatrix4::from_trusted(ComplexMatrix::outer(&ket))
}

pub fn product_state(p: &ProductParams) -> DensityMatrix4 {
    let half_id = qubit::identity().scale_real(0.5);
    let left = half_id.add(&qubit::dot_sigma(&p.m).scale_real(0.5));
    let right = half_id.add(&qubit::dot_sigma(&p.n).scale_real(0.5));
    DensityMatrix4::from_trusted(left.kron(&right))
}

fn bell_projector(a: f64, b: f64, plus: bool) -> DensityMatrix4 {
    // a|00⟩ + b|11⟩ style for φ, a|01⟩ + b|10⟩ style for ψ.
    let z = C64::default();
    let ket = if plus {
        [c(a, 0.0), z, z, c(b, 0.0)]
    } else {
        [z, c(a, 0.0), c(b, 0.0), z]
    };
    DensityMatrix4::from_trusted(ComplexMatrix::outer(&ket))
}

/// `|ψ⁻⟩⟨ψ⁻|`
pub fn singlet() -> DensityMatrix4 {
    bell_projector(FRAC_1_SQRT_2, -FRAC_1_SQRT_2, false)
}

/// `|ψ⁺⟩⟨ψ⁺|`
pub fn psi_plus() -> DensityMatrix4 {
    bell_projector(FRAC_1_SQRT_2, FRAC_1_SQRT_2, false)
}

/// `|φ⁺⟩⟨φ⁺|`
pub fn phi_plus() -> DensityMatrix4 {
    bell_projector(FRAC_1_SQRT_2, FRAC_1_SQRT_2, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{bloch_decompose, correlation_singular_values};
    use crate::density::validate_density;

    fn valid(rho: &DensityMatrix4) {
        validate_density(rho.matrix().clone()).expect("constructor output must validate");
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn grud_limits() {
        let rho = grud_state(&GrudParams::new(1.0, 0.4).unwrap());
        let mut expected = ComplexMatrix::zeros(4);
        expected[(0, 0)] = c(1.0, 0.0);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);

        let rho = grud_state(&GrudParams::new(0.0, FRAC_PI_4).unwrap());
        assert!(rho.matrix().max_abs_diff(psi_plus().matrix()) < 1e-15);
    }

    #[test]
    fn grud_bloch_vectors() {
        let rho = grud_state(&GrudParams::new(0.1, 0.23).unwrap());
        valid(&rho);
        let bf = bloch_decompose(&rho);
        close(bf.local_a[2], 0.1 - 0.9 * 0.46_f64.cos(), 1e-12);
        close(bf.local_b[2], 0.1 + 0.9 * 0.46_f64.cos(), 1e-12);
    }

    #[test]
    fn grud_rejects_out_of_range() {
        assert!(GrudParams::new(1.1, 0.1).is_err());
        assert!(GrudParams::new(0.5, 0.8).is_err());
        assert!(GrudParams::new(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn werner_endpoints_and_spectrum() {
        let rho0 = werner_state(&WernerParam::new(0.0).unwrap());
        assert!(
            rho0.matrix()
                .max_abs_diff(DensityMatrix4::maximally_mixed().matrix())
                < 1e-15
        );
        let rho1 = werner_state(&WernerParam::new(1.0).unwrap());
        assert!(rho1.matrix().max_abs_diff(singlet().matrix()) < 1e-15);

        let rho = werner_state(&WernerParam::new(0.3).unwrap());
        valid(&rho);
        let bf = bloch_decompose(&rho);
        assert!(bf.has_null_local_vectors(1e-15));
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { -0.3 } else { 0.0 };
                close(bf.correlation[i][j], expected, 1e-15);
            }
        }
        let s = correlation_singular_values(&rho).0;
        for v in s {
            close(v, 0.3, 1e-15);
        }
        assert!(WernerParam::new(1.0 / 3.0).unwrap().is_separable());
        assert!(!WernerParam::new(0.34).unwrap().is_separable());
    }

    #[test]
    fn x_state_spectrum_and_bloch() {
        let rho = x_state(&XParams::new(0.2, 0.1, 0.7, 0.15).unwrap());
        valid(&rho);
        let s = correlation_singular_values(&rho).0;
        close(s[0], 0.8, 1e-12);
        close(s[1], 0.3, 1e-12);
        close(s[2], 0.3, 1e-12);
        let bf = bloch_decompose(&rho);
        assert_eq!(bf.local_a[..2], [0.0, 0.0]);
        close(bf.local_a[2], 0.2 + 0.1 - 0.7, 1e-15);
        close(bf.local_b[2], 0.2 - 0.1 - 0.7, 1e-15);

        let rho = x_state(&XParams::new(0.86, 0.0, 0.14, 0.33).unwrap());
        let s = correlation_singular_values(&rho).0;
        close(s[0], 1.0, 1e-12);
        close(s[1], 0.66, 1e-12);
        close(s[2], 0.66, 1e-12);

        let rho = x_state(&XParams::new(0.5, 0.2, 0.3, 0.0).unwrap());
        let s = correlation_singular_values(&rho).0;
        close(s[0], 0.6, 1e-15);
        assert_eq!(s[1..], [0.0, 0.0]);
    }

    #[test]
    fn x_state_constraints() {
        assert!(XParams::new(0.2, 0.1, 0.6, 0.0).is_err());
        assert!(XParams::new(0.2, 0.1, 0.7, 0.4).is_err());
        assert!(XParams::new(-0.1, 0.4, 0.7, 0.0).is_err());
    }

    #[test]
    fn pure_theta_states() {
        let rho = pure_theta_state(&PureThetaParam::new(FRAC_PI_4).unwrap());
        assert!(rho.matrix().max_abs_diff(psi_plus().matrix()) < 1e-15);
        let s = correlation_singular_values(&rho).0;
        for v in s {
            close(v, 1.0, 1e-15);
        }

        let rho = pure_theta_state(&PureThetaParam::new(0.62).unwrap());
        valid(&rho);
        let s = correlation_singular_values(&rho).0;
        close(s[0], 1.0, 1e-15);
        close(s[1], 1.24_f64.sin(), 1e-15);
        close(s[2], 1.24_f64.sin(), 1e-15);

        let near_zero = pure_theta_state(&PureThetaParam::new(1e-9).unwrap());
        let mut ket01 = ComplexMatrix::zeros(4);
        ket01[(1, 1)] = c(1.0, 0.0);
        assert!(near_zero.matrix().max_abs_diff(&ket01) < 1e-8);
        assert!(PureThetaParam::new(0.0).is_err());
    }

    #[test]
    fn product_states() {
        let rho = product_state(&ProductParams::new([0.0; 3], [0.0; 3]).unwrap());
        assert!(
            rho.matrix()
                .max_abs_diff(DensityMatrix4::maximally_mixed().matrix())
                < 1e-15
        );

        let up = [0.0, 0.0, 1.0];
        let rho = product_state(&ProductParams::new(up, up).unwrap());
        let mut ket00 = ComplexMatrix::zeros(4);
        ket00[(0, 0)] = c(1.0, 0.0);
        assert!(rho.matrix().max_abs_diff(&ket00) < 1e-15);

        let rho = product_state(&ProductParams::new([0.3, 0.0, 0.4], [0.0, -0.8, 0.0]).unwrap());
        valid(&rho);
        let s = correlation_singular_values(&rho).0;
        close(s[0], 0.4, 1e-15);
        assert!(s[1] < 1e-15 && s[2] < 1e-15);
        assert!(ProductParams::new([1.0, 1.0, 0.0], [0.0; 3]).is_err());
    }

    #[test]
    fn bell_states_are_valid() {
        for rho in [singlet(), psi_plus(), phi_plus()] {
            valid(&rho);
        }
    }
}
